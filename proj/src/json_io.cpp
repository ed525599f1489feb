#include "corrclust/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

using nlohmann::json;

namespace ccl {

namespace {

json matrix_to_json(const Matrix& m, int n) {
  json rows = json::array();
  for (int u = 0; u < n; ++u) {
    json row = json::array();
    for (int v = 0; v < n; ++v) row.push_back(mat_at(m, n, u, v));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, int n, const char* field) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
    throw io_error(std::string(field) + ": expected " + std::to_string(n) + " rows");
  }
  Matrix m(static_cast<std::size_t>(n) * n, 0.0);
  for (int u = 0; u < n; ++u) {
    const json& row = rows[u];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw io_error(std::string(field) + ": row " + std::to_string(u) + " has wrong length");
    }
    for (int v = 0; v < n; ++v) mat_at(m, n, u, v) = row[v].get<double>();
  }
  return m;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json j;
  j["n"] = inst.n;
  j["alpha"] = inst.alpha;
  j["w_scale"] = inst.w_scale;
  json sign = json::array();
  for (int u = 0; u < inst.n; ++u) {
    json row = json::array();
    for (int v = 0; v < inst.n; ++v) row.push_back(u == v ? 0 : static_cast<int>(inst.sgn(u, v)));
    sign.push_back(std::move(row));
  }
  j["sign"] = std::move(sign);
  j["weight"] = matrix_to_json(inst.weight, inst.n);
  return j.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw io_error(std::string("instance parse error: ") + e.what());
  }
  Instance inst;
  try {
    inst.n = j.at("n").get<int>();
    inst.alpha = j.at("alpha").get<double>();
    inst.w_scale = j.at("w_scale").get<double>();
    if (inst.n < 1) throw io_error("field n: must be >= 1");
    if (!(inst.alpha > 0.0) || inst.alpha > 1.0) throw io_error("field alpha: must be in (0, 1]");
    if (!(inst.w_scale > 0.0)) throw io_error("field w_scale: must be positive");

    const json& sign = j.at("sign");
    const json& weight = j.at("weight");
    inst.weight = matrix_from_json(weight, inst.n, "weight");
    if (!sign.is_array() || static_cast<int>(sign.size()) != inst.n) {
      throw io_error("field sign: wrong shape");
    }
    inst.sign.assign(static_cast<std::size_t>(inst.n) * inst.n, 0);
    for (int u = 0; u < inst.n; ++u) {
      const json& row = sign[u];
      if (!row.is_array() || static_cast<int>(row.size()) != inst.n) {
        throw io_error("field sign: row " + std::to_string(u) + " has wrong length");
      }
      for (int v = 0; v < inst.n; ++v) {
        const int s = row[v].get<int>();
        if (u == v) continue;  // diagonal ignored
        if (s != 1 && s != -1) {
          throw io_error("field sign: entry (" + std::to_string(u) + "," + std::to_string(v) +
                         ") must be +1 or -1");
        }
        inst.sign[static_cast<std::size_t>(u) * inst.n + v] = static_cast<std::int8_t>(s);
      }
    }
  } catch (const json::exception& e) {
    throw io_error(std::string("instance field error: ") + e.what());
  }
  // structural invariants
  for (int u = 0; u < inst.n; ++u) {
    mat_at(inst.weight, inst.n, u, u) = 0.0;
    for (int v = u + 1; v < inst.n; ++v) {
      const std::string edge = "(" + std::to_string(u) + "," + std::to_string(v) + ")";
      if (inst.sgn(u, v) != inst.sgn(v, u)) throw io_error("sign matrix asymmetric at " + edge);
      if (inst.wt(u, v) != inst.wt(v, u)) throw io_error("weight matrix asymmetric at " + edge);
      if (!(inst.wt(u, v) > 0.0)) throw io_error("non-positive weight on edge " + edge);
    }
  }
  return inst;
}

std::string clustering_to_json(const Clustering& c) {
  json j;
  j["labels"] = c.labels;
  return j.dump() + "\n";
}

Clustering clustering_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw io_error(std::string("clustering parse error: ") + e.what());
  }
  Clustering c;
  try {
    c.labels = j.at("labels").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw io_error(std::string("clustering field error: ") + e.what());
  }
  c.check_valid();
  return c;
}

std::string solution_to_json(const FractionalSolution& s) {
  json j;
  j["p"] = s.p.str();
  j["objective"] = s.objective;
  j["x"] = matrix_to_json(s.x, s.n);
  j["y"] = s.y;
  j["max_triangle_residual"] = s.max_triangle_residual;
  j["converged"] = s.converged;
  return j.dump(2) + "\n";
}

FractionalSolution solution_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw io_error(std::string("solution parse error: ") + e.what());
  }
  FractionalSolution s;
  try {
    s.p = NormOrder::parse(j.at("p").get<std::string>());
    s.objective = j.at("objective").get<double>();
    s.y = j.at("y").get<std::vector<double>>();
    s.n = static_cast<int>(s.y.size());
    s.x = matrix_from_json(j.at("x"), s.n, "x");
    s.max_triangle_residual = j.at("max_triangle_residual").get<double>();
    s.converged = j.value("converged", true);
  } catch (const json::exception& e) {
    throw io_error(std::string("solution field error: ") + e.what());
  }
  return s;
}

std::string disagreement_report_to_json(const DisagreementReport& r) {
  json j;
  j["dis"] = r.dis;
  j["norms"] = r.norms;
  return j.dump(2) + "\n";
}

std::string decomposition_check_to_json(const DecompositionCheck& c) {
  json j;
  j["trials"] = c.trials;
  j["diameter_ok"] = c.diameter_ok;
  j["prop3_violations"] = c.prop3_violations;
  j["lemma8_violations"] = c.lemma8_violations;
  j["mu_S_min"] = c.mu_S_min;
  j["prop2_ratio"] = c.prop2_ratio;
  j["prop2_flagged"] = c.prop2_flagged;
  j["epsilon"] = c.epsilon;
  j["yp_mean"] = c.yp_mean;
  j["yp_max"] = c.yp_max;
  j["light_trials"] = c.light_trials;
  j["heavy_trials"] = c.heavy_trials;
  return j.dump(2) + "\n";
}

std::string local_guarantee_to_json(const LocalGuaranteeReport& r) {
  json j;
  j["A1"] = r.A1;
  j["A_inf"] = r.A_inf;
  j["r"] = r.r;
  j["negative_bound_violations"] = r.negative_bound_violations;
  j["long_edge_bound_violations"] = r.long_edge_bound_violations;
  j["long_edge_count_violations"] = r.long_edge_count_violations;
  j["max_ratio_over_Ainf"] = r.max_ratio_over_Ainf;
  j["mean_ratio_over_A1"] = r.mean_ratio_over_A1;
  j["per_vertex_ratio"] = r.per_vertex_ratio;
  return j.dump(2) + "\n";
}

std::string f_claims_to_json(const FClaimsReport& r) {
  json j;
  j["tail_identity_lhs"] = r.tail_identity_lhs;
  j["tail_identity_rhs"] = r.tail_identity_rhs;
  j["identity_residual"] = r.identity_residual;
  j["grid_violations"] = r.grid_violations;
  j["max_grid_excess"] = r.max_grid_excess;
  return j.dump(2) + "\n";
}

std::string pi_check_to_json(const PiCheckReport& r) {
  json j;
  j["lipschitz_violations"] = r.lipschitz_violations;
  j["monotonicity_violations"] = r.monotonicity_violations;
  j["inverse_violations"] = r.inverse_violations;
  j["membership_violations"] = r.membership_violations;
  j["max_inverse_residual"] = r.max_inverse_residual;
  return j.dump(2) + "\n";
}

std::string phi_check_to_json(const PhiCheck& r) {
  json j;
  j["applicable"] = r.applicable;
  j["gamma"] = r.gamma;
  j["eta"] = r.eta;
  j["r_prime"] = r.r_prime;
  j["R_prime"] = r.R_prime;
  j["mu_S_prime"] = r.mu_S_prime;
  j["phi_at_R_prime"] = r.phi_at_R_prime;
  j["bound_rhs"] = r.bound_rhs;
  j["bound_ok"] = r.bound_ok;
  return j.dump(2) + "\n";
}

std::string gap_report_to_json(const GapReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr;
    jr["alpha"] = row.alpha;
    jr["p"] = row.p;
    jr["n"] = row.n;
    jr["fractional_cost"] = row.fractional_cost;
    jr["integral_lb"] = row.integral_lb;
    if (row.bruteforce_opt) jr["bruteforce_opt"] = *row.bruteforce_opt;
    else jr["bruteforce_opt"] = nullptr;
    jr["ratio"] = row.ratio;
    rows.push_back(std::move(jr));
  }
  json j;
  j["rows"] = std::move(rows);
  j["slope"] = r.slope;
  return j.dump(2) + "\n";
}

std::string cluster_pick_to_json(const ClusterPick& pick) {
  json j;
  j["pivot"] = pick.pivot;
  j["heavy"] = pick.heavy;
  j["mu_S"] = pick.mu_S;
  j["t"] = pick.t;
  j["members"] = pick.members;
  return j.dump();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + tmp + "' for writing");
    out << content;
    if (!out.good()) {
      std::remove(tmp.c_str());
      throw io_error("write failed for '" + tmp + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw io_error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

}  // namespace ccl
