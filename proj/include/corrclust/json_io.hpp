#pragma once

#include <string>

#include "corrclust/analysis.hpp"
#include "corrclust/relaxation.hpp"
#include "corrclust/types.hpp"

namespace ccl {

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

std::string clustering_to_json(const Clustering& c);
Clustering clustering_from_json(const std::string& text);

std::string solution_to_json(const FractionalSolution& s);
FractionalSolution solution_from_json(const std::string& text);

std::string disagreement_report_to_json(const DisagreementReport& r);
std::string decomposition_check_to_json(const DecompositionCheck& c);
std::string local_guarantee_to_json(const LocalGuaranteeReport& r);
std::string f_claims_to_json(const FClaimsReport& r);
std::string pi_check_to_json(const PiCheckReport& r);
std::string phi_check_to_json(const PhiCheck& r);
std::string gap_report_to_json(const GapReport& r);

std::string cluster_pick_to_json(const ClusterPick& pick);

// Write-to-temp + atomic rename; no partial files on failure.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace ccl
