#pragma once

#include "cbd/config.hpp"
#include "cbd/report.hpp"
#include "cbd/sparse.hpp"

namespace cbd {

struct SuiteResult {
    std::vector<CheckRow> checks;
    nlohmann::json details;
};

SuiteResult suite_verify(const ExperimentConfig& cfg);
SuiteResult suite_dominate(const ExperimentConfig& cfg);
SuiteResult suite_weights(const ExperimentConfig& cfg);
SuiteResult suite_commutator(const ExperimentConfig& cfg);
SuiteResult suite_equivalence(const ExperimentConfig& cfg);

// Deterministic report body (no timestamp): suite, seed, config echo,
// checks, details. Identical bytes for identical config and seed.
nlohmann::json run_suite_json(const std::string& name, const ExperimentConfig& cfg);

// Families serialize as (level, ix, iy, witness-cell ranges, a_Q).
nlohmann::json family_to_json(const SparseFamily& fam);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

} // namespace cbd
