#pragma once

#include <memory>
#include <string>

#include "rholab/config.hpp"

namespace rholab {

/// Outcome of one experiment run. `summary` is the deterministic report also
/// written to <out>/summary.txt; exit_code follows the CLI contract:
/// 0 all assertions hold, 1 an assertion failed (including hypothesis
/// violations), 2 the configuration or domain setup was unusable, 3 the
/// solver did not converge within its iteration budget.
struct ExperimentResult {
    int exit_code = 0;
    bool pass = true;
    std::string summary;
};

/// Instantiate the domain described by a resolved [domain] section.
std::unique_ptr<Domain> build_domain(const DomainConfig& dc);

/// Run the experiment described by `cfg`, writing its report files into
/// `out_dir` (created if missing). Never throws: errors are folded into the
/// exit code and recorded in the summary.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir);

} // namespace rholab
