#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rholab/barriers.hpp"
#include "rholab/bounds.hpp"
#include "rholab/envelope.hpp"
#include "rholab/numerics.hpp"

namespace rholab {

/// Shell-decay measurements down a ladder of depths.
///
/// M(t) = sup over interior nodes with delta <= t of (-u). Ladder entries
/// whose shell is empty, or where the field has no negative value yet,
/// are recorded in skipped_ts and excluded from the profile; the surviving
/// entries are sorted ascending, which makes M nondecreasing by construction
/// (shells are nested).
struct DecayProfile {
    std::vector<double> ts;
    std::vector<double> M;
    std::vector<double> skipped_ts;
    /// -slope of log M against log(-log t) on the smallest-t half of the
    /// ladder (NaN when fewer than two usable points).
    double fitted_exponent_log = std::numeric_limits<double>::quiet_NaN();
    /// slope of log M against log t on the same window (NaN likewise).
    double fitted_exponent_power = std::numeric_limits<double>::quiet_NaN();
    LineFit fit_log;
    LineFit fit_power;
};

/// Measures M(t) for every ladder entry on a converged field.
/// Requires a converged field with a grid; a non-converged field or an
/// invalid ladder entry raises ParameterError.
DecayProfile decay_profile(const ScalarField& field, const std::vector<double>& ladder);

struct KeyLemmaRow {
    double r = 0.0;
    double M = 0.0;
    double bound = 0.0;
    double slack = 0.0;  // grid allowance 5h/r applied multiplicatively
    double margin = 0.0; // bound*(1+slack) - M
    bool ok = true;
};

struct KeyLemmaReport {
    std::vector<KeyLemmaRow> rows;
    double grid_h = 0.0;
    std::size_t worst = 0; // index of the smallest margin
    bool pass = true;
};

/// Asserts M(r) <= bound(r) * (1 + 5h/r) at every profile entry. The bounds
/// list must cover the profile ladder (matching r values); a missing entry
/// raises ParameterError. Violations do not throw: they mark the report
/// failed with the worst row identified.
KeyLemmaReport check_key_lemma(const DecayProfile& profile,
                               const std::vector<DecayBound>& bounds, double h);

struct ComparisonReport {
    double t = 0.0;
    double band_sup = 0.0; // S = sup of psi_t over the band |delta - t| <= h
    double shell_M = 0.0;  // sup of (-u) over the shell delta <= t
    double slack = 0.0;    // 5h/t
    std::size_t checked = 0;
    std::vector<std::uint32_t> violations; // offending nodes, capped at 32
    std::uint32_t worst_node = 0;
    double worst_gap = 0.0; // min over nodes of lhs*(1+slack) - rhs
    bool pass = true;
};

/// Checks the pointwise comparison (1 - psi_t(z)) * M(t) >= (1 - S) * (-u(z))
/// at every interior node of the shell {delta <= t}, with multiplicative
/// grid slack 5h/t on the left side. S >= 1 (degenerate normalization)
/// raises HypothesisError; an empty shell or band raises ParameterError.
ComparisonReport check_comparison_inequality(const ScalarField& field,
                                             const BarrierFamily& f, double t);

enum class HyperconvexityClass { hyperconvex_consistent, obstructed, inconclusive };

std::string to_string(HyperconvexityClass c);

/// Endpoint-ratio classification over the profile:
/// "hyperconvex-consistent" when M(t_min) <= 0.5 * M(t_max),
/// "obstructed" when M(t_min) >= 0.9 * M(t_max), otherwise inconclusive.
/// Profiles spanning fewer than two decades of t are always inconclusive.
/// Never throws.
HyperconvexityClass classify_hyperconvexity(const DecayProfile& profile);

struct CurveCheckRow {
    double t = 0.0;
    double M = 0.0;
    double curve = 0.0; // C * (-log t)^(-tau)
    bool ok = true;
};

struct CurveCheck {
    double C = 0.0;
    double tau = 0.0;
    std::vector<CurveCheckRow> rows;
    bool pass = true;
};

/// One-point calibration of the log-power decay curve: C is chosen so the
/// curve touches the profile at its largest t, then M(t) <= C*(-log t)^(-tau)
/// is checked at every smaller entry. Requires tau > 0 and all t < 1.
CurveCheck check_log_power_curve(const DecayProfile& profile, double tau);

} // namespace rholab
