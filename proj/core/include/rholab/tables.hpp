#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rholab/bounds.hpp"
#include "rholab/envelope.hpp"
#include "rholab/harness.hpp"

namespace rholab {

/// Full-precision decimal formatting (17 significant digits) used by every
/// table emitter, so that doubles survive a round trip through text exactly.
std::string format_g17(double v);

/// Writes a field as one `i1 i2 [i3 i4] value` line per inside node, after a
/// `# field ...` header carrying the grid extents and solve metadata.
/// Obstacle nodes are recognizable as the exact value -1.
void write_field(const ScalarField& f, const std::string& path);

/// Loads a field written by write_field back onto the grid it came from.
/// The header must match the grid exactly (extents, origin, spacing); the
/// obstacle mask is rebuilt from exact -1 values and cross-checked against
/// the recorded count. Mismatches raise ConfigError.
ScalarField read_field(const Grid& g, const std::string& path);

/// Decay table `t,M,bound,margin,status` from a checked inequality report
/// (status ok / violation per row).
void write_decay_table(const KeyLemmaReport& rep, const std::string& path);

/// Decay table from a bare profile: bound and margin columns are nan and the
/// status is `measured`; skipped ladder entries appear as `empty-shell` rows.
void write_decay_table(const DecayProfile& p, const std::string& path);

/// Quadrature trace `t,kappa,integrand,partial_integral`: one row per sample,
/// integrand = kappa/t, partial integrals accumulated by the trapezoid rule
/// from the smallest sampled t (a plotting aid, not the adaptive result).
void write_integrand_trace(const DecayBound& b, const std::string& path);

struct FitRow {
    std::string name;
    double value = 0.0;
    double residual = 0.0;
};

/// Named-scalar table `name,value,residual`.
void write_fit_table(const std::vector<FitRow>& rows, const std::string& path);

/// Two whitespace-separated columns, one pair per line, for external plotting.
void write_plot_data(const std::vector<std::pair<double, double>>& xy,
                     const std::string& path);

} // namespace rholab
