#pragma once

#include "rholab/envelope.hpp"
#include "rholab/geometry.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rholab {

// ---------------------------------------------------------------------------
// Gauge functions
// ---------------------------------------------------------------------------

/// Gauge for the slowest barrier family: a continuous increasing function
/// with 0 < eta(t) <= t on the working interval.  Built-in shapes are
/// power laws, t * (-log t)^(log t), and exp(-1/t); arbitrary tabulated
/// gauges are interpolated piecewise-linearly.
class EtaFunction {
  public:
    /// eta(t) = t^gamma. Requires gamma >= 1.
    static EtaFunction power(double gamma);
    /// eta(t) = t * (-log t)^(log t).  Valid for t <= 1/e (above that the
    /// value would exceed t).
    static EtaFunction loglog();
    /// eta(t) = exp(-1/t).
    static EtaFunction expinv();
    /// Piecewise-linear gauge through (t, eta) rows, strictly increasing.
    static EtaFunction from_samples(std::vector<std::pair<double, double>> rows);

    /// Parse a configuration selector: "power:gamma=<g>", "loglog",
    /// "expinv", or "samples:<path>" (rows "t eta", whitespace-separated).
    static EtaFunction parse(const std::string& text);

    double operator()(double t) const;

    /// Verify the gauge conditions (continuous increasing, 0 < eta(t) <= t)
    /// on a geometric ladder spanning (0, t0]; throws ParameterError on the
    /// first violation.
    void validate(double t0) const;

    const std::string& describe() const { return name_; }

  private:
    enum class Kind { power, loglog, expinv, samples };
    Kind kind_ = Kind::power;
    double gamma_ = 2.0;
    std::vector<std::pair<double, double>> rows_;
    std::string name_;
};

// ---------------------------------------------------------------------------
// Barrier families
// ---------------------------------------------------------------------------

/// Knobs shared by the barrier families.  alpha is the shell ratio of the
/// decay machinery, epsilon the dilation ratio (dilations are taken at
/// scale epsilon * t), gamma / beta_dil the dilation law exponents
/// (boundary gap between beta_dil * t^gamma and t), c_demailly the
/// two-sided slack of the modelled v_t, and r0 / t0 the base shell depth
/// and the largest barrier scale.
struct BarrierParams {
    double alpha = 0.1;
    double epsilon = 0.1;
    double gamma = 1.0;
    double beta_dil = 1.0;
    double c_demailly = 0.0;
    std::optional<EtaFunction> eta;
    double r0 = 0.0;
    double t0 = 0.0;
};

enum class BarrierKind { holder, lipschitz, eta };

std::string to_string(BarrierKind k);

/// A one-parameter family of negative plurisubharmonic-type comparison
/// functions psi_t on a base domain.  The holder and eta kinds measure the
/// distance to the complement of the dilated domain Omega^(epsilon t) and
/// need a graph-kind base (the only kind with a dilation law); the
/// lipschitz kind models the regularized log-distance v_s directly on the
/// base domain.  Families are immutable and safe for concurrent evaluation;
/// dilated domains are built lazily and cached per scale.
class BarrierFamily {
  public:
    static BarrierFamily holder_family(const Domain& base, BarrierParams p);
    static BarrierFamily lipschitz_family(const Domain& base, BarrierParams p);
    static BarrierFamily eta_family(const Domain& base, BarrierParams p);

    BarrierKind kind() const { return kind_; }
    const BarrierParams& params() const { return params_; }
    const Domain& base() const { return *base_; }

    /// psi_t(z); dispatches on the family kind.  Requires z inside the base
    /// domain and t in (0, t0].
    double psi(const Point& z, double t) const;

    /// The cached dilation Omega^s of the base domain.
    const Domain& dilation(double s) const;

    /// v_s(z) = log(1/(delta(z)+s)) - c_demailly/2, the modelled
    /// regularized log-distance (lipschitz kind only).  Satisfies
    /// log(1/(delta+s)) - c <= v_s <= log(1/(delta+s)).
    double v_model(const Point& z, double s) const;

  private:
    BarrierFamily(BarrierKind k, const Domain& base, BarrierParams p);

    BarrierKind kind_;
    BarrierParams params_;
    std::unique_ptr<Domain> base_;
    mutable std::mutex cache_mu_;
    mutable std::map<double, std::unique_ptr<Domain>> dilation_cache_;
};

/// psi_t(z) = log(1/delta_dil(z)) / log(2/(beta_dil * (epsilon t)^gamma))
/// where delta_dil is the boundary distance in Omega^(epsilon t).
double psi_holder(const BarrierFamily& f, const Point& z, double t);

/// psi_t(z) = v_(epsilon t)(z) / log(2/(epsilon t)).
double psi_lipschitz(const BarrierFamily& f, const Point& z, double t);

/// psi_t(z) = log(1/delta_dil(z)) / log(2/eta(epsilon t)).
double psi_eta(const BarrierFamily& f, const Point& z, double t);

/// Evaluate psi_t at every interior node of `g`; non-interior nodes get NaN.
/// Deterministic for every worker count.
std::vector<double> barrier_field(const BarrierFamily& f, const Grid& g, double t);

/// Indices of the interior nodes of a grid, ascending.
std::vector<std::uint32_t> interior_nodes(const Grid& g);

/// Interior nodes of the field's grid whose one-cell stencil block reads no
/// constrained (obstacle-pinned) node.  On these nodes the field is purely
/// the solved equation, so pointwise difference checks measure the solution
/// rather than the constraint data.
std::vector<std::uint32_t> free_interior_nodes(const ScalarField& field);

// ---------------------------------------------------------------------------
// kappa
// ---------------------------------------------------------------------------

/// One decay-rate sample: the normalized gap between the barrier's infimum
/// over the shell {delta <= alpha t} and its supremum over the discrete
/// boundary band {|delta - t| <= h}.  The band half-width h is carried so
/// reports can state the discretization of the two extrema.
struct KappaValue {
    double t = 0.0;
    double value = 0.0;
    double shell_inf = 0.0;
    double band_sup = 0.0;
    std::size_t shell_nodes = 0;
    std::size_t band_nodes = 0;
    double band_halfwidth = 0.0;
};

/// kappa_alpha(t) = (inf_shell psi_t - sup_band psi_t) / (1 - sup_band psi_t),
/// with the extrema taken over grid nodes.  Throws HypothesisError when the
/// infimum does not exceed the supremum (or the supremum reaches 1), and
/// ParameterError when either node set is empty.  The result lies in (0,1).
KappaValue kappa_alpha(const BarrierFamily& f, const Grid& g, double t);

// ---------------------------------------------------------------------------
// Plurisubharmonicity check
// ---------------------------------------------------------------------------

/// Outcome of the discrete sub-mean-value / complex-Hessian test.
struct LeviReport {
    std::size_t checked = 0;
    std::size_t skipped = 0; // stencil left the domain (or hit undefined data)
    double worst_mean_defect = 0.0; // max over nodes/directions of center - average
    double worst_eigenvalue = 0.0;  // min over nodes of the smallest Levi eigenvalue
    std::size_t worst_defect_node = 0;
    std::size_t worst_eig_node = 0;
    double tol = 0.0;
    bool pass = false;
};

/// Check, at each sample node, that the field satisfies the sub-mean-value
/// property along the fixed complex-direction set (8-point circle averages
/// at radius h, multilinear interpolation) and that the discrete complex
/// Hessian's smallest eigenvalue is >= -tol.  Nodes whose stencil touches a
/// non-interior lattice point (or a non-finite value) are skipped and
/// counted.  Passes when the worst circle defect is <= tol and the worst
/// eigenvalue is >= -tol.
LeviReport levi_test(const Grid& g, const std::vector<double>& values,
                     const std::vector<std::uint32_t>& sample, double tol);

LeviReport levi_test(const ScalarField& field,
                     const std::vector<std::uint32_t>& sample, double tol);

} // namespace rholab
