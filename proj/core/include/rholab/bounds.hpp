#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rholab/barriers.hpp"
#include "rholab/common.hpp"
#include "rholab/geometry.hpp"

namespace rholab {

/// Result of the decay-bound quadrature for one shell depth r.
///
/// value = exp( -(1/log(1/alpha)) * integral_{r/alpha}^{r0} kappa_alpha(t)/t dt ).
/// When r >= alpha*r0 the integration window is empty and the bound degenerates
/// to the trivial 1.0 with no samples recorded.
struct DecayBound {
    double r = 0.0;
    double value = 1.0;
    /// (t, kappa_alpha(t)) at every quadrature node, sorted by t.
    std::vector<std::pair<double, double>> integrand_samples;
    /// Error estimate of the kappa/t integral (not of `value` itself).
    double quad_error = 0.0;
};

/// Decay bound from an arbitrary kappa profile. `kappa` is evaluated at
/// log-spaced adaptive-quadrature nodes t in [r/alpha, r0]; each value must
/// lie in (0, 1) for the hypothesis to hold, but this routine does not
/// enforce that— a kappa callback that detects failure should throw
/// HypothesisError itself (kappa_alpha does).
DecayBound decay_bound_from_kappa(const std::function<double(double)>& kappa,
                                  double alpha, double r, double r0,
                                  double quad_rel = 1e-6, double quad_abs = 1e-12);

/// Decay bound with kappa measured on the grid via kappa_alpha(f, g, t).
/// Kappa evaluations are memoized per quadrature node, and the memo is
/// returned as integrand_samples. HypothesisError from any node propagates
/// with the offending t.
DecayBound decay_bound_integral(const BarrierFamily& f, const Grid& g,
                                double r, double r0,
                                double quad_rel = 1e-6, double quad_abs = 1e-12);

/// Bounds for a strictly increasing ladder of radii, all in (0, r0], sharing
/// one kappa memo: the nested windows [r/alpha, r0] are split at the window
/// bottoms and each segment is integrated once (suffix sums assemble the
/// per-radius integrals), so a full ladder costs about one widest-window
/// quadrature instead of one per rung. Radii with r/alpha >= r0 yield the
/// trivial bound 1. Each entry's integrand_samples holds the shared memo
/// restricted to that entry's window.
std::vector<DecayBound> decay_bound_ladder(const BarrierFamily& f, const Grid& g,
                                           const std::vector<double>& rs, double r0,
                                           double quad_rel = 1e-6,
                                           double quad_abs = 1e-12);

/// Predicted decay-rate exponent for the log-power regime (gamma > 1):
/// exponent = log(1/(alpha+epsilon)) / ((gamma-1) * log(1/alpha)),
/// supremal = 1/(gamma-1), the limit as alpha = epsilon -> 0.
struct HolderRate {
    double exponent = 0.0;
    double supremal = 0.0;
};

/// Computes the log-power decay exponent from barrier parameters.
/// Requires gamma > 1 (gamma <= 1 has no log-power regime; use the
/// Lipschitz rate lipschitz_tau instead) and alpha + epsilon < 1.
HolderRate holder_rate_exponent(const BarrierParams& p);

/// Power-law decay exponent for the Lipschitz model:
/// tau = (1/log(1/alpha)) * (log((1+eps)/(alpha+eps)) - c) /
///       (log((2+2*eps)/eps) + c).
/// Requires log((1+eps)/(alpha+eps)) > c (strictly), alpha, eps in (0,1).
double lipschitz_tau(const BarrierParams& p);

enum class EtaClass { divergent, convergent, inconclusive };

std::string to_string(EtaClass c);

/// Outcome of the gauge-integral divergence probe.
struct EtaReport {
    EtaClass cls = EtaClass::inconclusive;
    /// (a_k, I(a_k)) with I(a) = integral_a^{r0} dt / (t * log(t/eta(t)))
    /// down the dyadic ladder a_k = r0 * 2^{-k}.
    std::vector<std::pair<double, double>> partials;
    /// Last-decade regression slopes of I against log(log(1/a)) and log(1/a).
    double slope_loglog = 0.0;
    double slope_log = 0.0;
    /// Number of ladder rungs actually evaluated.
    int rungs = 0;
};

/// Classifies whether the integral of dt/(t*log(t/eta(t))) diverges as the
/// lower limit tends to 0. Partial integrals are accumulated down the ladder
/// a_k = r0*2^{-k}, k <= 40; the run stops early as `convergent` when an
/// increment falls below 1e-6. Otherwise the tail is declared `divergent`
/// when either last-decade slope stays >= 1e-3, else `inconclusive`.
/// A node with log(t/eta(t)) <= 0 raises ParameterError.
EtaReport eta_divergence_test(const EtaFunction& eta, double r0);

} // namespace rholab
