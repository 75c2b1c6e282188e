#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace rholab {

// Result of an adaptive quadrature: value plus an a-posteriori error estimate
// (sum of per-panel Richardson estimates at the accepted depth).
struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

// Adaptive Simpson integration of f over [a, b].
//
// The interval is split into `base_panels` equal panels first (callers
// integrating over several decades substitute u = log t and pass the
// transformed integrand, so equal panels are log-spaced in the original
// variable); each panel is then bisected recursively until the local
// Richardson error estimate meets rel_tol * |integral so far| with an
// absolute floor. Panel order and recursion order are fixed, so the
// summation order (and hence the result, bit for bit) is deterministic.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double rel_tol = 1e-6, double abs_floor = 1e-12,
                            int base_panels = 8, int max_depth = 48);

// Fixed-node composite Simpson with `nodes` panel endpoints (nodes must be
// odd >= 3). Used as an independent cross-check oracle for the adaptive rule.
double composite_simpson(const std::function<double(double)>& f, double a, double b,
                         int nodes);

// Ordinary least squares fit y ~ slope * x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // root mean square residual
    std::size_t points = 0;
};
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

// Pairwise (cascade) summation; deterministic and more accurate than a naive
// left-to-right loop for long vectors.
double pairwise_sum(const double* v, std::size_t n);

// Smallest real root of a*x^2 + b*x + c = 0 strictly greater than eps,
// computed with the numerically stable split. Degenerate (linear) equations
// are handled; no-root cases return nullopt.
std::optional<double> smallest_root_above(double a, double b, double c, double eps);

} // namespace rholab
