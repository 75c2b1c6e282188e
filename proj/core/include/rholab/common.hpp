#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rholab {

// A point of C^n (n = 1 or 2) stored as 2n real coordinates.
// For n = 1 only x[0], x[1] are meaningful; unused slots stay zero so that
// norms and distances can be computed uniformly over all four entries.
struct Point {
    std::array<double, 4> x{0.0, 0.0, 0.0, 0.0};
    int n = 1; // complex dimension

    static Point c1(double re, double im) { return Point{{re, im, 0.0, 0.0}, 1}; }
    static Point c2(double re1, double im1, double re2, double im2) {
        return Point{{re1, im1, re2, im2}, 2};
    }

    int real_dim() const { return 2 * n; }

    double norm2() const {
        return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    }
    double norm() const { return std::sqrt(norm2()); }

    // modulus of the j-th complex coordinate (j = 0 or 1)
    double cmod(int j) const { return std::hypot(x[2 * j], x[2 * j + 1]); }

    Point operator+(const Point& o) const {
        Point r = *this;
        for (int i = 0; i < 4; ++i) r.x[i] += o.x[i];
        return r;
    }
    Point operator-(const Point& o) const {
        Point r = *this;
        for (int i = 0; i < 4; ++i) r.x[i] -= o.x[i];
        return r;
    }
    Point operator*(double s) const {
        Point r = *this;
        for (int i = 0; i < 4; ++i) r.x[i] *= s;
        return r;
    }
    double dot(const Point& o) const {
        return x[0] * o.x[0] + x[1] * o.x[1] + x[2] * o.x[2] + x[3] * o.x[3];
    }
};

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch coarsely; the distinct types exist because several operations promise
// a specific failure class for a specific precondition.
struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& m) : std::runtime_error(m) {}
};
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& m) : std::runtime_error(m) {}
};
struct UnsupportedKindError : std::runtime_error {
    explicit UnsupportedKindError(const std::string& m) : std::runtime_error(m) {}
};
// Raised when the barrier separation hypothesis fails at some shell depth:
// the infimum over the wall shell does not exceed the supremum over the
// sublevel boundary band. Carries both extrema and the offending t.
struct HypothesisError : std::runtime_error {
    double t, shell_inf, band_sup;
    HypothesisError(double t_, double inf_, double sup_, const std::string& m)
        : std::runtime_error(m), t(t_), shell_inf(inf_), band_sup(sup_) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

} // namespace rholab
