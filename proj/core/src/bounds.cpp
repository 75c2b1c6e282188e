#include "rholab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "rholab/numerics.hpp"

namespace rholab {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

DecayBound decay_bound_from_kappa(const std::function<double(double)>& kappa,
                                  double alpha, double r, double r0,
                                  double quad_rel, double quad_abs) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw ParameterError("decay_bound: alpha must lie in (0,1), got " + fmt(alpha));
    if (!(r0 > 0.0) || !std::isfinite(r0))
        throw ParameterError("decay_bound: r0 must be positive, got " + fmt(r0));
    if (!(r > 0.0) || !(r <= r0))
        throw ParameterError("decay_bound: r must lie in (0, r0], got r = " + fmt(r) +
                             ", r0 = " + fmt(r0));

    DecayBound out;
    out.r = r;

    const double lo = r / alpha;
    if (!(lo < r0)) {
        // Empty integration window: the bound carries no information.
        out.value = 1.0;
        return out;
    }

    // Memoize kappa per node so repeated quadrature evaluations at shared
    // panel endpoints hit the grid scan only once, and so the sample trace
    // returned to the caller matches the integral exactly.
    std::map<double, double> memo;
    const auto kappa_at = [&](double t) {
        auto it = memo.find(t);
        if (it != memo.end()) return it->second;
        const double k = kappa(t);
        memo.emplace(t, k);
        return k;
    };

    // Substituting u = log t turns integral of kappa(t)/t dt into integral of
    // kappa(e^u) du, making the adaptive panels log-spaced in t.
    const auto integrand = [&](double u) { return kappa_at(std::exp(u)); };
    const QuadResult q = adaptive_simpson(integrand, std::log(lo), std::log(r0),
                                          quad_rel, quad_abs);

    const double scale = 1.0 / std::log(1.0 / alpha);
    out.value = std::exp(-scale * q.value);
    out.quad_error = q.error_estimate;
    out.integrand_samples.assign(memo.begin(), memo.end());
    return out;
}

DecayBound decay_bound_integral(const BarrierFamily& f, const Grid& g,
                                double r, double r0,
                                double quad_rel, double quad_abs) {
    const double alpha = f.params().alpha;
    const auto kappa = [&](double t) { return kappa_alpha(f, g, t).value; };
    return decay_bound_from_kappa(kappa, alpha, r, r0, quad_rel, quad_abs);
}

std::vector<DecayBound> decay_bound_ladder(const BarrierFamily& f, const Grid& g,
                                           const std::vector<double>& rs, double r0,
                                           double quad_rel, double quad_abs) {
    const double alpha = f.params().alpha;
    if (!(r0 > 0.0) || !std::isfinite(r0))
        throw ParameterError("decay_bound: r0 must be positive, got " + fmt(r0));
    for (double r : rs)
        if (!(r > 0.0) || !(r <= r0))
            throw ParameterError("decay_bound: r must lie in (0, r0], got r = " +
                                 fmt(r) + ", r0 = " + fmt(r0));
    for (std::size_t i = 1; i < rs.size(); ++i)
        if (!(rs[i - 1] < rs[i]))
            throw ParameterError("decay_bound: ladder radii must be strictly increasing");

    std::map<double, double> memo;
    const auto kappa_at = [&](double t) {
        auto it = memo.find(t);
        if (it != memo.end()) return it->second;
        const double k = kappa_alpha(f, g, t).value;
        memo.emplace(t, k);
        return k;
    };
    const auto integrand = [&](double u) { return kappa_at(std::exp(u)); };

    // The integration windows [r/alpha, r0] nest, so integrate each disjoint
    // segment between consecutive window bottoms once and reuse it in every
    // deeper window via suffix sums, sharing one kappa memo throughout.
    std::vector<double> bottoms; // window bottoms below r0, ascending
    for (double r : rs)
        if (r / alpha < r0) bottoms.push_back(r / alpha);
    std::vector<double> seg_value(bottoms.size(), 0.0);
    std::vector<double> seg_error(bottoms.size(), 0.0);
    for (std::size_t i = 0; i < bottoms.size(); ++i) {
        const double a = bottoms[i];
        const double b = i + 1 < bottoms.size() ? bottoms[i + 1] : r0;
        const QuadResult q =
            adaptive_simpson(integrand, std::log(a), std::log(b), quad_rel, quad_abs);
        seg_value[i] = q.value;
        seg_error[i] = q.error_estimate;
    }
    // suffix sums: integral over [bottoms[i], r0]
    for (std::size_t i = bottoms.size(); i-- > 1;) {
        seg_value[i - 1] += seg_value[i];
        seg_error[i - 1] += seg_error[i];
    }

    const double scale = 1.0 / std::log(1.0 / alpha);
    std::vector<DecayBound> out;
    out.reserve(rs.size());
    std::size_t window = 0;
    for (double r : rs) {
        DecayBound b;
        b.r = r;
        if (!(r / alpha < r0)) {
            b.value = 1.0;
        } else {
            b.value = std::exp(-scale * seg_value[window]);
            b.quad_error = seg_error[window];
            const double lo = r / alpha;
            for (const auto& [t, k] : memo)
                if (t >= lo * (1.0 - 1e-12)) b.integrand_samples.emplace_back(t, k);
            ++window;
        }
        out.push_back(std::move(b));
    }
    return out;
}

HolderRate holder_rate_exponent(const BarrierParams& p) {
    if (!(p.gamma > 1.0))
        throw ParameterError(
            "holder_rate_exponent: gamma must exceed 1 (got " + fmt(p.gamma) +
            "); for gamma <= 1 there is no log-power regime - use lipschitz_tau");
    if (!(p.alpha > 0.0) || !(p.epsilon > 0.0) || !(p.alpha + p.epsilon < 1.0))
        throw ParameterError("holder_rate_exponent: need alpha, epsilon > 0 with "
                             "alpha + epsilon < 1, got alpha = " + fmt(p.alpha) +
                             ", epsilon = " + fmt(p.epsilon));
    HolderRate rate;
    rate.supremal = 1.0 / (p.gamma - 1.0);
    rate.exponent = std::log(1.0 / (p.alpha + p.epsilon)) /
                    ((p.gamma - 1.0) * std::log(1.0 / p.alpha));
    return rate;
}

double lipschitz_tau(const BarrierParams& p) {
    if (!(p.alpha > 0.0) || !(p.alpha < 1.0))
        throw ParameterError("lipschitz_tau: alpha must lie in (0,1), got " + fmt(p.alpha));
    if (!(p.epsilon > 0.0) || !(p.epsilon < 1.0))
        throw ParameterError("lipschitz_tau: epsilon must lie in (0,1), got " +
                             fmt(p.epsilon));
    if (!(p.c_demailly >= 0.0) || !std::isfinite(p.c_demailly))
        throw ParameterError("lipschitz_tau: c must be finite and >= 0, got " +
                             fmt(p.c_demailly));
    const double gain = std::log((1.0 + p.epsilon) / (p.alpha + p.epsilon));
    if (!(gain > p.c_demailly))
        throw ParameterError("lipschitz_tau: requires log((1+eps)/(alpha+eps)) > c, "
                             "but log(" + fmt((1.0 + p.epsilon) / (p.alpha + p.epsilon)) +
                             ") = " + fmt(gain) + " <= c = " + fmt(p.c_demailly));
    const double denom = std::log((2.0 + 2.0 * p.epsilon) / p.epsilon) + p.c_demailly;
    return (gain - p.c_demailly) / (std::log(1.0 / p.alpha) * denom);
}

std::string to_string(EtaClass c) {
    switch (c) {
        case EtaClass::divergent: return "divergent";
        case EtaClass::convergent: return "convergent";
        case EtaClass::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

EtaReport eta_divergence_test(const EtaFunction& eta, double r0) {
    if (!(r0 > 0.0) || !std::isfinite(r0))
        throw ParameterError("eta_divergence_test: r0 must be positive, got " + fmt(r0));

    // Integrand of I(a) = integral_a^{r0} dt/(t*log(t/eta(t))) after the
    // substitution u = log t. A gauge with eta(t) >= t makes the logarithm
    // nonpositive and the integral meaningless.
    const auto integrand_u = [&](double u) {
        const double t = std::exp(u);
        const double e = eta(t);
        const double ratio = t / e; // e == 0 underflow gives ratio = inf, value 0
        if (!(ratio > 1.0))
            throw ParameterError("eta_divergence_test: log(t/eta(t)) <= 0 at t = " +
                                 fmt(t) + " (eta = " + fmt(e) + ")");
        const double l = std::log(ratio);
        const double v = 1.0 / l;
        return std::isfinite(v) ? v : 0.0;
    };

    constexpr int kMaxRungs = 40;
    constexpr double kConvergedIncrement = 1e-6;
    constexpr double kSlopeFloor = 1e-3;

    EtaReport rep;
    double total = 0.0;
    double a_prev = r0;
    rep.partials.emplace_back(r0, 0.0);
    bool stabilized = false;

    for (int k = 1; k <= kMaxRungs; ++k) {
        const double a = r0 * std::ldexp(1.0, -k);
        const QuadResult q =
            adaptive_simpson(integrand_u, std::log(a), std::log(a_prev), 1e-6, 1e-12);
        total += q.value;
        rep.partials.emplace_back(a, total);
        rep.rungs = k;
        a_prev = a;
        if (q.value < kConvergedIncrement) {
            stabilized = true;
            break;
        }
    }

    if (stabilized) {
        rep.cls = EtaClass::convergent;
        return rep;
    }

    // Tail behaviour over the last decade of a: regress I(a) against
    // log(log(1/a)) and against log(1/a); a slope bounded away from zero for
    // either regressor certifies divergence at the corresponding speed.
    const double a_min = rep.partials.back().first;
    std::vector<double> xs_ll, xs_l, ys;
    for (const auto& [a, I] : rep.partials) {
        if (a <= 10.0 * a_min) {
            xs_ll.push_back(std::log(std::log(1.0 / a)));
            xs_l.push_back(std::log(1.0 / a));
            ys.push_back(I);
        }
    }
    if (ys.size() >= 2) {
        rep.slope_loglog = fit_line(xs_ll, ys).slope;
        rep.slope_log = fit_line(xs_l, ys).slope;
    }
    if (rep.slope_loglog >= kSlopeFloor || rep.slope_log >= kSlopeFloor)
        rep.cls = EtaClass::divergent;
    else
        rep.cls = EtaClass::inconclusive;
    return rep;
}

} // namespace rholab
