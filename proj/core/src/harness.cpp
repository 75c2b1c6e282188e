#include "rholab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rholab/parallel.hpp"

namespace rholab {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

DecayProfile decay_profile(const ScalarField& field, const std::vector<double>& ladder) {
    if (field.grid == nullptr)
        throw ParameterError("decay_profile: field has no grid");
    if (!field.converged)
        throw ParameterError("decay_profile: field did not converge (residual " +
                             fmt(field.final_residual) + ")");
    const Grid& g = *field.grid;
    if (field.values.size() != g.total_nodes())
        throw ParameterError("decay_profile: field size does not match its grid");
    for (const double t : ladder)
        if (!(t > 0.0) || !std::isfinite(t))
            throw ParameterError("decay_profile: ladder entries must be positive, got " +
                                 fmt(t));

    // Depth-sorted prefix maxima of (-u): M(t) is then a binary search away
    // for every ladder entry, and nondecreasing in t by construction.
    std::vector<std::pair<double, double>> depth_neg; // (delta, -u)
    depth_neg.reserve(g.interior_count());
    for (std::size_t i = 0; i < g.total_nodes(); ++i)
        if (g.is_inside(i)) depth_neg.emplace_back(g.delta(i), -field.values[i]);
    std::sort(depth_neg.begin(), depth_neg.end());
    std::vector<double> prefix(depth_neg.size());
    double run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < depth_neg.size(); ++i) {
        run = std::max(run, depth_neg[i].second);
        prefix[i] = run;
    }

    std::vector<double> ts = ladder;
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    DecayProfile p;
    for (const double t : ts) {
        // Last depth <= t.
        const auto it = std::upper_bound(
            depth_neg.begin(), depth_neg.end(), t,
            [](double v, const std::pair<double, double>& e) { return v < e.first; });
        if (it == depth_neg.begin()) {
            p.skipped_ts.push_back(t); // shell empty
            continue;
        }
        const double m = prefix[static_cast<std::size_t>(it - depth_neg.begin()) - 1];
        if (!(m > 0.0)) {
            p.skipped_ts.push_back(t); // no negative mass reaches this shell
            continue;
        }
        p.ts.push_back(t);
        p.M.push_back(m);
    }

    // Exponent fits on the smallest-t half of the surviving ladder.
    const std::size_t n = p.ts.size();
    if (n >= 2) {
        const std::size_t win = (n + 1) / 2;
        std::vector<double> xs_log, xs_pow, ys_log, ys_pow;
        for (std::size_t i = 0; i < std::max<std::size_t>(win, 2); ++i) {
            const double t = p.ts[i];
            const double logM = std::log(p.M[i]);
            xs_pow.push_back(std::log(t));
            ys_pow.push_back(logM);
            if (t < 1.0) {
                xs_log.push_back(std::log(-std::log(t)));
                ys_log.push_back(logM);
            }
        }
        if (xs_pow.size() >= 2) {
            p.fit_power = fit_line(xs_pow, ys_pow);
            p.fitted_exponent_power = p.fit_power.slope;
        }
        if (xs_log.size() >= 2) {
            p.fit_log = fit_line(xs_log, ys_log);
            p.fitted_exponent_log = -p.fit_log.slope;
        }
    }
    return p;
}

KeyLemmaReport check_key_lemma(const DecayProfile& profile,
                               const std::vector<DecayBound>& bounds, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw ParameterError("check_key_lemma: grid spacing must be positive, got " +
                             fmt(h));
    KeyLemmaReport rep;
    rep.grid_h = h;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < profile.ts.size(); ++i) {
        const double r = profile.ts[i];
        const DecayBound* match = nullptr;
        for (const DecayBound& b : bounds) {
            if (std::fabs(b.r - r) <= 1e-12 * std::max(1.0, std::fabs(r))) {
                match = &b;
                break;
            }
        }
        if (match == nullptr)
            throw ParameterError("check_key_lemma: no bound provided for ladder entry r = " +
                                 fmt(r));
        KeyLemmaRow row;
        row.r = r;
        row.M = profile.M[i];
        row.bound = match->value;
        row.slack = 5.0 * h / r;
        row.margin = row.bound * (1.0 + row.slack) - row.M;
        row.ok = row.margin >= -1e-12;
        if (!row.ok) rep.pass = false;
        if (row.margin < worst_margin) {
            worst_margin = row.margin;
            rep.worst = rep.rows.size();
        }
        rep.rows.push_back(row);
    }
    return rep;
}

ComparisonReport check_comparison_inequality(const ScalarField& field,
                                             const BarrierFamily& f, double t) {
    if (field.grid == nullptr)
        throw ParameterError("check_comparison_inequality: field has no grid");
    const Grid& g = *field.grid;
    if (field.values.size() != g.total_nodes())
        throw ParameterError("check_comparison_inequality: field size does not match its grid");
    if (!(t > 0.0) || !std::isfinite(t))
        throw ParameterError("check_comparison_inequality: t must be positive, got " +
                             fmt(t));

    const SublevelSets sets = sublevel_region(g, t, 1.0);
    if (sets.shell.empty())
        throw ParameterError("check_comparison_inequality: no interior nodes with delta <= t at t = " +
                             fmt(t));
    if (sets.band.empty())
        throw ParameterError("check_comparison_inequality: no interior nodes in the band |delta - t| <= h at t = " +
                             fmt(t));
    if (f.kind() != BarrierKind::lipschitz)
        f.dilation(f.params().epsilon * t);

    // psi over the shell (reused for the inf and the pointwise check).
    std::vector<double> psi_shell(sets.shell.size());
    global_pool().parallel_for(sets.shell.size(), [&](std::size_t k) {
        psi_shell[k] = f.psi(g.node(sets.shell[k]), t);
    });
    std::vector<double> psi_band(sets.band.size());
    global_pool().parallel_for(sets.band.size(), [&](std::size_t k) {
        psi_band[k] = f.psi(g.node(sets.band[k]), t);
    });

    double S = -std::numeric_limits<double>::infinity();
    for (const double v : psi_band) S = std::max(S, v);
    if (S >= 1.0) {
        double inf = std::numeric_limits<double>::infinity();
        for (const double v : psi_shell) inf = std::min(inf, v);
        throw HypothesisError(t, inf, S,
                              "comparison inequality: sup of the barrier over the band reaches " +
                                  fmt(S) + " >= 1 at t = " + fmt(t));
    }

    ComparisonReport rep;
    rep.t = t;
    rep.band_sup = S;
    rep.slack = 5.0 * g.spacing() / t;
    rep.checked = sets.shell.size();

    double M = 0.0;
    for (std::size_t k = 0; k < sets.shell.size(); ++k)
        M = std::max(M, -field.values[sets.shell[k]]);
    rep.shell_M = M;

    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sets.shell.size(); ++k) {
        const double lhs = (1.0 - psi_shell[k]) * M;
        const double rhs = (1.0 - S) * (-field.values[sets.shell[k]]);
        const double gap = lhs * (1.0 + rep.slack) - rhs;
        if (gap < worst) {
            worst = gap;
            rep.worst_node = sets.shell[k];
        }
        if (gap < -1e-12) {
            rep.pass = false;
            if (rep.violations.size() < 32) rep.violations.push_back(sets.shell[k]);
        }
    }
    rep.worst_gap = worst;
    return rep;
}

std::string to_string(HyperconvexityClass c) {
    switch (c) {
        case HyperconvexityClass::hyperconvex_consistent: return "hyperconvex-consistent";
        case HyperconvexityClass::obstructed: return "obstructed";
        case HyperconvexityClass::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

HyperconvexityClass classify_hyperconvexity(const DecayProfile& profile) {
    const std::size_t n = profile.ts.size();
    if (n < 2) return HyperconvexityClass::inconclusive;
    const double span = profile.ts.back() / profile.ts.front();
    if (!(span >= 100.0 * (1.0 - 1e-9))) return HyperconvexityClass::inconclusive;
    const double m_small = profile.M.front();
    const double m_large = profile.M.back();
    if (!(m_large > 0.0)) return HyperconvexityClass::inconclusive;
    const double ratio = m_small / m_large;
    if (ratio <= 0.5) return HyperconvexityClass::hyperconvex_consistent;
    if (ratio >= 0.9) return HyperconvexityClass::obstructed;
    return HyperconvexityClass::inconclusive;
}

CurveCheck check_log_power_curve(const DecayProfile& profile, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw ParameterError("check_log_power_curve: tau must be positive, got " + fmt(tau));
    if (profile.ts.empty())
        throw ParameterError("check_log_power_curve: empty profile");
    for (const double t : profile.ts)
        if (!(t < 1.0))
            throw ParameterError("check_log_power_curve: requires t < 1, got " + fmt(t));

    CurveCheck chk;
    chk.tau = tau;
    const double t_cal = profile.ts.back();
    chk.C = profile.M.back() * std::pow(-std::log(t_cal), tau);
    for (std::size_t i = 0; i < profile.ts.size(); ++i) {
        CurveCheckRow row;
        row.t = profile.ts[i];
        row.M = profile.M[i];
        row.curve = chk.C * std::pow(-std::log(row.t), -tau);
        row.ok = row.M <= row.curve * (1.0 + 1e-12);
        if (!row.ok && i + 1 < profile.ts.size()) chk.pass = false;
        chk.rows.push_back(row);
    }
    return chk;
}

} // namespace rholab
