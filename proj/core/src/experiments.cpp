#include "rholab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rholab/barriers.hpp"
#include "rholab/bounds.hpp"
#include "rholab/envelope.hpp"
#include "rholab/harness.hpp"
#include "rholab/tables.hpp"

namespace rholab {

namespace {

// Pinned experiment gates. These are part of each experiment's contract, not
// tunables: the shipped configurations are sized so that honest numerics meet
// them with margin.
constexpr double kOracleSupTol = 1e-3;  // solver-vs-closed-form accuracy bar
constexpr double kPowerSlack = 0.05;    // fitted power may undershoot tau by this
constexpr double kCurveSafety = 0.8;    // curve exponent = safety * beta/(1-beta)
constexpr double kLadderQuadRel = 1e-4; // quadrature tolerance for ladder bounds
constexpr double kLadderQuadAbs = 1e-10;

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// Accumulates the deterministic run report: summary lines plus named
// assertions. Nothing time- or machine-dependent may be recorded here, so
// that reruns (and runs with different worker counts) emit identical bytes.
struct RunLog {
    std::ostringstream sum;
    std::vector<std::pair<std::string, bool>> checks;
    bool converged = true;

    void line(const std::string& s) { sum << s << "\n"; }
    void check(const std::string& name, bool ok) { checks.emplace_back(name, ok); }

    bool all_ok() const {
        for (const auto& [name, ok] : checks)
            if (!ok) return false;
        return true;
    }
};

std::string g17(double v) { return format_g17(v); }

void log_grid(RunLog& log, const Grid& g) {
    std::ostringstream s;
    s << "grid: h=" << g17(g.spacing()) << " nodes=" << g.total_nodes()
      << " interior=" << g.interior_count() << " max_delta=" << g17(g.max_delta());
    log.line(s.str());
}

void log_solve(RunLog& log, const ScalarField& f) {
    std::ostringstream s;
    s << "solve: converged=" << (f.converged ? 1 : 0) << " iterations=" << f.iterations
      << " residual=" << g17(f.final_residual) << " tol=" << g17(f.tol);
    log.line(s.str());
    log.converged = log.converged && f.converged;
}

void log_profile(RunLog& log, const DecayProfile& p) {
    std::ostringstream s;
    s << "profile: rungs=" << p.ts.size() << " skipped=" << p.skipped_ts.size();
    if (!p.ts.empty())
        s << " t_min=" << g17(p.ts.front()) << " t_max=" << g17(p.ts.back())
          << " M(t_min)=" << g17(p.M.front()) << " M(t_max)=" << g17(p.M.back());
    log.line(s.str());
    log.line("fit: exponent_power=" + g17(p.fitted_exponent_power) +
             " exponent_log=" + g17(p.fitted_exponent_log));
}

void log_comparison(RunLog& log, const ComparisonReport& rep) {
    std::ostringstream s;
    s << "comparison: t=" << g17(rep.t) << " band_sup=" << g17(rep.band_sup)
      << " shell_M=" << g17(rep.shell_M) << " checked=" << rep.checked
      << " violations=" << rep.violations.size() << " worst_gap=" << g17(rep.worst_gap);
    log.line(s.str());
}

std::vector<std::pair<double, double>> profile_points(const DecayProfile& p) {
    std::vector<std::pair<double, double>> xy;
    for (std::size_t i = 0; i < p.ts.size(); ++i) xy.emplace_back(p.ts[i], p.M[i]);
    return xy;
}

void write_profile_outputs(const DecayProfile& prof, const std::string& out,
                           std::vector<FitRow> fits) {
    write_plot_data(profile_points(prof), join(out, "plot_decay.dat"));
    fits.insert(fits.begin(),
                {FitRow{"fitted_exponent_power", prof.fitted_exponent_power,
                        prof.fit_power.residual},
                 FitRow{"fitted_exponent_log", prof.fitted_exponent_log,
                        prof.fit_log.residual}});
    write_fit_table(fits, join(out, "fits.csv"));
}

void check_expectation(RunLog& log, const std::string& expect,
                       const std::string& got) {
    log.line("classification: " + got);
    if (!expect.empty()) {
        log.line("expected: " + expect);
        log.check("classification matches the configured expectation", got == expect);
    }
}

DecayProfile make_profile(const ScalarField& u, const ExperimentConfig& cfg) {
    const DecayProfile prof = decay_profile(u, build_ladder(cfg.ladder));
    if (prof.ts.empty())
        throw ConfigError("no ladder rung has grid support; refine grid.spacing or "
                          "raise ladder.t_min above the first node depth");
    return prof;
}

// Fill the geometry-derived barrier defaults the config left open.
BarrierParams fill_barrier(const ExperimentConfig& cfg, const Domain& dom) {
    BarrierParams p = cfg.barrier;
    if (!cfg.gamma_set) p.gamma = dilation_gamma(dom);
    if (!cfg.beta_set) p.beta_dil = dilation_beta(dom);
    if (!cfg.r0_set) p.r0 = cfg.ladder.t_max;
    if (!cfg.t0_set) p.t0 = std::max(p.r0, cfg.ladder.t_max);
    if (p.t0 < cfg.ladder.t_max)
        throw ConfigError("barrier.t0 = " + g17(p.t0) +
                          " does not cover ladder.t_max = " + g17(cfg.ladder.t_max));
    return p;
}

// ---------------------------------------------------------------------------
// oracle: solver accuracy against the closed-form disc solution
// ---------------------------------------------------------------------------

void run_oracle(const ExperimentConfig& cfg, const std::string& out, RunLog& log) {
    const auto dom = build_domain(cfg.domain);
    Grid g(*dom, cfg.grid.spacing, cfg.grid.padding);
    log.line("experiment: oracle");
    log.line("domain: disc radius=" + g17(cfg.domain.radius));
    log_grid(log, g);

    const ObstacleBall ob{cfg.obstacle_center, cfg.obstacle_radius};
    const ScalarField u = solve_envelope_grid(g, ob, cfg.tol, cfg.max_iter);
    log_solve(log, u);
    write_field(u, join(out, "field.dat"));
    if (!u.converged) return;

    const ScalarField exact = solve_harmonic_oracle(g, ob);
    write_field(exact, join(out, "field_oracle.dat"));
    double sup_err = 0.0;
    for (std::size_t i = 0; i < g.total_nodes(); ++i)
        if (g.is_inside(i)) sup_err = std::max(sup_err, std::abs(u.values[i] - exact.values[i]));
    log.line("oracle_sup_error: " + g17(sup_err));

    const DecayProfile prof = make_profile(u, cfg);
    log_profile(log, prof);
    write_decay_table(prof, join(out, "decay.csv"));
    write_plot_data(profile_points(prof), join(out, "plot_decay.dat"));
    write_fit_table({{"oracle_sup_error", sup_err, 0.0},
                     {"fitted_exponent_power", prof.fitted_exponent_power,
                      prof.fit_power.residual},
                     {"fitted_exponent_log", prof.fitted_exponent_log,
                      prof.fit_log.residual}},
                    join(out, "fits.csv"));

    log.check("solved envelope matches the closed form within " + g17(kOracleSupTol),
              sup_err <= kOracleSupTol);
    check_expectation(log, cfg.expect,
                      to_string(classify_hyperconvexity(prof)));
}

// ---------------------------------------------------------------------------
// key_lemma: measured decay against the certified kappa-integral bound
// ---------------------------------------------------------------------------

void run_key_lemma(const ExperimentConfig& cfg, const std::string& out, RunLog& log) {
    const auto dom = build_domain(cfg.domain);
    Grid g(*dom, cfg.grid.spacing, cfg.grid.padding);
    log.line("experiment: key_lemma");
    log.line("domain: " + dom->describe());
    log_grid(log, g);

    const ObstacleBall ob{cfg.obstacle_center, cfg.obstacle_radius};
    const ScalarField u = solve_envelope_grid(g, ob, cfg.tol, cfg.max_iter);
    log_solve(log, u);
    write_field(u, join(out, "field.dat"));
    if (!u.converged) return;

    const BarrierParams p = fill_barrier(cfg, *dom);
    if (p.r0 < cfg.ladder.t_max)
        throw ConfigError("barrier.r0 = " + g17(p.r0) +
                          " is below ladder.t_max = " + g17(cfg.ladder.t_max) +
                          "; the bound window must cover the ladder");
    const BarrierFamily fam = BarrierFamily::holder_family(*dom, p);
    log.line("barrier: holder alpha=" + g17(p.alpha) + " epsilon=" + g17(p.epsilon) +
             " gamma=" + g17(p.gamma) + " beta_dil=" + g17(p.beta_dil) +
             " r0=" + g17(p.r0) + " t0=" + g17(p.t0));

    const DecayProfile prof = make_profile(u, cfg);
    log_profile(log, prof);

    const std::vector<DecayBound> bounds =
        decay_bound_ladder(fam, g, prof.ts, p.r0, kLadderQuadRel, kLadderQuadAbs);
    const KeyLemmaReport rep = check_key_lemma(prof, bounds, g.spacing());
    {
        std::ostringstream s;
        const KeyLemmaRow& w = rep.rows[rep.worst];
        s << "key_lemma: pass=" << (rep.pass ? 1 : 0) << " rungs=" << rep.rows.size()
          << " worst_margin=" << g17(w.margin) << " at_t=" << g17(w.r);
        log.line(s.str());
    }

    write_decay_table(rep, join(out, "decay.csv"));
    write_integrand_trace(bounds.front(), join(out, "trace.csv"));
    std::vector<std::pair<double, double>> bound_points;
    for (const DecayBound& b : bounds) bound_points.emplace_back(b.r, b.value);
    write_plot_data(bound_points, join(out, "plot_bound.dat"));
    write_profile_outputs(prof, out,
                          {{"bound_at_t_min", bounds.front().value,
                            bounds.front().quad_error}});

    const ComparisonReport cmp = check_comparison_inequality(u, fam, prof.ts.back());
    log_comparison(log, cmp);

    log.check("measured decay sits below the certified bound at every rung", rep.pass);
    log.check("pointwise comparison inequality holds at the top rung", cmp.pass);
    check_expectation(log, cfg.expect, to_string(classify_hyperconvexity(prof)));
}

// ---------------------------------------------------------------------------
// holder: log-power decay on a cusped graph domain
// ---------------------------------------------------------------------------

void run_holder(const ExperimentConfig& cfg, const std::string& out, RunLog& log) {
    const double beta = cfg.domain.graph.holder_exponent;
    if (!(beta < 1.0))
        throw ConfigError("the holder experiment needs a boundary exponent below 1 "
                          "(domain.holder_exponent = " + g17(beta) +
                          "); use the lipschitz or key_lemma experiment for "
                          "exponent-1 boundaries");
    const auto dom = build_domain(cfg.domain);
    Grid g(*dom, cfg.grid.spacing, cfg.grid.padding);
    log.line("experiment: holder");
    log.line("domain: " + dom->describe());
    log_grid(log, g);

    const ObstacleBall ob{cfg.obstacle_center, cfg.obstacle_radius};
    const ScalarField u = solve_envelope_grid(g, ob, cfg.tol, cfg.max_iter);
    log_solve(log, u);
    write_field(u, join(out, "field.dat"));
    if (!u.converged) return;

    const BarrierParams p = fill_barrier(cfg, *dom);
    const BarrierFamily fam = BarrierFamily::holder_family(*dom, p);
    log.line("barrier: holder alpha=" + g17(p.alpha) + " epsilon=" + g17(p.epsilon) +
             " gamma=" + g17(p.gamma) + " beta_dil=" + g17(p.beta_dil) +
             " t0=" + g17(p.t0));

    const DecayProfile prof = make_profile(u, cfg);
    log_profile(log, prof);
    write_decay_table(prof, join(out, "decay.csv"));

    const double tau = kCurveSafety * beta / (1.0 - beta);
    const CurveCheck curve = check_log_power_curve(prof, tau);
    log.line("log_power_curve: tau=" + g17(tau) + " C=" + g17(curve.C) +
             " pass=" + std::string(curve.pass ? "1" : "0"));
    std::vector<std::pair<double, double>> curve_points;
    for (const CurveCheckRow& row : curve.rows) curve_points.emplace_back(row.t, row.curve);
    write_plot_data(curve_points, join(out, "plot_curve.dat"));

    std::vector<FitRow> fits = {{"log_power_tau", tau, 0.0},
                                {"curve_calibration", curve.C, 0.0}};
    if (p.gamma > 1.0) {
        const HolderRate rate = holder_rate_exponent(p);
        fits.push_back({"predicted_exponent_log", rate.exponent, 0.0});
        fits.push_back({"supremal_exponent_log", rate.supremal, 0.0});
    }
    write_profile_outputs(prof, out, std::move(fits));

    const ComparisonReport cmp = check_comparison_inequality(u, fam, prof.ts.back());
    log_comparison(log, cmp);

    log.check("decay rate fits a positive log-power exponent",
              std::isfinite(prof.fitted_exponent_log) && prof.fitted_exponent_log > 0.0);
    log.check("measured decay sits below the calibrated log-power curve", curve.pass);
    log.check("pointwise comparison inequality holds at the top rung", cmp.pass);
    check_expectation(log, cfg.expect, to_string(classify_hyperconvexity(prof)));
}

// ---------------------------------------------------------------------------
// lipschitz: power-law decay rate on an exponent-1 graph domain
// ---------------------------------------------------------------------------

void run_lipschitz(const ExperimentConfig& cfg, const std::string& out, RunLog& log) {
    const auto dom = build_domain(cfg.domain);
    Grid g(*dom, cfg.grid.spacing, cfg.grid.padding);
    log.line("experiment: lipschitz");
    log.line("domain: " + dom->describe());
    log_grid(log, g);

    const ObstacleBall ob{cfg.obstacle_center, cfg.obstacle_radius};
    const ScalarField u = solve_envelope_grid(g, ob, cfg.tol, cfg.max_iter);
    log_solve(log, u);
    write_field(u, join(out, "field.dat"));
    if (!u.converged) return;

    const BarrierParams p = fill_barrier(cfg, *dom);
    const BarrierFamily fam = BarrierFamily::lipschitz_family(*dom, p);
    const double tau = lipschitz_tau(p);
    log.line("barrier: lipschitz alpha=" + g17(p.alpha) + " epsilon=" + g17(p.epsilon) +
             " c=" + g17(p.c_demailly) + " t0=" + g17(p.t0));
    log.line("lipschitz_tau: " + g17(tau));

    const DecayProfile prof = make_profile(u, cfg);
    log_profile(log, prof);
    write_decay_table(prof, join(out, "decay.csv"));
    write_profile_outputs(prof, out, {{"lipschitz_tau", tau, 0.0}});

    const ComparisonReport cmp = check_comparison_inequality(u, fam, prof.ts.back());
    log_comparison(log, cmp);

    log.check("fitted power exponent reaches the predicted rate minus " +
                  g17(kPowerSlack),
              std::isfinite(prof.fitted_exponent_power) &&
                  prof.fitted_exponent_power >= tau - kPowerSlack);
    log.check("pointwise comparison inequality holds at the top rung", cmp.pass);
    check_expectation(log, cfg.expect, to_string(classify_hyperconvexity(prof)));
}

// ---------------------------------------------------------------------------
// eta: gauge-integral divergence classification (no grid, no solve)
// ---------------------------------------------------------------------------

void run_eta(const ExperimentConfig& cfg, const std::string& out, RunLog& log) {
    log.line("experiment: eta");
    log.line("gauge: " + cfg.eta_text);
    log.line("r0: " + g17(cfg.barrier.r0));

    const EtaReport rep = eta_divergence_test(*cfg.barrier.eta, cfg.barrier.r0);
    {
        std::ostringstream s;
        s << "divergence_test: rungs=" << rep.rungs
          << " slope_loglog=" << g17(rep.slope_loglog)
          << " slope_log=" << g17(rep.slope_log)
          << " total=" << g17(rep.partials.back().second);
        log.line(s.str());
    }
    write_plot_data(rep.partials, join(out, "plot_partials.dat"));
    write_fit_table({{"slope_loglog", rep.slope_loglog, 0.0},
                     {"slope_log", rep.slope_log, 0.0},
                     {"rungs", static_cast<double>(rep.rungs), 0.0},
                     {"total_integral", rep.partials.back().second, 0.0}},
                    join(out, "fits.csv"));

    check_expectation(log, cfg.expect, to_string(rep.cls));
}

// ---------------------------------------------------------------------------
// hartogs: obstruction witness on the model non-hyperconvex domain
// ---------------------------------------------------------------------------

void run_hartogs(const ExperimentConfig& cfg, const std::string& out, RunLog& log) {
    const auto dom = build_domain(cfg.domain);
    Grid g(*dom, cfg.grid.box, cfg.grid.nodes_per_axis);
    log.line("experiment: hartogs");
    log.line("domain: " + dom->describe());
    log_grid(log, g);

    const ObstacleBall ob{cfg.obstacle_center, cfg.obstacle_radius};
    const ScalarField u = solve_envelope_grid(g, ob, cfg.tol, cfg.max_iter);
    log_solve(log, u);
    write_field(u, join(out, "field.dat"));
    if (!u.converged) return;

    const DecayProfile prof = make_profile(u, cfg);
    log_profile(log, prof);
    write_decay_table(prof, join(out, "decay.csv"));
    write_profile_outputs(prof, out,
                          {{"floor_ratio", prof.M.front() / prof.M.back(), 0.0}});

    if (!cfg.exhaustion_levels.empty()) {
        std::vector<double> cuts = cfg.exhaustion_levels;
        if (cuts.back() > 0.0) cuts.push_back(0.0); // end the chain on the full domain
        const ExhaustionResult ex =
            exhaustion_solve(g, ob, cuts, cfg.tol, cfg.max_iter);
        for (std::size_t i = 0; i < ex.cuts.size(); ++i) {
            std::ostringstream s;
            s << "exhaustion: cut=" << g17(ex.cuts[i])
              << " iterations=" << ex.fields[i].iterations;
            if (i > 0) s << " sup_gap=" << g17(ex.sup_gaps[i - 1]);
            log.line(s.str());
            log.converged = log.converged && ex.fields[i].converged;
        }
        for (double skipped : ex.skipped)
            log.line("exhaustion: cut=" + g17(skipped) + " skipped (obstacle does not fit)");
        log.line("exhaustion_monotone: worst=" + g17(ex.monotone_worst) +
                 " pass=" + std::string(ex.monotone ? "1" : "0"));
        log.check("exhaustion solutions decrease monotonically", ex.monotone);
        if (!log.converged) return;
    }

    check_expectation(log, cfg.expect, to_string(classify_hyperconvexity(prof)));
}

} // namespace

std::unique_ptr<Domain> build_domain(const DomainConfig& dc) {
    if (dc.kind == "disc")
        return std::make_unique<BallDomain>(1, Point::c1(0.0, 0.0), dc.radius);
    if (dc.kind == "graph") return std::make_unique<GraphDomain>(dc.graph);
    if (dc.kind == "hartogs") return std::make_unique<HartogsTriangleDomain>();
    throw ConfigError("unsupported domain kind '" + dc.kind + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
    ExperimentResult res;
    RunLog log;
    try {
        std::filesystem::create_directories(out_dir);
        switch (cfg.kind) {
            case ExperimentKind::oracle: run_oracle(cfg, out_dir, log); break;
            case ExperimentKind::key_lemma: run_key_lemma(cfg, out_dir, log); break;
            case ExperimentKind::holder: run_holder(cfg, out_dir, log); break;
            case ExperimentKind::lipschitz: run_lipschitz(cfg, out_dir, log); break;
            case ExperimentKind::eta: run_eta(cfg, out_dir, log); break;
            case ExperimentKind::hartogs: run_hartogs(cfg, out_dir, log); break;
        }
        if (!log.converged) {
            log.line("result: NO-CONVERGENCE");
            res.pass = false;
            res.exit_code = 3;
        } else {
            for (const auto& [name, ok] : log.checks)
                log.line("check: " + name + " = " + (ok ? "ok" : "FAILED"));
            res.pass = log.all_ok();
            log.line(std::string("result: ") + (res.pass ? "PASS" : "FAIL"));
            res.exit_code = res.pass ? 0 : 1;
        }
    } catch (const HypothesisError& e) {
        log.line(std::string("error: ") + e.what());
        log.line("result: FAIL");
        res.pass = false;
        res.exit_code = 1;
    } catch (const ConfigError& e) {
        log.line(std::string("error: ") + e.what());
        log.line("result: CONFIG-ERROR");
        res.pass = false;
        res.exit_code = 2;
    } catch (const std::exception& e) {
        // ParameterError / DomainError / UnsupportedKindError / std failures:
        // the run request itself was unusable.
        log.line(std::string("error: ") + e.what());
        log.line("result: CONFIG-ERROR");
        res.pass = false;
        res.exit_code = 2;
    }
    res.summary = log.sum.str();
    std::ofstream out(join(out_dir, "summary.txt"));
    if (out) out << res.summary;
    out.flush();
    if (!out && res.exit_code == 0) {
        res.pass = false;
        res.exit_code = 2;
        res.summary += "error: could not write summary.txt\n";
    }
    return res;
}

} // namespace rholab
