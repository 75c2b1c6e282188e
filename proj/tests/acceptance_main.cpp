// Acceptance gate: nine end-to-end criteria, one PASS/FAIL line each.
// Exit code 0 when every criterion passes, 1 otherwise.
//
// Criteria 1, 2, 4, 5, 6 and 9 drive the installed CLI binary on the shipped
// configuration files (paths injected at compile time via RHOLAB_CLI_PATH and
// RHOLAB_CONFIG_DIR); 3, 7 and 8 call the library directly.  Every tolerance
// and wall-clock budget is pinned here as a named constant.

#include "rholab/barriers.hpp"
#include "rholab/bounds.hpp"
#include "rholab/config.hpp"
#include "rholab/envelope.hpp"
#include "rholab/geometry.hpp"
#include "rholab/harness.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace rholab;
namespace fs = std::filesystem;

namespace {

// --- pinned gates -----------------------------------------------------------
constexpr double kOracleSupTol = 1e-3;     // criterion 1: sup |u - closed form|
constexpr double kOracleBudget = 60.0;     // criterion 1: seconds
constexpr double kKeyLemmaBudget = 120.0;  // criterion 2: seconds
constexpr double kClosedFormTol = 1e-10;   // criterion 3: |bound - closed form|
constexpr double kCuspBudget = 300.0;      // criterion 4: seconds
constexpr double kLipschitzBudget = 300.0; // criterion 5: seconds
constexpr double kPowerSlack = 0.05;       // criterion 5: fitted >= tau - slack
constexpr double kHartogsBudget = 900.0;   // criterion 6: seconds
constexpr double kFloorFraction = 0.9;     // criterion 6: M(t_min) >= 0.9 M(t_max)
constexpr double kEtaBudget = 1.0;         // criterion 7: seconds per gauge
constexpr double kDefectTol = 1e-6;        // criterion 8: sub-mean-value defect
constexpr double kTwoDecades = 100.0 * (1.0 - 1e-9); // span check, criteria 2/6

// --- small utilities ---------------------------------------------------------

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool has(const std::string& text, const std::string& token) {
    return text.find(token) != std::string::npos;
}

/// Finds `token` in `text` and parses the number immediately after it.
double value_after(const std::string& text, const std::string& token) {
    const auto pos = text.find(token);
    if (pos == std::string::npos) return std::numeric_limits<double>::quiet_NaN();
    return std::strtod(text.c_str() + pos + token.size(), nullptr);
}

/// True when the line starting with `prefix` also contains `token`.
bool line_has(const std::string& text, const std::string& prefix,
              const std::string& token) {
    const auto pos = text.find(prefix);
    if (pos == std::string::npos) return false;
    const auto end = text.find('\n', pos);
    const std::string line = text.substr(pos, end == std::string::npos
                                                  ? std::string::npos
                                                  : end - pos);
    return has(line, token);
}

struct CliRun {
    int exit_code = -1;
    double seconds = 0.0;
    std::string summary; // contents of <out>/summary.txt (empty if missing)
    fs::path out_dir;
};

CliRun run_cli(const std::string& config_name, const fs::path& out_dir,
               const std::string& extra_flags) {
    CliRun r;
    r.out_dir = out_dir;
    const fs::path cfg = fs::path(RHOLAB_CONFIG_DIR) / config_name;
    std::string cmd = std::string(RHOLAB_CLI_PATH) + " --config " + cfg.string() +
                      " --out " + out_dir.string();
    if (!extra_flags.empty()) cmd += " " + extra_flags;
    cmd += " > " + (out_dir.string() + ".stdout.txt") + " 2>&1";

    const double t0 = now_seconds();
    const int raw = std::system(cmd.c_str());
    r.seconds = now_seconds() - t0;
    r.exit_code = (raw != -1 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
    r.summary = slurp(out_dir / "summary.txt");
    return r;
}

/// Byte compare of two directories: same file names, same bytes.
bool dirs_identical(const fs::path& a, const fs::path& b, std::string& why) {
    std::map<std::string, fs::path> fa, fb;
    for (const auto& e : fs::directory_iterator(a))
        if (e.is_regular_file()) fa[e.path().filename().string()] = e.path();
    for (const auto& e : fs::directory_iterator(b))
        if (e.is_regular_file()) fb[e.path().filename().string()] = e.path();
    if (fa.empty()) { why = "no files in " + a.string(); return false; }
    if (fa.size() != fb.size()) { why = "file counts differ"; return false; }
    for (const auto& [name, pa] : fa) {
        const auto it = fb.find(name);
        if (it == fb.end()) { why = name + " missing"; return false; }
        if (slurp(pa) != slurp(it->second)) { why = name + " differs"; return false; }
    }
    return true;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// --- criterion bodies --------------------------------------------------------

CliRun g_oracle_w1, g_key_lemma_w1; // reused by criterion 9

bool c1_oracle(const fs::path& root, std::string& detail) {
    g_oracle_w1 = run_cli("oracle_disc.cfg", root / "oracle_w1", "--workers 1");
    const CliRun& r = g_oracle_w1;
    const double sup = value_after(r.summary, "oracle_sup_error:");
    detail = "sup_err=" + fmt("%.3e", sup) + " (<=" + fmt("%g", kOracleSupTol) +
             "), wall=" + fmt("%.1f", r.seconds) + "s (<=" +
             fmt("%g", kOracleBudget) + "s), exit=" + std::to_string(r.exit_code);
    return r.exit_code == 0 && has(r.summary, "result: PASS") &&
           std::isfinite(sup) && sup <= kOracleSupTol && r.seconds <= kOracleBudget;
}

bool c2_key_lemma(const fs::path& root, std::string& detail) {
    g_key_lemma_w1 = run_cli("key_lemma_flat.cfg", root / "key_lemma_w1",
                             "--workers 1");
    const CliRun& r = g_key_lemma_w1;
    const double t_min = value_after(r.summary, "t_min=");
    const double t_max = value_after(r.summary, "t_max=");
    const bool two_decades = t_max / t_min >= kTwoDecades;
    detail = "ladder spans " + fmt("%.3g", t_max / t_min) + "x, wall=" +
             fmt("%.1f", r.seconds) + "s (<=" + fmt("%g", kKeyLemmaBudget) +
             "s), exit=" + std::to_string(r.exit_code);
    return r.exit_code == 0 && has(r.summary, "result: PASS") &&
           line_has(r.summary, "key_lemma:", "pass=1") && two_decades &&
           r.seconds <= kKeyLemmaBudget;
}

bool c3_closed_form(const fs::path&, std::string& detail) {
    const double kappa0 = 0.5, alpha = 0.5, r0 = 0.1;
    const auto kappa = [&](double) { return kappa0; };
    double worst = 0.0;
    for (const double r : {0.0125, 0.025, 0.05}) {
        const DecayBound b = decay_bound_from_kappa(kappa, alpha, r, r0);
        const double closed =
            std::pow(r / (alpha * r0), kappa0 / std::log(1.0 / alpha));
        worst = std::max(worst, std::fabs(b.value - closed));
    }
    detail = "worst |bound - closed form| = " + fmt("%.3e", worst) + " (<=" +
             fmt("%g", kClosedFormTol) + ")";
    return worst <= kClosedFormTol;
}

bool c4_cusp(const fs::path& root, std::string& detail) {
    const CliRun r = run_cli("holder_cusp.cfg", root / "holder_cusp", "");
    const double fitted = value_after(r.summary, "exponent_log=");
    detail = "fitted_log=" + fmt("%.3f", fitted) + " (>0), wall=" +
             fmt("%.1f", r.seconds) + "s (<=" + fmt("%g", kCuspBudget) +
             "s), exit=" + std::to_string(r.exit_code);
    return r.exit_code == 0 && has(r.summary, "result: PASS") &&
           std::isfinite(fitted) && fitted > 0.0 &&
           line_has(r.summary, "log_power_curve:", "pass=1") &&
           r.seconds <= kCuspBudget;
}

bool c5_lipschitz(const fs::path& root, std::string& detail) {
    const CliRun r = run_cli("lipschitz_flat.cfg", root / "lipschitz_flat", "");
    const double tau = value_after(r.summary, "lipschitz_tau:");
    const double fitted = value_after(r.summary, "exponent_power=");
    detail = "fitted_power=" + fmt("%.3f", fitted) + " vs tau-slack=" +
             fmt("%.3f", tau - kPowerSlack) + ", wall=" + fmt("%.1f", r.seconds) +
             "s (<=" + fmt("%g", kLipschitzBudget) + "s), exit=" +
             std::to_string(r.exit_code);
    return r.exit_code == 0 && has(r.summary, "result: PASS") &&
           std::isfinite(fitted) && std::isfinite(tau) &&
           fitted >= tau - kPowerSlack && r.seconds <= kLipschitzBudget;
}

bool c6_hartogs(const fs::path& root, std::string& detail) {
    const CliRun r = run_cli("hartogs.cfg", root / "hartogs", "");
    const double t_min = value_after(r.summary, "t_min=");
    const double t_max = value_after(r.summary, "t_max=");
    const double m_lo = value_after(r.summary, "M(t_min)=");
    const double m_hi = value_after(r.summary, "M(t_max)=");
    const bool floor_holds = std::isfinite(m_lo) && std::isfinite(m_hi) &&
                             m_lo >= kFloorFraction * m_hi &&
                             t_max / t_min >= kTwoDecades;
    detail = "M(t_min)/M(t_max)=" + fmt("%.4f", m_lo / m_hi) + " (>=" +
             fmt("%g", kFloorFraction) + " over " + fmt("%.3g", t_max / t_min) +
             "x), wall=" + fmt("%.1f", r.seconds) + "s (<=" +
             fmt("%g", kHartogsBudget) + "s), exit=" + std::to_string(r.exit_code);
    return r.exit_code == 0 && has(r.summary, "classification: obstructed") &&
           has(r.summary, "result: PASS") && floor_holds &&
           r.seconds <= kHartogsBudget;
}

bool c7_eta(const fs::path&, std::string& detail) {
    struct Case {
        EtaFunction eta;
        EtaClass want;
        const char* name;
    };
    const std::vector<Case> cases = {
        {EtaFunction::power(2.0), EtaClass::divergent, "t^2"},
        {EtaFunction::loglog(), EtaClass::divergent, "t(-log t)^(log t)"},
        {EtaFunction::expinv(), EtaClass::convergent, "exp(-1/t)"},
    };
    bool ok = true;
    std::string parts;
    for (const auto& c : cases) {
        const double t0 = now_seconds();
        const EtaReport rep = eta_divergence_test(c.eta, 0.25);
        const double dt = now_seconds() - t0;
        const bool good = rep.cls == c.want && dt <= kEtaBudget;
        ok = ok && good;
        parts += std::string(parts.empty() ? "" : ", ") + c.name + "->" +
                 to_string(rep.cls) + " in " + fmt("%.3f", dt) + "s";
    }
    detail = parts;
    return ok;
}

bool c8_invariants(const fs::path&, std::string& detail) {
    std::vector<std::string> violations;
    const auto expect = [&](bool cond, const std::string& what) {
        if (!cond) violations.push_back(what);
    };

    // Envelope on the unit disc at h = 1/32: range, pinning, smoothness,
    // decay monotonicity, exhaustion monotonicity.
    const BallDomain ball(1, Point::c1(0.0, 0.0), 1.0);
    const double h = 1.0 / 32.0;
    const Grid g(ball, h);
    const ObstacleBall ob{Point::c1(0.0, 0.0), 0.25};
    const ScalarField sol = solve_envelope_grid(g, ob, 1e-8, 200000);
    expect(sol.converged, "disc solve did not converge");

    std::size_t pinned = 0;
    bool range_ok = true, pin_ok = true;
    for (std::uint32_t i = 0; i < sol.values.size(); ++i) {
        if (!g.is_inside(i)) continue;
        const double v = sol.values[i];
        range_ok = range_ok && v >= -1.0 && v <= 0.0;
        if (sol.obstacle[i]) {
            ++pinned;
            pin_ok = pin_ok && v == -1.0;
        }
    }
    expect(range_ok, "envelope value outside [-1, 0]");
    expect(pin_ok && pinned > 0, "obstacle nodes not pinned to -1");

    const LeviReport all = levi_test(sol, interior_nodes(g), 10.0 * h);
    expect(all.worst_mean_defect <= kDefectTol,
           "sub-mean-value defect " + fmt("%.2e", all.worst_mean_defect) +
               " over all interior nodes");
    const LeviReport free_rep = levi_test(sol, free_interior_nodes(sol), 10.0 * h);
    expect(free_rep.checked > 100 && free_rep.pass,
           "converged field fails the smoothness check on free nodes");

    LadderSpec lspec;
    lspec.t_min = 0.05, lspec.t_max = 0.5, lspec.per_decade = 8;
    const DecayProfile prof = decay_profile(sol, build_ladder(lspec));
    bool monotone = prof.ts.size() >= 2;
    for (std::size_t i = 0; i + 1 < prof.M.size(); ++i)
        monotone = monotone && prof.M[i] <= prof.M[i + 1];
    expect(monotone, "M(t) not nondecreasing in t");

    const ExhaustionResult ex =
        exhaustion_solve(g, ob, {0.4, 0.2, 0.1, 0.0}, 1e-8, 200000);
    expect(ex.monotone, "exhaustion solutions not monotone");
    for (const auto& f : ex.fields)
        expect(f.converged, "exhaustion cut did not converge");

    // Barrier families on graph domains at h = 1/32: every psi_t field must
    // pass the smoothness check at tolerance 10h.
    GraphSpec flat;
    flat.form = GraphForm::zero;
    GraphSpec cusp;
    cusp.form = GraphForm::neg_sqrt_abs;
    cusp.holder_exponent = 0.5;
    const GraphDomain dflat(flat), dcusp(cusp);
    const Grid gf(dflat, h), gc(dcusp, h);

    BarrierParams ph; // flat profile, gamma 1
    ph.alpha = 0.1, ph.epsilon = 0.1, ph.gamma = 1.0, ph.beta_dil = 1.0;
    ph.t0 = ph.r0 = 0.5;
    BarrierParams pc = ph; // cusp profile, dilation law from the geometry
    pc.gamma = dilation_gamma(dcusp);
    pc.beta_dil = dilation_beta(dcusp);
    pc.t0 = pc.r0 = 0.2;
    BarrierParams pl = ph; // flat Lipschitz model
    pl.c_demailly = 0.0;
    BarrierParams pe = ph; // flat slow-gauge model
    pe.eta = EtaFunction::power(2.0);
    pe.t0 = 0.2, pe.r0 = 0.25;

    int family_fields = 0;
    const auto check_family = [&](const BarrierFamily& fam, const Grid& grid,
                                  const std::vector<double>& ts, const char* name) {
        for (const double t : ts) {
            const LeviReport rep = levi_test(grid, barrier_field(fam, grid, t),
                                             interior_nodes(grid), 10.0 * h);
            ++family_fields;
            expect(rep.checked > 100 && rep.pass,
                   std::string(name) + " field at t=" + fmt("%g", t) +
                       " fails the smoothness check");
        }
    };
    check_family(BarrierFamily::holder_family(dflat, ph), gf, {0.05, 0.1, 0.2},
                 "holder flat");
    check_family(BarrierFamily::holder_family(dcusp, pc), gc, {0.05, 0.1},
                 "holder cusp");
    check_family(BarrierFamily::lipschitz_family(dflat, pl), gf, {0.05, 0.1, 0.2},
                 "lipschitz");
    check_family(BarrierFamily::eta_family(dflat, pe), gf, {0.05, 0.1},
                 "slow gauge");

    // Dilation law certificates for both graph geometries.
    const std::vector<double> ts = {0.2, 0.1, 0.05, 0.025};
    expect(verify_dilation_bounds(dflat, ts).pass, "flat dilation certificate");
    expect(verify_dilation_bounds(dcusp, ts).pass, "cusp dilation certificate");

    if (violations.empty()) {
        detail = "0 violations (range+pinning, defect<=" + fmt("%g", kDefectTol) +
                 ", " + std::to_string(family_fields) +
                 " family fields + converged field at 10h, decay/exhaustion "
                 "monotone, dilation certified)";
        return true;
    }
    detail = std::to_string(violations.size()) + " violation(s): " + violations[0];
    for (std::size_t i = 1; i < violations.size() && i < 4; ++i)
        detail += "; " + violations[i];
    return false;
}

bool c9_determinism(const fs::path& root, std::string& detail) {
    const CliRun ow8 = run_cli("oracle_disc.cfg", root / "oracle_w8", "--workers 8");
    const CliRun kw8 =
        run_cli("key_lemma_flat.cfg", root / "key_lemma_w8", "--workers 8");
    std::string why_o, why_k;
    const bool oracle_same =
        dirs_identical(g_oracle_w1.out_dir, ow8.out_dir, why_o);
    const bool key_same =
        dirs_identical(g_key_lemma_w1.out_dir, kw8.out_dir, why_k);
    detail = std::string("oracle ") + (oracle_same ? "identical" : why_o.c_str()) +
             ", decay-bound run " + (key_same ? "identical" : why_k.c_str()) +
             " (workers 1 vs 8)";
    return oracle_same && key_same;
}

} // namespace

int main() {
    const fs::path root = fs::current_path() / "acceptance_out";
    std::error_code ec;
    fs::remove_all(root, ec);
    fs::create_directories(root);

    struct Criterion {
        const char* name;
        std::function<bool(const fs::path&, std::string&)> body;
    };
    const std::vector<Criterion> criteria = {
        {"disc envelope matches the closed form", c1_oracle},
        {"measured decay sits below the certified bound", c2_key_lemma},
        {"constant-rate bound matches its closed form", c3_closed_form},
        {"cusp decay follows a positive log-power law", c4_cusp},
        {"flat-domain decay reaches the predicted power rate", c5_lipschitz},
        {"singular lattice is classified obstructed", c6_hartogs},
        {"gauge integrals classified divergent/convergent", c7_eta},
        {"invariant suite reports zero violations", c8_invariants},
        {"outputs byte-identical across worker counts", c9_determinism},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].body(root, detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failed;
        std::printf("[%zu/9] %s: %s (%s)\n", i + 1, criteria[i].name,
                    ok ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
    }

    if (failed == 0) {
        std::printf("acceptance: PASS (9/9)\n");
        return 0;
    }
    std::printf("acceptance: FAIL (%d criterion/criteria failed)\n", failed);
    return 1;
}
