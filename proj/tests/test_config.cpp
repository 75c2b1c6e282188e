#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rholab/config.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace rholab;

namespace {

ExperimentConfig resolve(const std::string& text) {
    ConfigMap map = ConfigMap::parse_text(text);
    return resolve_config(map);
}

std::string resolve_error(const std::string& text) {
    try {
        resolve(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string parse_error(const std::string& text) {
    try {
        (void)ConfigMap::parse_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

const std::string kOracleText =
    "[run]\n"
    "kind = oracle\n"
    "[domain]\n"
    "kind = disc\n"
    "radius = 1\n"
    "[obstacle]\n"
    "center = 0 0\n"
    "radius = 0.25\n"
    "[grid]\n"
    "spacing = 0.00390625\n"
    "[ladder]\n"
    "t_min = 0.0375\n"
    "t_max = 0.375\n";

} // namespace

TEST_CASE("parser handles sections, comments, and whitespace") {
    ConfigMap map = ConfigMap::parse_text(
        "# leading comment\n"
        "\n"
        "[run]\n"
        "  kind   =  oracle  \n"
        "# trailing comment\n"
        "[grid]\n"
        "spacing = 0.5\n");
    CHECK(map.has("run.kind"));
    CHECK(map.has("grid.spacing"));
    CHECK_FALSE(map.has("run.spacing"));
    CHECK(map.line_of("run.kind") == 4);
    CHECK(map.line_of("grid.spacing") == 7);

    auto v = map.take("run.kind");
    REQUIRE(v.has_value());
    CHECK(*v == "oracle");

    const auto leftover = map.unused();
    REQUIRE(leftover.size() == 1);
    CHECK(contains(leftover[0], "grid.spacing"));
    CHECK(contains(leftover[0], "line 7"));
}

TEST_CASE("parser reports malformed input with line numbers") {
    SUBCASE("duplicate key, both lines named") {
        const std::string msg = parse_error("[run]\ntol = 1\ntol = 2\n");
        CHECK(contains(msg, "duplicate key 'run.tol'"));
        CHECK(contains(msg, "(line 3)"));
        CHECK(contains(msg, "(line 2)"));
    }
    SUBCASE("key before any section") {
        CHECK(contains(parse_error("kind = oracle\n"), "before any [section] (line 1)"));
    }
    SUBCASE("line without =") {
        CHECK(contains(parse_error("[run]\nnonsense\n"), "'key = value' (line 2)"));
    }
    SUBCASE("empty value") {
        CHECK(contains(parse_error("[run]\nkind =\n"), "empty value for 'kind' (line 2)"));
    }
    SUBCASE("empty key") {
        CHECK(contains(parse_error("[run]\n= 3\n"), "empty key (line 2)"));
    }
    SUBCASE("unterminated section header") {
        CHECK(contains(parse_error("[run\n"), "malformed section header (line 1)"));
    }
    SUBCASE("blank section name") {
        CHECK(contains(parse_error("[ ]\n"), "empty section name (line 1)"));
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS((void)ConfigMap::parse_file("tmp_config_missing.cfg"),
                        ConfigError);
    }
}

TEST_CASE("ladder construction lands on t_min or appends it") {
    SUBCASE("exact span: two decades at eight per decade") {
        const auto ladder = build_ladder({0.004, 0.4, 8});
        REQUIRE(ladder.size() == 17);
        CHECK(ladder.front() == 0.004); // forced exact landing
        CHECK(ladder.back() == 0.4);
        for (std::size_t i = 1; i < ladder.size(); ++i)
            CHECK(ladder[i - 1] < ladder[i]);
        CHECK(ladder[8] == doctest::Approx(0.04).epsilon(1e-14));
    }
    SUBCASE("non-landing span appends t_min below the last rung") {
        const auto ladder = build_ladder({0.0037, 0.4, 8});
        REQUIRE(ladder.size() == 18);
        CHECK(ladder.front() == 0.0037);
        CHECK(ladder[1] == doctest::Approx(0.004).epsilon(1e-14));
        CHECK(ladder.back() == 0.4);
        for (std::size_t i = 1; i < ladder.size(); ++i)
            CHECK(ladder[i - 1] < ladder[i]);
    }
    SUBCASE("single rung per decade") {
        const auto ladder = build_ladder({0.01, 0.1, 1});
        REQUIRE(ladder.size() == 2);
        CHECK(ladder[0] == 0.01);
        CHECK(ladder[1] == 0.1);
    }
    SUBCASE("invalid specs are rejected") {
        CHECK_THROWS_AS((void)build_ladder({0.0, 0.1, 8}), ParameterError);
        CHECK_THROWS_AS((void)build_ladder({0.2, 0.1, 8}), ParameterError);
        CHECK_THROWS_AS((void)build_ladder({0.01, 0.1, 0}), ParameterError);
    }
}

TEST_CASE("oracle config resolves with defaults") {
    const ExperimentConfig cfg = resolve(kOracleText);
    CHECK(cfg.kind == ExperimentKind::oracle);
    CHECK(cfg.tol == 1e-8);
    CHECK(cfg.max_iter == 200000);
    CHECK(cfg.expect.empty());
    CHECK(cfg.domain.kind == "disc");
    CHECK(cfg.domain.radius == 1.0);
    REQUIRE(cfg.has_obstacle);
    CHECK(cfg.obstacle_center.x[0] == 0.0);
    CHECK(cfg.obstacle_center.x[1] == 0.0);
    CHECK(cfg.obstacle_radius == 0.25);
    CHECK(cfg.grid.spacing == 0.00390625);
    CHECK(cfg.grid.padding == 2);
    CHECK_FALSE(cfg.grid.fixed_box);
    REQUIRE(cfg.has_ladder);
    CHECK(cfg.ladder.t_min == 0.0375);
    CHECK(cfg.ladder.t_max == 0.375);
    CHECK(cfg.ladder.per_decade == 8);
    CHECK_FALSE(cfg.has_barrier);
}

TEST_CASE("graph-domain config resolves barrier flags and defaults") {
    const ExperimentConfig cfg = resolve(
        "[run]\n"
        "kind = key_lemma\n"
        "tol = 5e-9\n"
        "[domain]\n"
        "kind = graph\n"
        "g = closed_form:zero\n"
        "radius = 2\n"
        "data_radius = 2.5\n"
        "[obstacle]\n"
        "center = 0 -1\n"
        "radius = 0.04\n"
        "[grid]\n"
        "spacing = 0.008333333333333333\n"
        "[barrier]\n"
        "alpha = 0.45\n"
        "epsilon = 0.1\n"
        "r0 = 0.92\n"
        "t0 = 0.92\n"
        "[ladder]\n"
        "t_min = 0.0092\n"
        "t_max = 0.92\n"
        "per_decade = 8\n");
    CHECK(cfg.kind == ExperimentKind::key_lemma);
    CHECK(cfg.tol == 5e-9);
    CHECK(cfg.domain.kind == "graph");
    CHECK(cfg.domain.graph.form == GraphForm::zero);
    CHECK(cfg.domain.graph.radius == 2.0);
    CHECK(cfg.domain.graph.data_radius == 2.5);
    CHECK(cfg.domain.graph.holder_exponent == 1.0);
    REQUIRE(cfg.has_barrier);
    CHECK(cfg.barrier.alpha == 0.45);
    CHECK(cfg.barrier.epsilon == 0.1);
    CHECK(cfg.epsilon_set);
    CHECK_FALSE(cfg.gamma_set);
    CHECK_FALSE(cfg.beta_set);
    CHECK(cfg.r0_set);
    CHECK(cfg.t0_set);
    CHECK(cfg.barrier.r0 == 0.92);
    CHECK(cfg.barrier.t0 == 0.92);
    CHECK(cfg.obstacle_center.x[1] == -1.0);
}

TEST_CASE("holder config takes gamma and dilation inputs") {
    const ExperimentConfig cfg = resolve(
        "[run]\n"
        "kind = holder\n"
        "expect = hyperconvex-consistent\n"
        "[domain]\n"
        "kind = graph\n"
        "g = closed_form:neg_sqrt_abs\n"
        "data_radius = 2\n"
        "[obstacle]\n"
        "center = 0 -0.6\n"
        "radius = 0.08\n"
        "[grid]\n"
        "spacing = 0.0078125\n"
        "[barrier]\n"
        "alpha = 0.2\n"
        "epsilon = 0.15\n"
        "gamma = 2\n"
        "beta_dil = 0.5\n"
        "[ladder]\n"
        "t_min = 0.0086\n"
        "t_max = 0.085\n");
    CHECK(cfg.kind == ExperimentKind::holder);
    CHECK(cfg.expect == "hyperconvex-consistent");
    CHECK(cfg.domain.graph.form == GraphForm::neg_sqrt_abs);
    CHECK(cfg.domain.graph.radius == 1.0);
    // The cusp profile defaults to its natural regularity exponent.
    CHECK(cfg.domain.graph.holder_exponent == 0.5);
    CHECK(cfg.gamma_set);
    CHECK(cfg.barrier.gamma == 2.0);
    CHECK(cfg.beta_set);
    CHECK(cfg.barrier.beta_dil == 0.5);
    CHECK_FALSE(cfg.r0_set);
    CHECK_FALSE(cfg.t0_set);
}

TEST_CASE("lipschitz config defaults epsilon to alpha") {
    const ExperimentConfig cfg = resolve(
        "[run]\n"
        "kind = lipschitz\n"
        "[domain]\n"
        "kind = graph\n"
        "g = closed_form:zero\n"
        "[obstacle]\n"
        "center = 0 -0.5\n"
        "radius = 0.1\n"
        "[grid]\n"
        "spacing = 0.01\n"
        "[barrier]\n"
        "alpha = 0.1\n"
        "c_demailly = 0\n"
        "[ladder]\n"
        "t_min = 0.0096\n"
        "t_max = 0.48\n");
    CHECK(cfg.kind == ExperimentKind::lipschitz);
    CHECK(cfg.barrier.alpha == 0.1);
    CHECK(cfg.barrier.epsilon == 0.1);
    CHECK_FALSE(cfg.epsilon_set);
    CHECK(cfg.barrier.c_demailly == 0.0);
    CHECK(cfg.domain.graph.radius == 1.0);
    CHECK(cfg.domain.graph.data_radius == 2.0);
}

TEST_CASE("eta config needs only the gauge and window") {
    const ExperimentConfig cfg = resolve(
        "[run]\n"
        "kind = eta\n"
        "expect = divergent\n"
        "[barrier]\n"
        "eta = power:gamma=2\n"
        "r0 = 0.25\n");
    CHECK(cfg.kind == ExperimentKind::eta);
    CHECK(cfg.expect == "divergent");
    CHECK(cfg.eta_text == "power:gamma=2");
    REQUIRE(cfg.barrier.eta.has_value());
    CHECK((*cfg.barrier.eta)(0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(cfg.r0_set);
    CHECK(cfg.barrier.r0 == 0.25);
    CHECK_FALSE(cfg.has_ladder);
    CHECK_FALSE(cfg.has_obstacle);
}

TEST_CASE("hartogs config resolves the fixed box and exhaustion levels") {
    const ExperimentConfig cfg = resolve(
        "[run]\n"
        "kind = hartogs\n"
        "expect = obstructed\n"
        "exhaustion_levels = 0.1 0.05 0.025\n"
        "[domain]\n"
        "kind = hartogs\n"
        "[obstacle]\n"
        "center = 0 0 0.586 0\n"
        "radius = 0.26\n"
        "[grid]\n"
        "nodes_per_axis = 32\n"
        "box_lo = -1 -1 -1 -1\n"
        "box_hi = 1 1 1 1\n"
        "[ladder]\n"
        "t_min = 5e-5\n"
        "t_max = 5e-3\n");
    CHECK(cfg.kind == ExperimentKind::hartogs);
    CHECK(cfg.expect == "obstructed");
    REQUIRE(cfg.exhaustion_levels.size() == 3);
    CHECK(cfg.exhaustion_levels[0] == 0.1);
    CHECK(cfg.exhaustion_levels[2] == 0.025);
    CHECK(cfg.grid.fixed_box);
    CHECK(cfg.grid.nodes_per_axis == 32);
    CHECK(cfg.grid.box.lo[0] == -1.0);
    CHECK(cfg.grid.box.hi[3] == 1.0);
    CHECK(cfg.obstacle_center.x[2] == 0.586);
    CHECK(cfg.obstacle_radius == 0.26);
    CHECK_FALSE(cfg.has_barrier);
}

TEST_CASE("resolve rejects missing or ill-typed run keys") {
    CHECK(contains(resolve_error("[domain]\nkind = disc\n"),
                   "missing required key 'run.kind'"));
    CHECK(contains(resolve_error("[run]\nkind = banana\n"), "unknown experiment kind"));
    CHECK(contains(resolve_error("[run]\nkind = banana\n"), "(line 2)"));

    std::string bad_tol = kOracleText;
    bad_tol.insert(bad_tol.find("[domain]"), "tol = abc\n");
    CHECK(contains(resolve_error(bad_tol), "expected a number"));

    std::string bad_iter = kOracleText;
    bad_iter.insert(bad_iter.find("[domain]"), "max_iter = 2.5\n");
    CHECK(contains(resolve_error(bad_iter), "expected an integer"));

    std::string zero_tol = kOracleText;
    zero_tol.insert(zero_tol.find("[domain]"), "tol = 0\n");
    CHECK(contains(resolve_error(zero_tol), "run.tol"));
}

TEST_CASE("expect tokens are validated per experiment kind") {
    std::string oracle_divergent = kOracleText;
    oracle_divergent.insert(oracle_divergent.find("[domain]"), "expect = divergent\n");
    const std::string msg = resolve_error(oracle_divergent);
    CHECK(contains(msg, "run.expect"));
    CHECK(contains(msg, "hyperconvex-consistent|obstructed|inconclusive"));

    const std::string eta_msg = resolve_error(
        "[run]\nkind = eta\nexpect = obstructed\n[barrier]\neta = loglog\nr0 = 0.25\n");
    CHECK(contains(eta_msg, "divergent|convergent|inconclusive"));
}

TEST_CASE("oracle shape restrictions are enforced") {
    std::string graph_domain = kOracleText;
    graph_domain.replace(graph_domain.find("kind = disc"), 11, "kind = blob");
    CHECK(contains(resolve_error(graph_domain), "unit disc"));

    std::string wrong_radius = kOracleText;
    wrong_radius.replace(wrong_radius.find("radius = 1\n"), 11, "radius = 2\n");
    CHECK(contains(resolve_error(wrong_radius), "radius 1"));

    std::string off_center = kOracleText;
    off_center.replace(off_center.find("center = 0 0"), 12, "center = 0 1");
    CHECK(contains(resolve_error(off_center), "centered at the origin"));

    std::string huge_obstacle = kOracleText;
    huge_obstacle.replace(huge_obstacle.find("radius = 0.25"), 13, "radius = 1.25");
    CHECK(contains(resolve_error(huge_obstacle), "smaller than the disc"));
}

TEST_CASE("graph-domain validation catches bad profiles and extents") {
    const std::string base =
        "[run]\n"
        "kind = lipschitz\n"
        "[domain]\n"
        "kind = graph\n"
        "g = closed_form:zero\n"
        "[obstacle]\n"
        "center = 0 -0.5\n"
        "radius = 0.1\n"
        "[grid]\n"
        "spacing = 0.01\n"
        "[barrier]\n"
        "alpha = 0.1\n"
        "[ladder]\n"
        "t_min = 0.01\n"
        "t_max = 0.4\n";

    std::string wrong_kind = base;
    wrong_kind.replace(wrong_kind.find("kind = graph"), 12, "kind = disc ");
    CHECK(contains(resolve_error(wrong_kind), "requires a graph domain"));

    std::string bad_profile = base;
    bad_profile.replace(bad_profile.find("g = closed_form:zero"), 20,
                        "g = closed_form:cosh");
    CHECK(contains(resolve_error(bad_profile), "unknown profile"));

    std::string missing_samples = base;
    missing_samples.replace(missing_samples.find("g = closed_form:zero"), 20,
                            "g = samples:/nonexistent");
    CHECK(contains(resolve_error(missing_samples), "cannot open samples"));

    std::string thin_data = base;
    thin_data.insert(thin_data.find("[obstacle]"), "data_radius = 0.5\n");
    CHECK(contains(resolve_error(thin_data), "must exceed domain.radius"));

    std::string bad_exponent = base;
    bad_exponent.insert(bad_exponent.find("[obstacle]"), "holder_exponent = 1.5\n");
    CHECK(contains(resolve_error(bad_exponent), "(0, 1]"));

    std::string wrong_center = base;
    wrong_center.replace(wrong_center.find("center = 0 -0.5"), 15, "center = 0 0 0 ");
    CHECK(contains(resolve_error(wrong_center), "expected 2 coordinates"));
}

TEST_CASE("barrier validation enforces ranges and kind admissibility") {
    const std::string base =
        "[run]\n"
        "kind = lipschitz\n"
        "[domain]\n"
        "kind = graph\n"
        "g = closed_form:zero\n"
        "[obstacle]\n"
        "center = 0 -0.5\n"
        "radius = 0.1\n"
        "[grid]\n"
        "spacing = 0.01\n"
        "[barrier]\n"
        "alpha = 0.1\n"
        "[ladder]\n"
        "t_min = 0.01\n"
        "t_max = 0.4\n";

    std::string no_alpha = base;
    no_alpha.replace(no_alpha.find("alpha = 0.1\n"), 12, "");
    CHECK(contains(resolve_error(no_alpha), "missing required key 'barrier.alpha'"));

    std::string alpha_range = base;
    alpha_range.replace(alpha_range.find("alpha = 0.1"), 11, "alpha = 1.0");
    CHECK(contains(resolve_error(alpha_range), "(0, 1)"));

    // Defaulted epsilon = alpha pushes alpha + epsilon past 1.
    std::string fat_alpha = base;
    fat_alpha.replace(fat_alpha.find("alpha = 0.1"), 11, "alpha = 0.6");
    CHECK(contains(resolve_error(fat_alpha), "alpha + epsilon < 1"));

    // gamma belongs to the dilation-based kinds, not lipschitz.
    std::string stray_gamma = base;
    stray_gamma.insert(stray_gamma.find("[ladder]"), "gamma = 1.5\n");
    const std::string gmsg = resolve_error(stray_gamma);
    CHECK(contains(gmsg, "unknown or inapplicable"));
    CHECK(contains(gmsg, "barrier.gamma"));

    // c_demailly belongs to lipschitz only.
    std::string holder_c = base;
    holder_c.replace(holder_c.find("kind = lipschitz"), 16, "kind = holder   ");
    holder_c.insert(holder_c.find("[ladder]"), "c_demailly = 0.5\n");
    const std::string cmsg = resolve_error(holder_c);
    CHECK(contains(cmsg, "unknown or inapplicable"));
    CHECK(contains(cmsg, "barrier.c_demailly"));

    // A gauge selector is only meaningful for the eta experiment.
    std::string stray_eta = base;
    stray_eta.insert(stray_eta.find("[ladder]"), "eta = loglog\n");
    CHECK(contains(resolve_error(stray_eta), "barrier.eta"));
}

TEST_CASE("eta config rejects invalid gauges and stray sections") {
    const std::string bad_gauge = resolve_error(
        "[run]\nkind = eta\n[barrier]\neta = power:gamma=0.5\nr0 = 0.25\n");
    CHECK(contains(bad_gauge, "barrier.eta"));

    const std::string stray_domain = resolve_error(
        "[run]\nkind = eta\n[barrier]\neta = loglog\nr0 = 0.25\n"
        "[domain]\nkind = disc\n");
    CHECK(contains(stray_domain, "unknown or inapplicable"));
    CHECK(contains(stray_domain, "domain.kind"));

    CHECK(contains(resolve_error("[run]\nkind = eta\n[barrier]\neta = loglog\n"),
                   "missing required key 'barrier.r0'"));
}

TEST_CASE("hartogs grid and exhaustion validation") {
    const std::string base =
        "[run]\n"
        "kind = hartogs\n"
        "[domain]\n"
        "kind = hartogs\n"
        "[obstacle]\n"
        "center = 0 0 0.586 0\n"
        "radius = 0.26\n"
        "[grid]\n"
        "nodes_per_axis = 32\n"
        "box_lo = -1 -1 -1 -1\n"
        "box_hi = 1 1 1 1\n"
        "[ladder]\n"
        "t_min = 5e-5\n"
        "t_max = 5e-3\n";

    std::string coarse = base;
    coarse.replace(coarse.find("nodes_per_axis = 32"), 19, "nodes_per_axis = 4 ");
    CHECK(contains(resolve_error(coarse), ">= 8"));

    std::string short_box = base;
    short_box.replace(short_box.find("box_lo = -1 -1 -1 -1"), 20, "box_lo = -1 -1      ");
    CHECK(contains(resolve_error(short_box), "coordinates per corner"));

    std::string empty_box = base;
    empty_box.replace(empty_box.find("box_hi = 1 1 1 1"), 16, "box_hi = 1 1 -2 1");
    CHECK(contains(resolve_error(empty_box), "empty on axis 2"));

    std::string bad_levels = base;
    bad_levels.insert(bad_levels.find("[domain]"), "exhaustion_levels = 0.05 0.1\n");
    CHECK(contains(resolve_error(bad_levels), "strictly decreasing"));

    // Exhaustion levels are meaningless outside the hartogs experiment.
    std::string oracle_levels = kOracleText;
    oracle_levels.insert(oracle_levels.find("[domain]"),
                         "exhaustion_levels = 0.1 0.05\n");
    CHECK(contains(resolve_error(oracle_levels), "run.exhaustion_levels"));
}

TEST_CASE("unconsumed keys are named with their lines") {
    std::string stray = kOracleText;
    stray.insert(stray.find("[ladder]"), "bogus = 3\n");
    const std::string msg = resolve_error(stray);
    CHECK(contains(msg, "unknown or inapplicable"));
    CHECK(contains(msg, "'grid.bogus'"));
    CHECK(contains(msg, "oracle"));
    CHECK(contains(msg, "(line 11)"));
}

TEST_CASE("command-line overrides replace values and report as such") {
    ConfigMap map = ConfigMap::parse_text(kOracleText);
    map.override_value("run.tol", "1e-6");
    map.override_value("run.max_iter", "500");
    const ExperimentConfig cfg = resolve_config(map);
    CHECK(cfg.tol == 1e-6);
    CHECK(cfg.max_iter == 500);

    ConfigMap bad = ConfigMap::parse_text(kOracleText);
    bad.override_value("run.tol", "abc");
    std::string msg;
    try {
        (void)resolve_config(bad);
    } catch (const ConfigError& e) {
        msg = e.what();
    }
    CHECK(contains(msg, "run.tol"));
    CHECK(contains(msg, "command line"));
}
