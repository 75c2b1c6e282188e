#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rholab/common.hpp"
#include "rholab/envelope.hpp"
#include "rholab/geometry.hpp"
#include "rholab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>
#include <vector>

using namespace rholab;

namespace {

Grid disc_grid(double radius, double h) {
    BallDomain b(1, Point::c1(0.0, 0.0), radius);
    return Grid(b, h);
}

ObstacleBall centered(double s0) { return ObstacleBall{Point::c1(0.0, 0.0), s0}; }

// sup over interior nodes of |u - v|
double sup_diff(const Grid& g, const std::vector<double>& u,
                const std::vector<double>& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.total_nodes(); ++i)
        if (g.is_inside(i)) m = std::max(m, std::fabs(u[i] - v[i]));
    return m;
}

} // namespace

// ---------------------------------------------------------------------------
// stencils
// ---------------------------------------------------------------------------

TEST_CASE("planar circle stencil collapses to the 9-point pattern") {
    Grid g = disc_grid(1.0, 1.0 / 16.0);
    auto st = make_circle_stencil(g);
    CHECK(st.ndir == 1);
    REQUIRE(st.per_direction.size() == 1);
    CHECK(st.per_sample.size() == 8);
    for (const auto& p : st.per_sample) {
        double sum = 0.0;
        for (double w : p.w) sum += w;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (const auto& o : st.sample_offsets)
        CHECK(std::sqrt(o[0] * o[0] + o[1] * o[1] + o[2] * o[2] + o[3] * o[3]) ==
              doctest::Approx(1.0).epsilon(1e-14));

    // hand-derived merged weights: with s = sqrt(1/2),
    //   center       4 (1-s)^2 / 8
    //   axis  (4x)   (1 + 2 s (1-s)) / 8
    //   corner (4x)  s^2 / 8 = 1/16
    const double s = std::sqrt(0.5);
    const double wc = 4.0 * (1.0 - s) * (1.0 - s) / 8.0;
    const double wa = (1.0 + 2.0 * s * (1.0 - s)) / 8.0;
    const double wd = 1.0 / 16.0;
    const std::ptrdiff_t sx = g.stride(0), sy = g.stride(1);
    std::map<std::ptrdiff_t, double> expect{
        {0, wc},           {sx, wa},       {-sx, wa},      {sy, wa},
        {-sy, wa},         {sx + sy, wd},  {sx - sy, wd},  {-sx + sy, wd},
        {-sx - sy, wd},
    };
    const auto& pat = st.per_direction[0];
    REQUIRE(pat.off.size() == expect.size());
    double total = 0.0;
    for (std::size_t k = 0; k < pat.off.size(); ++k) {
        auto it = expect.find(pat.off[k]);
        REQUIRE(it != expect.end());
        CHECK(pat.w[k] == doctest::Approx(it->second).epsilon(1e-13));
        total += pat.w[k];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("four-direction stencil in two complex variables") {
    BallDomain b(2, Point::c2(0, 0, 0, 0), 1.0);
    Grid g(b, 1.0 / 8.0);
    auto st = make_circle_stencil(g);
    CHECK(st.ndir == 4);
    CHECK(st.per_sample.size() == 32);
    for (const auto& p : st.per_direction) {
        double sum = 0.0;
        for (double w : p.w) sum += w;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    }
    for (const auto& o : st.sample_offsets)
        CHECK(std::sqrt(o[0] * o[0] + o[1] * o[1] + o[2] * o[2] + o[3] * o[3]) ==
              doctest::Approx(1.0).epsilon(1e-13));

    // the first direction acts in the (axis 0, axis 1) plane and must carry
    // exactly the planar 9-point weights
    const double s = std::sqrt(0.5);
    const double wc = 4.0 * (1.0 - s) * (1.0 - s) / 8.0;
    const double wa = (1.0 + 2.0 * s * (1.0 - s)) / 8.0;
    const double wd = 1.0 / 16.0;
    const std::ptrdiff_t sx = g.stride(0), sy = g.stride(1);
    std::map<std::ptrdiff_t, double> expect{
        {0, wc},           {sx, wa},       {-sx, wa},      {sy, wa},
        {-sy, wa},         {sx + sy, wd},  {sx - sy, wd},  {-sx + sy, wd},
        {-sx - sy, wd},
    };
    const auto& pat = st.per_direction[0];
    REQUIRE(pat.off.size() == expect.size());
    for (std::size_t k = 0; k < pat.off.size(); ++k) {
        auto it = expect.find(pat.off[k]);
        REQUIRE(it != expect.end());
        CHECK(pat.w[k] == doctest::Approx(it->second).epsilon(1e-13));
    }
}

// ---------------------------------------------------------------------------
// harmonic oracle
// ---------------------------------------------------------------------------

TEST_CASE("radial harmonic interpolant on the unit disc") {
    Grid g = disc_grid(1.0, 1.0 / 64.0);
    auto f = solve_harmonic_oracle(g, centered(0.25));
    CHECK(f.iterations == 0);
    CHECK(f.converged);
    REQUIRE(f.values.size() == g.total_nodes());

    // log r / log(1/s0): value -1/2 at r = 1/2, -1 on the obstacle rim
    const std::size_t mid = g.index({g.count(0) / 2 + 32, g.count(1) / 2, 0, 0});
    CHECK(g.node(mid).x[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(f.values[mid] == doctest::Approx(-0.5).epsilon(1e-13));

    const std::size_t rim = g.index({g.count(0) / 2 + 16, g.count(1) / 2, 0, 0});
    CHECK(g.node(rim).x[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(f.values[rim] == doctest::Approx(-1.0));
    CHECK(f.obstacle[rim] == 1);

    // ghost nodes (including the circle itself) hold zero
    const std::size_t on_circle = g.index({g.count(0) / 2 + 64, g.count(1) / 2, 0, 0});
    CHECK(g.node(on_circle).x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.values[on_circle] == 0.0);

    // every interior value matches the closed form
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        if (!g.is_inside(i)) continue;
        const double r = g.node(i).norm();
        const double want = r <= 0.25 ? -1.0 : std::log(r) / std::log(4.0);
        CHECK(f.values[i] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("harmonic oracle rejects unsupported configurations") {
    AnnulusDomain a(0.25, 1.0);
    Grid ga(a, 1.0 / 32.0);
    CHECK_THROWS_AS(solve_harmonic_oracle(ga, centered(0.1)), ParameterError);

    Grid g = disc_grid(1.0, 1.0 / 32.0);
    CHECK_THROWS_AS(solve_harmonic_oracle(g, ObstacleBall{Point::c1(0.2, 0.0), 0.25}),
                    ParameterError);
    CHECK_THROWS_AS(solve_harmonic_oracle(g, centered(1.5)), ParameterError);
}

// ---------------------------------------------------------------------------
// envelope solves
// ---------------------------------------------------------------------------

TEST_CASE("disc envelope converges to the harmonic interpolant") {
    Grid g = disc_grid(1.0, 1.0 / 64.0);
    auto oracle = solve_harmonic_oracle(g, centered(0.25));
    auto u = solve_envelope_grid(g, centered(0.25), 1e-7, 200000);
    CHECK(u.converged);
    CHECK(u.iterations > 100);
    CHECK(u.final_residual < 1e-7);
    CHECK(sup_diff(g, u.values, oracle.values) < 4e-3);

    // range and pinning invariants
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        if (!g.is_inside(i)) {
            CHECK(u.values[i] == 0.0);
            continue;
        }
        CHECK(u.values[i] <= 0.0);
        CHECK(u.values[i] >= -1.0);
        if (u.obstacle[i]) CHECK(u.values[i] == -1.0);
    }
}

TEST_CASE("converged field is a fixed point of the plain average away from clips") {
    Grid g = disc_grid(1.0, 1.0 / 64.0);
    const double tol = 1e-7;
    auto u = solve_envelope_grid(g, centered(0.25), tol, 200000);
    auto st = make_circle_stencil(g);
    const auto& pat = st.per_direction[0];

    int checked = 0;
    for (std::size_t i = 0; i < g.total_nodes() && checked < 500; ++i) {
        if (!g.is_inside(i) || u.obstacle[i]) continue;
        const double r = g.node(i).norm();
        // keep well away from both the obstacle and the outer circle
        if (r < 0.35 || r > 0.85) continue;
        double avg = 0.0;
        for (std::size_t k = 0; k < pat.off.size(); ++k)
            avg += pat.w[k] * u.values[static_cast<std::size_t>(
                                  static_cast<std::ptrdiff_t>(i) + pat.off[k])];
        CHECK(u.values[i] <= avg + 10.0 * tol);
        CHECK(u.values[i] >= avg - 10.0 * tol); // harmonic here, so equality
        ++checked;
    }
    CHECK(checked == 500);
}

TEST_CASE("obstacle covering every node forces the constant -1") {
    Grid g = disc_grid(1.0, 1.0 / 8.0);
    auto u = solve_envelope_grid(g, centered(0.999), 1e-8, 1000);
    CHECK(u.converged);
    CHECK(u.iterations == 0); // no active nodes remain
    for (std::size_t i = 0; i < g.total_nodes(); ++i)
        if (g.is_inside(i)) CHECK(u.values[i] == -1.0);
}

TEST_CASE("envelope decreases when the domain grows") {
    const double h = 1.0 / 40.0;
    Grid g1 = disc_grid(1.0, h);
    Grid g2 = disc_grid(1.2, h);
    auto u1 = solve_envelope_grid(g1, centered(0.25), 1e-7, 100000);
    auto u2 = solve_envelope_grid(g2, centered(0.25), 1e-7, 100000);

    const long shift = std::lround((g1.origin(0) - g2.origin(0)) / h);
    CHECK(shift == 8);
    for (std::size_t i = 0; i < g1.total_nodes(); ++i) {
        if (!g1.is_inside(i)) continue;
        auto c = g1.coords(i);
        const std::size_t j = g2.index(
            {c[0] + static_cast<int>(shift), c[1] + static_cast<int>(shift), 0, 0});
        CHECK(g2.node(j).x[0] == doctest::Approx(g1.node(i).x[0]).epsilon(1e-12));
        CHECK(u2.values[j] <= u1.values[i] + 1e-9);
    }
}

TEST_CASE("sublevel solve matches the shrunk-disc interpolant") {
    // cutting the unit disc at depth 1/2 leaves the disc of radius 1/2;
    // with the obstacle at 1/4 the limit is log(2r)/log 2 on the cut region
    Grid g = disc_grid(1.0, 1.0 / 64.0);
    auto u = solve_envelope_grid(g, centered(0.25), 1e-7, 200000, 0.5);
    CHECK(u.converged);
    CHECK(u.level == doctest::Approx(0.5));

    double worst = 0.0;
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        if (!g.is_inside(i)) continue;
        if (g.delta(i) > 0.5) {
            const double r = g.node(i).norm();
            const double want =
                r <= 0.25 ? -1.0 : std::log(2.0 * r) / std::log(2.0);
            worst = std::max(worst, std::fabs(u.values[i] - want));
        } else {
            CHECK(u.values[i] == 0.0); // outside the cut: ghost
        }
    }
    CHECK(worst < 8e-3);
}

TEST_CASE("exhaustion through growing sublevel regions is monotone") {
    Grid g = disc_grid(1.0, 1.0 / 64.0);
    std::vector<double> cuts{0.125, 0.0625, 0.03125};
    auto r = exhaustion_solve(g, centered(0.25), cuts, 1e-7, 200000);
    CHECK(r.skipped.empty());
    REQUIRE(r.cuts.size() == 3);
    CHECK(r.cuts[0] == doctest::Approx(0.125));
    CHECK(r.cuts[2] == doctest::Approx(0.03125));
    REQUIRE(r.fields.size() == 3);
    REQUIRE(r.sup_gaps.size() == 2);
    CHECK(r.monotone);
    CHECK(r.monotone_worst <= 1e-7 + 1e-12);
    CHECK(r.sup_gaps[0] > 0.0);
    CHECK(r.sup_gaps[1] < r.sup_gaps[0]); // gaps shrink as the regions settle

    // each stage equals the corresponding direct sublevel solve
    auto direct = solve_envelope_grid(g, centered(0.25), 1e-7, 200000, 0.03125);
    CHECK(r.fields[2].values == direct.values);
}

TEST_CASE("exhaustion skips cuts that leave no room for the obstacle") {
    Grid g = disc_grid(1.0, 1.0 / 64.0);
    auto r = exhaustion_solve(g, centered(0.25), {0.8, 0.125}, 1e-7, 200000);
    REQUIRE(r.skipped.size() == 1);
    CHECK(r.skipped[0] == doctest::Approx(0.8));
    REQUIRE(r.cuts.size() == 1);

    CHECK_THROWS_AS(exhaustion_solve(g, centered(0.25), {0.9, 0.8}, 1e-7, 1000),
                    ParameterError);
    CHECK_THROWS_AS(exhaustion_solve(g, centered(0.25), {}, 1e-7, 1000),
                    ParameterError);
}

TEST_CASE("a single zero cut reproduces the full solve exactly") {
    Grid g = disc_grid(1.0, 1.0 / 32.0);
    auto full = solve_envelope_grid(g, centered(0.25), 1e-6, 100000);
    auto r = exhaustion_solve(g, centered(0.25), {0.0}, 1e-6, 100000);
    REQUIRE(r.fields.size() == 1);
    CHECK(r.fields[0].values == full.values);
    CHECK(r.sup_gaps.empty());
}

TEST_CASE("results are identical for any worker count") {
    Grid g = disc_grid(1.0, 1.0 / 32.0);
    set_global_workers(1);
    auto u1 = solve_envelope_grid(g, centered(0.25), 1e-6, 100000);
    set_global_workers(4);
    auto u4 = solve_envelope_grid(g, centered(0.25), 1e-6, 100000);
    set_global_workers(
        std::max(1, static_cast<int>(std::thread::hardware_concurrency())));
    CHECK(u1.values == u4.values); // bit-for-bit
    CHECK(u1.iterations == u4.iterations);
    CHECK(u1.final_residual == u4.final_residual);
}

TEST_CASE("envelope solver rejects bad parameters") {
    Grid g = disc_grid(1.0, 1.0 / 32.0);
    CHECK_THROWS_AS(solve_envelope_grid(g, centered(0.25), 0.0, 1000), ParameterError);
    CHECK_THROWS_AS(solve_envelope_grid(g, centered(0.25), 1e-6, 0), ParameterError);
    // obstacle must be resolved by at least four cells
    Grid coarse = disc_grid(1.0, 1.0 / 8.0);
    CHECK_THROWS_AS(solve_envelope_grid(coarse, centered(0.25), 1e-6, 1000),
                    ParameterError);
    // obstacle must fit strictly inside the (cut) domain
    CHECK_THROWS_AS(solve_envelope_grid(g, ObstacleBall{Point::c1(0.9, 0.0), 0.25},
                                        1e-6, 1000),
                    ParameterError);
    CHECK_THROWS_AS(solve_envelope_grid(g, centered(0.25), 1e-6, 1000, 0.8),
                    ParameterError);
    CHECK_THROWS_AS(solve_envelope_grid(g, centered(-0.1), 1e-6, 1000),
                    ParameterError);
}

TEST_CASE("non-convergence is reported, not hidden") {
    Grid g = disc_grid(1.0, 1.0 / 64.0);
    auto u = solve_envelope_grid(g, centered(0.25), 1e-12, 5);
    CHECK_FALSE(u.converged);
    CHECK(u.iterations == 5);
    CHECK(u.final_residual > 1e-12);
}
