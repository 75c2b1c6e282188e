// Microbenchmarks for the hot paths: envelope sweeps in one and two complex
// dimensions, boundary-distance queries on the cusp graph, the decay-bound
// quadrature, and the shell-decay profile.  Grid sizes are kept small enough
// that a full run finishes in well under a minute.

#include <benchmark/benchmark.h>

#include "rholab/barriers.hpp"
#include "rholab/bounds.hpp"
#include "rholab/envelope.hpp"
#include "rholab/geometry.hpp"
#include "rholab/harness.hpp"

#include <vector>

using namespace rholab;

namespace {

// Full envelope solve on the unit disc; spacing narrows with the range arg.
void BM_envelope_disc(benchmark::State& state) {
    const BallDomain ball(1, Point::c1(0.0, 0.0), 1.0);
    const double h = 1.0 / static_cast<double>(state.range(0));
    const Grid g(ball, h);
    const ObstacleBall ob{Point::c1(0.0, 0.0), 0.25};
    for (auto _ : state) {
        const ScalarField sol = solve_envelope_grid(g, ob, 1e-6, 200000);
        benchmark::DoNotOptimize(sol.values.data());
    }
    state.counters["nodes"] = static_cast<double>(g.total_nodes());
}

// Envelope solve on a two-complex-dimensional polydisc.
void BM_envelope_polydisc(benchmark::State& state) {
    const PolydiscDomain poly(1.0, 1.0);
    const double h = 1.0 / static_cast<double>(state.range(0));
    const Grid g(poly, h);
    const ObstacleBall ob{Point::c2(0.0, 0.0, 0.0, 0.0), 0.3};
    for (auto _ : state) {
        const ScalarField sol = solve_envelope_grid(g, ob, 1e-4, 50000);
        benchmark::DoNotOptimize(sol.values.data());
    }
    state.counters["nodes"] = static_cast<double>(g.total_nodes());
}

// Distance queries against the square-root cusp graph boundary.
void BM_cusp_distance(benchmark::State& state) {
    GraphSpec spec;
    spec.form = GraphForm::neg_sqrt_abs;
    spec.holder_exponent = 0.5;
    const GraphDomain cusp(spec);
    std::vector<Point> pts;
    const int n = 64;
    for (int i = 0; i < n; ++i)
        for (int j = 1; j <= n; ++j)
            pts.push_back(Point::c1(-0.9 + 1.8 * i / (n - 1), -1.8 * j / n));
    for (auto _ : state) {
        double acc = 0.0;
        for (const Point& p : pts)
            if (cusp.contains(p)) acc += cusp.boundary_distance(p);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}

// Decay-bound quadrature against a smooth synthetic rate profile.
void BM_decay_bound(benchmark::State& state) {
    const auto kappa = [](double t) { return 0.3 + 0.1 * t; };
    for (auto _ : state) {
        const DecayBound b = decay_bound_from_kappa(kappa, 0.5, 0.0125, 0.1);
        benchmark::DoNotOptimize(b.value);
    }
}

// Shell-decay measurement over a nine-rung ladder on a converged field.
void BM_decay_profile(benchmark::State& state) {
    const BallDomain ball(1, Point::c1(0.0, 0.0), 1.0);
    const Grid g(ball, 1.0 / 64.0);
    const ObstacleBall ob{Point::c1(0.0, 0.0), 0.25};
    const ScalarField sol = solve_envelope_grid(g, ob, 1e-8, 200000);
    std::vector<double> ladder;
    for (int k = 0; k < 9; ++k) ladder.push_back(0.05 * std::pow(10.0, k / 8.0));
    for (auto _ : state) {
        const DecayProfile prof = decay_profile(sol, ladder);
        benchmark::DoNotOptimize(prof.M.data());
    }
}

} // namespace

BENCHMARK(BM_envelope_disc)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_envelope_polydisc)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cusp_distance)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_decay_bound)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_decay_profile)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
