#include "rholab/envelope.hpp"

#include "rholab/numerics.hpp"
#include "rholab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace rholab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// First tau in (eps, limit] with |z + tau*d - c| = R (sphere in all real
// coordinates; unused slots are zero so the same code covers C^1 and C^2).
std::optional<double> sphere_crossing(const Point& z, const Point& d, const Point& c,
                                      double R, double limit) {
    const Point p = z - c;
    auto r = smallest_root_above(d.norm2(), 2.0 * p.dot(d), p.norm2() - R * R, 0.0);
    if (r && *r <= limit) return r;
    return std::nullopt;
}

// First tau in (0, limit] where delta(z + tau*d) drops to `level`, found by
// scan + bisection on the sublevel membership predicate.
std::optional<double> sublevel_crossing(const Domain& dom, const Point& z,
                                        const Point& d, double limit, double level) {
    const auto member = [&](const Point& p) {
        return dom.contains(p) && dom.boundary_distance(p) > level;
    };
    constexpr int kScan = 16;
    double prev = 0.0;
    for (int k = 1; k <= kScan; ++k) {
        const double t = limit * static_cast<double>(k) / kScan;
        if (!member(z + d * t)) {
            double a = prev, b = t;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                if (member(z + d * m))
                    a = m;
                else
                    b = m;
            }
            return 0.5 * (a + b);
        }
        prev = t;
    }
    return std::nullopt;
}

CircleStencil::Pat build_pattern(const std::array<double, 4>& o, const Grid& g) {
    const int rdim = g.rdim();
    int base[4][2];
    double wt[4][2];
    int cnt[4];
    for (int a = 0; a < rdim; ++a) {
        const double t = o[a];
        const double b = std::floor(t + 1e-9);
        const double f = t - b;
        if (f < 1e-7) {
            cnt[a] = 1;
            base[a][0] = static_cast<int>(b);
            wt[a][0] = 1.0;
        } else if (f > 1.0 - 1e-7) {
            cnt[a] = 1;
            base[a][0] = static_cast<int>(b) + 1;
            wt[a][0] = 1.0;
        } else {
            cnt[a] = 2;
            base[a][0] = static_cast<int>(b);
            base[a][1] = static_cast<int>(b) + 1;
            wt[a][0] = 1.0 - f;
            wt[a][1] = f;
        }
    }
    CircleStencil::Pat p;
    int pick[4] = {0, 0, 0, 0};
    for (;;) {
        std::ptrdiff_t off = 0;
        double w = 1.0;
        for (int a = 0; a < rdim; ++a) {
            off += static_cast<std::ptrdiff_t>(base[a][pick[a]]) * g.stride(a);
            w *= wt[a][pick[a]];
        }
        p.off.push_back(off);
        p.w.push_back(w);
        int a = rdim - 1;
        while (a >= 0 && ++pick[a] == cnt[a]) pick[a--] = 0;
        if (a < 0) break;
    }
    return p;
}

} // namespace

CircleStencil make_circle_stencil(const Grid& g) {
    const int rdim = g.rdim();
    if (rdim != 2 && rdim != 4)
        throw ParameterError("circle stencil: grid must live in C^1 or C^2");

    const double s = std::sqrt(0.5);
    // 8 samples at multiples of 45 degrees, written exactly.
    const double co[8] = {1.0, s, 0.0, -s, -1.0, -s, 0.0, s};
    const double si[8] = {0.0, s, 1.0, s, 0.0, -s, -1.0, -s};

    // Real 2-plane bases (u, v) of each complex direction w: u = w, v = i*w.
    std::vector<std::array<double, 4>> us, vs;
    if (rdim == 2) {
        us.push_back({1, 0, 0, 0});
        vs.push_back({0, 1, 0, 0});
    } else {
        us.push_back({1, 0, 0, 0});
        vs.push_back({0, 1, 0, 0});
        us.push_back({0, 0, 1, 0});
        vs.push_back({0, 0, 0, 1});
        us.push_back({s, 0, s, 0});
        vs.push_back({0, s, 0, s});
        us.push_back({s, 0, -s, 0});
        vs.push_back({0, s, 0, -s});
    }

    CircleStencil st;
    st.ndir = static_cast<int>(us.size());
    for (int d = 0; d < st.ndir; ++d) {
        std::map<std::ptrdiff_t, double> merged;
        for (int k = 0; k < 8; ++k) {
            std::array<double, 4> o{0, 0, 0, 0};
            for (int a = 0; a < 4; ++a) o[a] = co[k] * us[d][a] + si[k] * vs[d][a];
            st.sample_offsets.push_back(o);
            CircleStencil::Pat p = build_pattern(o, g);
            for (std::size_t j = 0; j < p.off.size(); ++j)
                merged[p.off[j]] += p.w[j] / 8.0;
            st.per_sample.push_back(std::move(p));
        }
        CircleStencil::Pat m;
        for (const auto& [off, w] : merged) {
            m.off.push_back(off);
            m.w.push_back(w);
        }
        st.per_direction.push_back(std::move(m));
    }
    return st;
}

// ---------------------------------------------------------------------------
// Harmonic oracle
// ---------------------------------------------------------------------------

ScalarField solve_harmonic_oracle(const Grid& g, const ObstacleBall& ob) {
    if (g.rdim() != 2)
        throw ParameterError("harmonic oracle: defined in C^1 only");
    const auto* ball = dynamic_cast<const BallDomain*>(&g.domain());
    if (!ball || ball->cdim() != 1 || std::abs(ball->radius() - 1.0) > 1e-12 ||
        ball->center().norm() > 1e-12)
        throw ParameterError("harmonic oracle: domain must be the unit disc");
    if (ob.center.norm() > 1e-12)
        throw ParameterError("harmonic oracle: obstacle must be centered");
    const double s0 = ob.radius;
    if (!(s0 > 0.0) || !(s0 < 1.0))
        throw ParameterError("harmonic oracle: obstacle radius must lie in (0, 1)");

    ScalarField f;
    f.grid = &g;
    f.values.assign(g.total_nodes(), 0.0);
    f.obstacle.assign(g.total_nodes(), 0);
    const double denom = std::log(1.0 / s0);
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        if (!g.is_inside(i)) continue;
        const Point p = g.node(i);
        const double r = std::hypot(p.x[0], p.x[1]);
        if (r <= s0) {
            f.values[i] = -1.0;
            f.obstacle[i] = 1;
        } else {
            f.values[i] = std::log(r) / denom;
        }
    }
    f.iterations = 0;
    f.final_residual = 0.0;
    f.converged = true;
    f.tol = 0.0;
    return f;
}

// ---------------------------------------------------------------------------
// Envelope solver
// ---------------------------------------------------------------------------

namespace {

struct Solver {
    const Grid& g;
    ObstacleBall ob;
    double level;
    double h;
    CircleStencil st;

    enum : std::uint8_t { kGhost = 0, kActive = 1, kPinned = 2 };
    std::vector<std::uint8_t> state;

    // Active nodes grouped by lattice-parity color. No stencil offset other
    // than the center stays within a color (every nonzero offset has an odd
    // component), so updating one color in place reads only values frozen
    // for the duration of that stage: the sweep is a deterministic
    // Gauss-Seidel pass whose result is independent of the worker count.
    struct Group {
        std::vector<std::uint32_t> nodes; // fast nodes first, then slow nodes
        std::size_t nfast = 0;
        std::size_t slow_base = 0; // ordinal of first slow node, global order
    };
    int ncolors = 0;
    std::vector<Group> groups;

    struct Clip {
        float tau;
        std::int8_t val;
    };
    std::vector<std::uint32_t> clip_mask;  // per slow node, bit = slot clipped
    std::vector<std::uint32_t> clip_start; // CSR starts, size nslow+1
    std::vector<Clip> clips;

    Solver(const Grid& grid, const ObstacleBall& o, double lev)
        : g(grid), ob(o), level(lev), h(grid.spacing()), st(make_circle_stencil(grid)) {
        validate();
        classify();
        build_clips();
    }

    void validate() const {
        if (!(ob.radius > 0.0) || !std::isfinite(ob.radius))
            throw ParameterError("envelope: obstacle radius must be positive");
        if (ob.radius / h < 4.0 - 1e-9)
            throw ParameterError(
                "envelope: grid does not resolve the obstacle (need >= 4 nodes "
                "across its radius)");
        if (!(level >= 0.0))
            throw ParameterError("envelope: sublevel cut must be >= 0");
        if (!g.domain().contains(ob.center))
            throw ParameterError("envelope: obstacle center lies outside the domain");
        const double dc = g.domain().boundary_distance(ob.center);
        if (!(dc > ob.radius + level))
            throw ParameterError(
                "envelope: obstacle ball does not fit inside the solve region");
    }

    void classify() {
        const std::size_t total = g.total_nodes();
        const int rdim = g.rdim();
        ncolors = 1 << rdim;
        state.assign(total, kGhost);
        global_pool().run_chunks(total, [&](int, std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                if (!g.is_inside(i) || g.delta(i) <= level) continue;
                const Point p = g.node(i);
                state[i] = ((p - ob.center).norm() <= ob.radius) ? kPinned : kActive;
            }
        });

        const double margin = 1.05 * h + g.domain().distance_slack();
        std::vector<std::vector<std::uint32_t>> fast(static_cast<std::size_t>(ncolors));
        std::vector<std::vector<std::uint32_t>> slow(static_cast<std::size_t>(ncolors));
        for (std::size_t i = 0; i < total; ++i) {
            if (state[i] != kActive) continue;
            const auto c = g.coords(i);
            bool edge = false;
            for (int a = 0; a < rdim; ++a)
                if (c[a] < 1 || c[a] > g.count(a) - 2) edge = true;
            if (edge)
                throw ParameterError(
                    "envelope: an interior node touches the lattice edge; "
                    "increase the grid padding");
            bool ok = true;
            // every node the sample patterns can read must hold a real value
            const int span = rdim;
            int off[4] = {-1, -1, -1, -1};
            for (;;) {
                std::ptrdiff_t d = 0;
                for (int a = 0; a < span; ++a) d += off[a] * g.stride(a);
                if (state[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + d)] ==
                    kGhost) {
                    ok = false;
                    break;
                }
                int a = span - 1;
                while (a >= 0 && ++off[a] == 2) off[a--] = -1;
                if (a < 0) break;
            }
            if (ok) {
                const Point p = g.node(i);
                ok = (g.delta(i) - level > margin) &&
                     ((p - ob.center).norm() - ob.radius > margin);
            }
            int color = 0;
            for (int a = 0; a < rdim; ++a) color |= (c[a] & 1) << a;
            (ok ? fast : slow)[static_cast<std::size_t>(color)].push_back(
                static_cast<std::uint32_t>(i));
        }
        groups.assign(static_cast<std::size_t>(ncolors), {});
        std::size_t slow_seen = 0;
        for (int c = 0; c < ncolors; ++c) {
            Group& gr = groups[static_cast<std::size_t>(c)];
            gr.nodes = std::move(fast[static_cast<std::size_t>(c)]);
            gr.nfast = gr.nodes.size();
            const auto& sl = slow[static_cast<std::size_t>(c)];
            gr.nodes.insert(gr.nodes.end(), sl.begin(), sl.end());
            gr.slow_base = slow_seen;
            slow_seen += sl.size();
        }
    }

    void build_clips() {
        std::size_t nslow = 0;
        for (const auto& gr : groups) nslow += gr.nodes.size() - gr.nfast;
        const int nslot = st.ndir * 8;
        clip_mask.assign(nslow, 0);
        clip_start.assign(nslow + 1, 0);
        clips.clear();
        const Domain& dom = g.domain();
        std::size_t s = 0;
        for (const auto& gr : groups) {
            for (std::size_t i = gr.nfast; i < gr.nodes.size(); ++i, ++s) {
                const Point z = g.node(gr.nodes[i]);
                for (int slot = 0; slot < nslot; ++slot) {
                    Point d{};
                    d.n = z.n;
                    for (int a = 0; a < 4; ++a) d.x[a] = st.sample_offsets[slot][a];
                    std::optional<double> tdom =
                        (level == 0.0) ? dom.ray_exit(z, d, h)
                                       : sublevel_crossing(dom, z, d, h, level);
                    std::optional<double> tobs =
                        sphere_crossing(z, d, ob.center, ob.radius, h);
                    if (tdom && *tdom > h) tdom.reset();
                    if (tobs && *tobs > h) tobs.reset();
                    if (!tdom && !tobs) continue;
                    double tau;
                    std::int8_t val;
                    if (tobs && (!tdom || *tobs <= *tdom)) {
                        tau = *tobs;
                        val = -1;
                    } else {
                        tau = *tdom;
                        val = 0;
                    }
                    tau = std::max(tau, 1e-9 * h);
                    clip_mask[s] |= (1u << slot);
                    clips.push_back(Clip{static_cast<float>(tau), val});
                }
                clip_start[s + 1] = static_cast<std::uint32_t>(clips.size());
            }
        }
    }

    // One in-place colored Gauss-Seidel pass; returns the sup-norm update.
    double sweep(double* u, std::vector<double>& part) const {
        WorkerPool& pool = global_pool();
        double res = 0.0;

        // the planar merged pattern is always 9 points; unroll it
        const bool planar = st.ndir == 1 && st.per_direction[0].off.size() == 9;
        std::ptrdiff_t fo[9] = {};
        double fw[9] = {};
        if (planar)
            for (int j = 0; j < 9; ++j) {
                fo[j] = st.per_direction[0].off[static_cast<std::size_t>(j)];
                fw[j] = st.per_direction[0].w[static_cast<std::size_t>(j)];
            }

        for (int col = 0; col < ncolors; ++col) {
            const Group& gr = groups[static_cast<std::size_t>(col)];
            if (gr.nodes.empty()) continue;
            part.assign(static_cast<std::size_t>(pool.workers()), 0.0);
            pool.run_chunks(gr.nodes.size(), [&](int c, std::size_t b, std::size_t e) {
                double m = 0.0;
                std::size_t i = b;
                for (const std::size_t fe = std::min(e, gr.nfast); i < fe; ++i) {
                    const std::uint32_t idx = gr.nodes[i];
                    double best;
                    if (planar) {
                        const double* p = u + idx;
                        best = fw[0] * p[fo[0]] + fw[1] * p[fo[1]] +
                               fw[2] * p[fo[2]] + fw[3] * p[fo[3]] +
                               fw[4] * p[fo[4]] + fw[5] * p[fo[5]] +
                               fw[6] * p[fo[6]] + fw[7] * p[fo[7]] +
                               fw[8] * p[fo[8]];
                    } else {
                        best = kInf;
                        for (int d = 0; d < st.ndir; ++d) {
                            const auto& P = st.per_direction[static_cast<std::size_t>(d)];
                            double sum = 0.0;
                            for (std::size_t j = 0; j < P.off.size(); ++j)
                                sum += P.w[j] * u[idx + P.off[j]];
                            if (sum < best) best = sum;
                        }
                    }
                    const double v = best < 0.0 ? best : 0.0;
                    const double dv = std::fabs(v - u[idx]);
                    u[idx] = v;
                    if (dv > m) m = dv;
                }
                for (i = std::max(b, gr.nfast); i < e; ++i) {
                    const std::uint32_t idx = gr.nodes[i];
                    const std::size_t sp = gr.slow_base + (i - gr.nfast);
                    const std::uint32_t mask = clip_mask[sp];
                    const Clip* ce = clips.data() + clip_start[sp];
                    double best = kInf;
                    double arm[8], val[8];
                    for (int d = 0; d < st.ndir; ++d) {
                        for (int k = 0; k < 8; ++k) {
                            const int slot = d * 8 + k;
                            if (mask & (1u << slot)) {
                                arm[k] = ce->tau;
                                val[k] = ce->val;
                                ++ce;
                            } else {
                                const auto& P = st.per_sample[static_cast<std::size_t>(slot)];
                                double sum = 0.0;
                                for (std::size_t j = 0; j < P.off.size(); ++j)
                                    sum += P.w[j] * u[idx + P.off[j]];
                                arm[k] = h;
                                val[k] = sum;
                            }
                        }
                        double acc = 0.0;
                        for (int k = 0; k < 4; ++k)
                            acc += (arm[k + 4] * val[k] + arm[k] * val[k + 4]) /
                                   (arm[k] + arm[k + 4]);
                        acc *= 0.25;
                        if (acc < best) best = acc;
                    }
                    const double v = best < 0.0 ? best : 0.0;
                    const double dv = std::fabs(v - u[idx]);
                    u[idx] = v;
                    if (dv > m) m = dv;
                }
                part[static_cast<std::size_t>(c)] = m;
            });
            for (double p : part) res = std::max(res, p);
        }
        return res;
    }

    ScalarField run(double tol, long max_iter) const {
        if (!(tol > 0.0)) throw ParameterError("envelope: tol must be positive");
        if (max_iter < 1) throw ParameterError("envelope: max_iter must be >= 1");

        const std::size_t total = g.total_nodes();
        std::vector<double> u(total, 0.0);
        for (std::size_t i = 0; i < total; ++i)
            if (state[i] == kPinned) u[i] = -1.0;

        bool empty = true;
        for (const auto& gr : groups)
            if (!gr.nodes.empty()) empty = false;

        std::vector<double> part;
        long it = 0;
        double res = 0.0;
        bool conv = empty;
        while (it < max_iter && !conv) {
            res = sweep(u.data(), part);
            ++it;
            if (res < tol) conv = true;
        }

        ScalarField f;
        f.grid = &g;
        f.values = std::move(u);
        f.obstacle.assign(total, 0);
        for (std::size_t i = 0; i < total; ++i)
            if (state[i] == kPinned) f.obstacle[i] = 1;
        f.iterations = it;
        f.final_residual = res;
        f.converged = conv;
        f.tol = tol;
        f.level = level;
        return f;
    }
};

} // namespace

ScalarField solve_envelope_grid(const Grid& g, const ObstacleBall& ob, double tol,
                                long max_iter, double level) {
    Solver s(g, ob, level);
    return s.run(tol, max_iter);
}

ExhaustionResult exhaustion_solve(const Grid& g, const ObstacleBall& ob,
                                  const std::vector<double>& cuts, double tol,
                                  long max_iter) {
    if (cuts.empty()) throw ParameterError("exhaustion: need at least one cut");
    std::vector<double> sorted = cuts;
    for (double s : sorted)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw ParameterError("exhaustion: cuts must be finite and >= 0");
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    ExhaustionResult res;
    const double dc = g.domain().contains(ob.center)
                          ? g.domain().boundary_distance(ob.center)
                          : 0.0;
    for (double s : sorted) {
        if (!(dc > ob.radius + s)) {
            res.skipped.push_back(s);
            continue;
        }
        res.cuts.push_back(s);
        res.fields.push_back(solve_envelope_grid(g, ob, tol, max_iter, s));
    }
    if (res.fields.empty())
        throw ParameterError("exhaustion: no cut leaves room for the obstacle");

    // Gaps and monotonicity over the common (smaller-region) active nodes.
    for (std::size_t k = 0; k + 1 < res.fields.size(); ++k) {
        const double sk = res.cuts[k];
        double gap = 0.0;
        for (std::size_t i = 0; i < g.total_nodes(); ++i) {
            if (!g.is_inside(i) || g.delta(i) <= sk) continue;
            const double d = res.fields[k + 1].values[i] - res.fields[k].values[i];
            gap = std::max(gap, std::abs(d));
            res.monotone_worst = std::max(res.monotone_worst, d);
        }
        res.sup_gaps.push_back(gap);
    }
    res.monotone = res.monotone_worst <= tol + 1e-12;
    return res;
}

} // namespace rholab
