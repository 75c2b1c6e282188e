#include "rholab/barriers.hpp"

#include "rholab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace rholab {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

// ---------------------------------------------------------------------------
// EtaFunction
// ---------------------------------------------------------------------------

EtaFunction EtaFunction::power(double gamma) {
    if (!(gamma >= 1.0) || !std::isfinite(gamma))
        throw ParameterError("eta=power needs gamma >= 1, got " + fmt(gamma));
    EtaFunction e;
    e.kind_ = Kind::power;
    e.gamma_ = gamma;
    e.name_ = "power:gamma=" + fmt(gamma);
    return e;
}

EtaFunction EtaFunction::loglog() {
    EtaFunction e;
    e.kind_ = Kind::loglog;
    e.name_ = "loglog";
    return e;
}

EtaFunction EtaFunction::expinv() {
    EtaFunction e;
    e.kind_ = Kind::expinv;
    e.name_ = "expinv";
    return e;
}

EtaFunction EtaFunction::from_samples(std::vector<std::pair<double, double>> rows) {
    if (rows.size() < 2)
        throw ParameterError("eta samples need at least two rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!(rows[i].first > 0.0) || !(rows[i].second > 0.0))
            throw ParameterError("eta sample rows must be positive");
        if (i > 0 && !(rows[i].first > rows[i - 1].first &&
                       rows[i].second > rows[i - 1].second))
            throw ParameterError("eta sample rows must be strictly increasing");
    }
    EtaFunction e;
    e.kind_ = Kind::samples;
    e.rows_ = std::move(rows);
    e.name_ = "samples[" + std::to_string(e.rows_.size()) + " rows]";
    return e;
}

EtaFunction EtaFunction::parse(const std::string& text) {
    if (text == "loglog") return loglog();
    if (text == "expinv") return expinv();
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    if (head == "power") {
        if (colon == std::string::npos)
            throw ParameterError("eta=power needs a gamma, e.g. power:gamma=2");
        const std::string arg = text.substr(colon + 1);
        const auto eq = arg.find('=');
        if (eq == std::string::npos || arg.substr(0, eq) != "gamma")
            throw ParameterError("unrecognized eta power argument '" + arg + "'");
        const std::string num = arg.substr(eq + 1);
        std::size_t used = 0;
        double g = 0.0;
        try {
            g = std::stod(num, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != num.size() || num.empty())
            throw ParameterError("bad eta gamma value '" + num + "'");
        return power(g);
    }
    if (head == "samples") {
        if (colon == std::string::npos)
            throw ParameterError("eta=samples needs a path, e.g. samples:eta.txt");
        const std::string path = text.substr(colon + 1);
        std::ifstream in(path);
        if (!in)
            throw ParameterError("cannot open eta sample file '" + path + "'");
        std::vector<std::pair<double, double>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            double t = 0, v = 0;
            if (!(ls >> t >> v))
                throw ParameterError("bad eta sample row '" + line + "' in " + path);
            rows.emplace_back(t, v);
        }
        return from_samples(std::move(rows));
    }
    throw ParameterError("unrecognized eta selector '" + text +
                         "' (expected power:gamma=<g>, loglog, expinv, or samples:<path>)");
}

double EtaFunction::operator()(double t) const {
    if (!(t > 0.0) || !std::isfinite(t))
        throw ParameterError("eta: t must be positive, got " + fmt(t));
    switch (kind_) {
    case Kind::power:
        return std::pow(t, gamma_);
    case Kind::loglog: {
        if (t >= 1.0)
            throw ParameterError("eta=loglog is defined only for t in (0,1), got " + fmt(t));
        const double lt = std::log(t);
        return t * std::exp(lt * std::log(-lt));
    }
    case Kind::expinv:
        return std::exp(-1.0 / t);
    case Kind::samples: {
        if (t > rows_.back().first)
            throw ParameterError("eta table does not cover t=" + fmt(t));
        // below the first row, complete the gauge linearly through (0, 0)
        if (t <= rows_.front().first)
            return rows_.front().second * (t / rows_.front().first);
        const auto it = std::lower_bound(
            rows_.begin(), rows_.end(), t,
            [](const std::pair<double, double>& r, double x) { return r.first < x; });
        const auto [t1, v1] = *it;
        const auto [t0, v0] = *(it - 1);
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
    }
    return 0.0; // unreachable
}

void EtaFunction::validate(double t0) const {
    if (!(t0 > 0.0) || !std::isfinite(t0))
        throw ParameterError("eta validation needs t0 > 0, got " + fmt(t0));
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 40; ++k) {
        const double t = t0 * std::pow(2.0, -k);
        const double v = (*this)(t);
        if (!std::isfinite(v) || !(v > 0.0))
            throw ParameterError("eta(" + fmt(t) + ") = " + fmt(v) +
                                 " is not a positive finite value");
        if (v > t * (1.0 + 1e-12))
            throw ParameterError("eta(" + fmt(t) + ") = " + fmt(v) +
                                 " exceeds t; the gauge must satisfy eta(t) <= t");
        if (v > prev * (1.0 + 1e-12))
            throw ParameterError("eta is not increasing near t=" + fmt(t));
        prev = v;
    }
}

// ---------------------------------------------------------------------------
// BarrierFamily
// ---------------------------------------------------------------------------

std::string to_string(BarrierKind k) {
    switch (k) {
    case BarrierKind::holder: return "holder";
    case BarrierKind::lipschitz: return "lipschitz";
    case BarrierKind::eta: return "eta";
    }
    return "?";
}

namespace {

void check_common_params(const BarrierParams& p) {
    if (!(p.alpha > 0.0 && p.alpha < 1.0))
        throw ParameterError("barrier alpha must lie in (0,1), got " + fmt(p.alpha));
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0))
        throw ParameterError("barrier epsilon must lie in (0,1), got " + fmt(p.epsilon));
    if (!(p.t0 > 0.0) || !std::isfinite(p.t0))
        throw ParameterError("barrier t0 must be positive, got " + fmt(p.t0));
    if (p.r0 < 0.0 || !std::isfinite(p.r0))
        throw ParameterError("barrier r0 must be nonnegative, got " + fmt(p.r0));
}

void check_dilation_budget(const Domain& base, const BarrierParams& p,
                           const char* kind_name) {
    if (base.kind() != DomainKind::graph)
        throw UnsupportedKindError(std::string(kind_name) +
                                   " barrier family needs a graph-kind base domain "
                                   "(the only kind with a dilation law)");
    const auto& gd = dynamic_cast<const GraphDomain&>(base);
    const double budget = gd.spec().data_radius - gd.spec().radius;
    if (p.epsilon * p.t0 > budget + 1e-12)
        throw ParameterError("dilation scale epsilon*t0 = " + fmt(p.epsilon * p.t0) +
                             " exceeds the graph data budget " + fmt(budget));
}

} // namespace

BarrierFamily::BarrierFamily(BarrierKind k, const Domain& base, BarrierParams p)
    : kind_(k), params_(std::move(p)), base_(base.clone()) {}

BarrierFamily BarrierFamily::holder_family(const Domain& base, BarrierParams p) {
    check_common_params(p);
    if (!(p.gamma >= 1.0))
        throw ParameterError("holder family needs gamma >= 1, got " + fmt(p.gamma));
    if (!(p.beta_dil > 0.0))
        throw ParameterError("holder family needs beta_dil > 0, got " + fmt(p.beta_dil));
    check_dilation_budget(base, p, "holder");
    return BarrierFamily(BarrierKind::holder, base, std::move(p));
}

BarrierFamily BarrierFamily::lipschitz_family(const Domain& base, BarrierParams p) {
    check_common_params(p);
    if (p.c_demailly < 0.0)
        throw ParameterError("c_demailly must be nonnegative, got " + fmt(p.c_demailly));
    return BarrierFamily(BarrierKind::lipschitz, base, std::move(p));
}

BarrierFamily BarrierFamily::eta_family(const Domain& base, BarrierParams p) {
    check_common_params(p);
    if (!(p.alpha + p.epsilon < 1.0))
        throw ParameterError("eta family needs alpha + epsilon < 1, got " +
                             fmt(p.alpha + p.epsilon));
    if (!p.eta)
        throw ParameterError("eta family needs an eta gauge function");
    check_dilation_budget(base, p, "eta");
    p.eta->validate(p.epsilon * p.t0);
    return BarrierFamily(BarrierKind::eta, base, std::move(p));
}

const Domain& BarrierFamily::dilation(double s) const {
    if (!(s > 0.0) || !std::isfinite(s))
        throw ParameterError("dilation scale must be positive, got " + fmt(s));
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = dilation_cache_.find(s);
    if (it == dilation_cache_.end())
        it = dilation_cache_.emplace(s, dilated_domain(*base_, s)).first;
    return *it->second;
}

double BarrierFamily::v_model(const Point& z, double s) const {
    const double d = base_->boundary_distance(z);
    return -std::log(d + s) - 0.5 * params_.c_demailly;
}

double BarrierFamily::psi(const Point& z, double t) const {
    if (!(t > 0.0) || t > params_.t0 * (1.0 + 1e-12))
        throw ParameterError("psi: t = " + fmt(t) + " outside (0, t0 = " +
                             fmt(params_.t0) + "]");
    const double s = params_.epsilon * t;
    switch (kind_) {
    case BarrierKind::holder: {
        if (!base_->contains(z))
            throw DomainError("psi: point outside the base domain");
        const double d = dilation(s).boundary_distance(z);
        if (!(d > 0.0))
            throw DomainError("psi: point not interior to the dilated domain");
        const double denom = std::log(2.0 / (params_.beta_dil * std::pow(s, params_.gamma)));
        if (!(denom > 0.0))
            throw ParameterError("psi: nonpositive normalizer at t = " + fmt(t));
        return -std::log(d) / denom;
    }
    case BarrierKind::lipschitz: {
        const double denom = std::log(2.0 / s);
        if (!(denom > 0.0))
            throw ParameterError("psi: nonpositive normalizer at t = " + fmt(t));
        return v_model(z, s) / denom;
    }
    case BarrierKind::eta: {
        const double es = (*params_.eta)(s);
        if (!(es > 0.0))
            throw ParameterError("psi: eta(" + fmt(s) + ") = " + fmt(es) +
                                 " is not positive");
        const double d = dilation(s).boundary_distance(z);
        if (!(d > 0.0))
            throw DomainError("psi: point not interior to the dilated domain");
        const double denom = std::log(2.0 / es);
        if (!(denom > 0.0))
            throw ParameterError("psi: nonpositive normalizer at t = " + fmt(t));
        return -std::log(d) / denom;
    }
    }
    return 0.0; // unreachable
}

double psi_holder(const BarrierFamily& f, const Point& z, double t) {
    if (f.kind() != BarrierKind::holder)
        throw ParameterError("psi_holder called on a " + to_string(f.kind()) + " family");
    return f.psi(z, t);
}

double psi_lipschitz(const BarrierFamily& f, const Point& z, double t) {
    if (f.kind() != BarrierKind::lipschitz)
        throw ParameterError("psi_lipschitz called on a " + to_string(f.kind()) + " family");
    return f.psi(z, t);
}

double psi_eta(const BarrierFamily& f, const Point& z, double t) {
    if (f.kind() != BarrierKind::eta)
        throw ParameterError("psi_eta called on a " + to_string(f.kind()) + " family");
    return f.psi(z, t);
}

std::vector<double> barrier_field(const BarrierFamily& f, const Grid& g, double t) {
    if (f.kind() != BarrierKind::lipschitz)
        f.dilation(f.params().epsilon * t); // build once, outside the parallel loop
    std::vector<double> out(g.total_nodes(),
                            std::numeric_limits<double>::quiet_NaN());
    global_pool().parallel_for(g.total_nodes(), [&](std::size_t i) {
        if (g.is_inside(i)) out[i] = f.psi(g.node(i), t);
    });
    return out;
}

std::vector<std::uint32_t> interior_nodes(const Grid& g) {
    std::vector<std::uint32_t> nodes;
    nodes.reserve(g.interior_count());
    for (std::size_t i = 0; i < g.total_nodes(); ++i)
        if (g.is_inside(i)) nodes.push_back(static_cast<std::uint32_t>(i));
    return nodes;
}

std::vector<std::uint32_t> free_interior_nodes(const ScalarField& field) {
    if (field.grid == nullptr)
        throw ParameterError("free_interior_nodes: field has no grid");
    const Grid& g = *field.grid;
    if (field.obstacle.size() != g.total_nodes())
        throw ParameterError("free_interior_nodes: field has no constraint mask");
    const int rdim = g.rdim();
    std::vector<std::uint32_t> nodes;
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        if (!g.is_inside(i) || field.obstacle[i]) continue;
        const auto c = g.coords(i);
        bool edge = false;
        for (int a = 0; a < rdim; ++a)
            if (c[a] < 1 || c[a] > g.count(a) - 2) { edge = true; break; }
        if (edge) continue;
        // enumerate the one-cell Chebyshev block around i
        bool clean = true;
        std::array<int, 4> d{};
        for (int a = 0; a < rdim; ++a) d[a] = -1;
        while (clean) {
            std::ptrdiff_t off = 0;
            for (int a = 0; a < rdim; ++a) off += d[a] * g.stride(a);
            if (field.obstacle[static_cast<std::size_t>(
                    static_cast<std::ptrdiff_t>(i) + off)])
                clean = false;
            int a = 0;
            for (; a < rdim; ++a) {
                if (++d[a] <= 1) break;
                d[a] = -1;
            }
            if (a == rdim) break;
        }
        if (clean) nodes.push_back(static_cast<std::uint32_t>(i));
    }
    return nodes;
}

// ---------------------------------------------------------------------------
// kappa
// ---------------------------------------------------------------------------

KappaValue kappa_alpha(const BarrierFamily& f, const Grid& g, double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw ParameterError("kappa_alpha: t must be positive, got " + fmt(t));
    const SublevelSets sets = sublevel_region(g, t, f.params().alpha);
    if (sets.shell.empty())
        throw ParameterError("kappa_alpha: no grid nodes in the shell delta <= alpha*t at t = " +
                             fmt(t));
    if (sets.band.empty())
        throw ParameterError("kappa_alpha: no grid nodes in the band |delta - t| <= h at t = " +
                             fmt(t));
    if (f.kind() != BarrierKind::lipschitz)
        f.dilation(f.params().epsilon * t);

    const auto extremum = [&](const std::vector<std::uint32_t>& nodes, bool want_max) {
        std::vector<double> partial(global_pool().workers(),
                                    want_max ? -std::numeric_limits<double>::infinity()
                                             : std::numeric_limits<double>::infinity());
        global_pool().run_chunks(nodes.size(), [&](int chunk, std::size_t b, std::size_t e) {
            double acc = partial[chunk];
            for (std::size_t k = b; k < e; ++k) {
                const double v = f.psi(g.node(nodes[k]), t);
                acc = want_max ? std::max(acc, v) : std::min(acc, v);
            }
            partial[chunk] = acc;
        });
        double out = partial[0];
        for (std::size_t c = 1; c < partial.size(); ++c)
            out = want_max ? std::max(out, partial[c]) : std::min(out, partial[c]);
        return out;
    };

    KappaValue kv;
    kv.t = t;
    kv.shell_inf = extremum(sets.shell, /*want_max=*/false);
    kv.band_sup = extremum(sets.band, /*want_max=*/true);
    kv.shell_nodes = sets.shell.size();
    kv.band_nodes = sets.band.size();
    kv.band_halfwidth = g.spacing();
    if (kv.band_sup >= 1.0)
        throw HypothesisError(t, kv.shell_inf, kv.band_sup,
                              "barrier hypothesis failed at t = " + fmt(t) +
                                  ": sup over the band reaches " + fmt(kv.band_sup) +
                                  " >= 1");
    if (kv.shell_inf >= 1.0)
        throw HypothesisError(t, kv.shell_inf, kv.band_sup,
                              "barrier reaches " + fmt(kv.shell_inf) +
                                  " >= 1 on the shell at t = " + fmt(t));
    if (!(kv.shell_inf > kv.band_sup))
        throw HypothesisError(t, kv.shell_inf, kv.band_sup,
                              "barrier hypothesis failed at t = " + fmt(t) +
                                  ": inf over the shell " + fmt(kv.shell_inf) +
                                  " does not exceed sup over the band " +
                                  fmt(kv.band_sup));
    kv.value = (kv.shell_inf - kv.band_sup) / (1.0 - kv.band_sup);
    return kv;
}

// ---------------------------------------------------------------------------
// Plurisubharmonicity check
// ---------------------------------------------------------------------------

LeviReport levi_test(const Grid& g, const std::vector<double>& values,
                     const std::vector<std::uint32_t>& sample, double tol) {
    if (values.size() != g.total_nodes())
        throw ParameterError("levi_test: field size does not match the grid");
    if (!(tol >= 0.0))
        throw ParameterError("levi_test: tol must be nonnegative");

    const CircleStencil st = make_circle_stencil(g);
    const int rdim = g.rdim();
    const double h = g.spacing();
    const double inv4h2 = 1.0 / (4.0 * h * h);

    LeviReport rep;
    rep.tol = tol;
    rep.worst_mean_defect = -std::numeric_limits<double>::infinity();
    rep.worst_eigenvalue = std::numeric_limits<double>::infinity();

    // every stencil read (circle samples and Hessian differences) stays
    // within one cell of the center on each axis
    const auto usable = [&](std::size_t idx) {
        const auto c = g.coords(idx);
        for (int a = 0; a < rdim; ++a)
            if (c[a] < 1 || c[a] > g.count(a) - 2) return false;
        return true;
    };
    const auto defined = [&](std::size_t idx) {
        return g.is_inside(idx) && std::isfinite(values[idx]);
    };

    for (const std::uint32_t p : sample) {
        if (!defined(p) || !usable(p)) {
            ++rep.skipped;
            continue;
        }
        bool ok = true;
        for (const auto& pat : st.per_direction) {
            for (const std::ptrdiff_t off : pat.off)
                if (!defined(static_cast<std::size_t>(p + off))) { ok = false; break; }
            if (!ok) break;
        }
        std::array<std::ptrdiff_t, 4> s{};
        for (int a = 0; a < rdim; ++a) s[a] = g.stride(a);
        if (ok) {
            for (int a = 0; a < rdim && ok; ++a)
                if (!defined(p + s[a]) || !defined(p - s[a])) ok = false;
            if (ok && rdim == 4) {
                const std::ptrdiff_t cross[4] = {s[0] + s[2], s[0] - s[2],
                                                 s[1] + s[3], s[1] - s[3]};
                for (const std::ptrdiff_t c : cross)
                    if (!defined(p + c) || !defined(p - c)) { ok = false; break; }
                const std::ptrdiff_t cross2[4] = {s[0] + s[3], s[0] - s[3],
                                                  s[1] + s[2], s[1] - s[2]};
                for (const std::ptrdiff_t c : cross2)
                    if (!defined(p + c) || !defined(p - c)) { ok = false; break; }
            }
        }
        if (!ok) {
            ++rep.skipped;
            continue;
        }

        const double uc = values[p];
        for (const auto& pat : st.per_direction) {
            double avg = 0.0;
            for (std::size_t k = 0; k < pat.off.size(); ++k)
                avg += pat.w[k] * values[p + pat.off[k]];
            const double defect = uc - avg;
            if (defect > rep.worst_mean_defect) {
                rep.worst_mean_defect = defect;
                rep.worst_defect_node = p;
            }
        }

        const auto lap4 = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
            return (values[p + a] + values[p - a] + values[p + b] + values[p - b] -
                    4.0 * uc) * inv4h2;
        };
        double eig;
        if (rdim == 2) {
            eig = lap4(s[0], s[1]);
        } else {
            const auto mixed = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
                return (values[p + a + b] - values[p + a - b] - values[p - a + b] +
                        values[p - a - b]) * inv4h2;
            };
            const double h11 = lap4(s[0], s[1]);
            const double h22 = lap4(s[2], s[3]);
            const double re12 = 0.25 * (mixed(s[0], s[2]) + mixed(s[1], s[3]));
            const double im12 = 0.25 * (mixed(s[0], s[3]) - mixed(s[1], s[2]));
            eig = 0.5 * (h11 + h22) -
                  std::sqrt(0.25 * (h11 - h22) * (h11 - h22) + re12 * re12 + im12 * im12);
        }
        if (eig < rep.worst_eigenvalue) {
            rep.worst_eigenvalue = eig;
            rep.worst_eig_node = p;
        }
        ++rep.checked;
    }

    if (rep.checked == 0) {
        rep.worst_mean_defect = 0.0;
        rep.worst_eigenvalue = 0.0;
    }
    rep.pass = rep.worst_mean_defect <= tol && rep.worst_eigenvalue >= -tol;
    return rep;
}

LeviReport levi_test(const ScalarField& field,
                     const std::vector<std::uint32_t>& sample, double tol) {
    if (field.grid == nullptr)
        throw ParameterError("levi_test: field has no grid");
    return levi_test(*field.grid, field.values, sample, tol);
}

} // namespace rholab
