#include "rholab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rholab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

std::string at_line(int line) {
    return line > 0 ? " (line " + std::to_string(line) + ")" : " (command line)";
}

double to_double(const std::string& key, const std::string& text, int line) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        fail(key + at_line(line) + ": expected a number, got '" + text + "'");
    return v;
}

long to_long(const std::string& key, const std::string& text, int line) {
    const std::string t = trim(text);
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
        fail(key + at_line(line) + ": expected an integer, got '" + text + "'");
    return v;
}

std::vector<double> to_double_list(const std::string& key, const std::string& text,
                                   int line) {
    std::istringstream ss(text);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(to_double(key, tok, line));
    if (out.empty()) fail(key + at_line(line) + ": expected numbers");
    return out;
}

// Pulls one key from the map, with a per-call required/optional policy.
class Reader {
  public:
    explicit Reader(ConfigMap& map) : map_(map) {}

    std::optional<std::string> optional(const std::string& key) {
        last_line_ = map_.line_of(key);
        return map_.take(key);
    }

    std::string required(const std::string& key) {
        auto v = optional(key);
        if (!v) fail("missing required key '" + key + "'");
        return *v;
    }

    double number(const std::string& key, double fallback) {
        auto v = optional(key);
        return v ? to_double(key, *v, last_line_) : fallback;
    }

    std::optional<double> number_opt(const std::string& key) {
        auto v = optional(key);
        if (!v) return std::nullopt;
        return to_double(key, *v, last_line_);
    }

    double number_req(const std::string& key) {
        return to_double(key, required(key), last_line_);
    }

    long integer(const std::string& key, long fallback) {
        auto v = optional(key);
        return v ? to_long(key, *v, last_line_) : fallback;
    }

    int line() const { return last_line_; }

  private:
    ConfigMap& map_;
    int last_line_ = 0;
};

} // namespace

ConfigMap ConfigMap::parse_text(const std::string& text) {
    ConfigMap map;
    std::istringstream ss(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3)
                fail("malformed section header" + at_line(line) + ": '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                fail("empty section name" + at_line(line));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            fail("expected 'key = value'" + at_line(line) + ": '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail("empty key" + at_line(line));
        if (value.empty()) fail("empty value for '" + key + "'" + at_line(line));
        if (section.empty())
            fail("key '" + key + "' appears before any [section]" + at_line(line));
        const std::string dotted = section + "." + key;
        const auto [it, inserted] = map.entries_.emplace(dotted, ConfigEntry{value, line, false});
        if (!inserted)
            fail("duplicate key '" + dotted + "'" + at_line(line) + ", first set" +
                 at_line(it->second.line));
    }
    return map;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

std::optional<std::string> ConfigMap::take(const std::string& dotted) {
    const auto it = entries_.find(dotted);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
}

bool ConfigMap::has(const std::string& dotted) const {
    return entries_.count(dotted) != 0;
}

int ConfigMap::line_of(const std::string& dotted) const {
    const auto it = entries_.find(dotted);
    return it == entries_.end() ? 0 : it->second.line;
}

void ConfigMap::override_value(const std::string& dotted, const std::string& value) {
    entries_[dotted] = ConfigEntry{value, 0, false};
}

std::vector<std::string> ConfigMap::unused() const {
    std::vector<std::string> out;
    for (const auto& [key, entry] : entries_)
        if (!entry.used) out.push_back("'" + key + "'" + at_line(entry.line));
    return out;
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::oracle: return "oracle";
        case ExperimentKind::holder: return "holder";
        case ExperimentKind::lipschitz: return "lipschitz";
        case ExperimentKind::eta: return "eta";
        case ExperimentKind::hartogs: return "hartogs";
        case ExperimentKind::key_lemma: return "key_lemma";
    }
    return "oracle";
}

std::vector<double> build_ladder(const LadderSpec& spec) {
    if (!(spec.t_min > 0.0) || !(spec.t_max > spec.t_min))
        throw ParameterError("ladder requires 0 < t_min < t_max");
    if (spec.per_decade < 1)
        throw ParameterError("ladder requires per_decade >= 1");
    const double decades = std::log10(spec.t_max / spec.t_min);
    const double k_exact = spec.per_decade * decades;
    const long k_round = std::lround(k_exact);
    std::vector<double> ladder;
    const bool lands = std::fabs(k_exact - static_cast<double>(k_round)) <=
                       1e-9 * std::max(1.0, k_exact);
    const long k_last = lands ? k_round : static_cast<long>(std::floor(k_exact));
    for (long k = 0; k <= k_last; ++k)
        ladder.push_back(spec.t_max *
                         std::pow(10.0, -static_cast<double>(k) / spec.per_decade));
    if (lands && k_last >= 0)
        ladder.back() = spec.t_min; // land exactly, absorbing pow() drift
    else if (ladder.empty() || ladder.back() > spec.t_min * (1.0 + 1e-12))
        ladder.push_back(spec.t_min);
    std::reverse(ladder.begin(), ladder.end());
    return ladder;
}

namespace {

ExperimentKind parse_kind(const std::string& text, int line) {
    if (text == "oracle") return ExperimentKind::oracle;
    if (text == "holder") return ExperimentKind::holder;
    if (text == "lipschitz") return ExperimentKind::lipschitz;
    if (text == "eta") return ExperimentKind::eta;
    if (text == "hartogs") return ExperimentKind::hartogs;
    if (text == "key_lemma") return ExperimentKind::key_lemma;
    fail("run.kind" + at_line(line) + ": unknown experiment kind '" + text +
         "' (expected oracle|holder|lipschitz|eta|hartogs|key_lemma)");
}

GraphForm parse_graph_form(const std::string& text, int line, std::string* sample_path) {
    if (text == "closed_form:zero") return GraphForm::zero;
    if (text == "closed_form:neg_abs") return GraphForm::neg_abs;
    if (text == "closed_form:neg_sqrt_abs") return GraphForm::neg_sqrt_abs;
    if (text.rfind("samples:", 0) == 0) {
        *sample_path = text.substr(8);
        if (sample_path->empty())
            fail("domain.g" + at_line(line) + ": samples: needs a file path");
        return GraphForm::samples;
    }
    fail("domain.g" + at_line(line) + ": unknown profile '" + text +
         "' (expected closed_form:zero|closed_form:neg_abs|closed_form:neg_sqrt_abs|samples:<path>)");
}

void read_run(Reader& r, ExperimentConfig& cfg) {
    cfg.tol = r.number("run.tol", 1e-8);
    if (!(cfg.tol > 0.0) || !(cfg.tol < 1.0))
        fail("run.tol" + at_line(r.line()) + ": must lie in (0, 1)");
    cfg.max_iter = r.integer("run.max_iter", 200000);
    if (cfg.max_iter < 1)
        fail("run.max_iter" + at_line(r.line()) + ": must be >= 1");
    if (auto e = r.optional("run.expect")) cfg.expect = *e;
}

void check_expect(const ExperimentConfig& cfg, int line) {
    if (cfg.expect.empty()) return;
    const bool eta = cfg.kind == ExperimentKind::eta;
    const std::vector<std::string> allowed =
        eta ? std::vector<std::string>{"divergent", "convergent", "inconclusive"}
            : std::vector<std::string>{"hyperconvex-consistent", "obstructed",
                                       "inconclusive"};
    if (std::find(allowed.begin(), allowed.end(), cfg.expect) == allowed.end()) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
        fail("run.expect" + at_line(line) + ": '" + cfg.expect + "' is not one of " + list);
    }
}

void read_obstacle(Reader& r, ExperimentConfig& cfg, int rdim) {
    const std::string center_text = r.required("obstacle.center");
    cfg.line_obstacle = r.line();
    const std::vector<double> c = to_double_list("obstacle.center", center_text, r.line());
    if (static_cast<int>(c.size()) != rdim)
        fail("obstacle.center" + at_line(cfg.line_obstacle) + ": expected " +
             std::to_string(rdim) + " coordinates, got " + std::to_string(c.size()));
    cfg.obstacle_center = rdim == 2 ? Point::c1(c[0], c[1]) : Point::c2(c[0], c[1], c[2], c[3]);
    cfg.obstacle_radius = r.number_req("obstacle.radius");
    if (!(cfg.obstacle_radius > 0.0))
        fail("obstacle.radius" + at_line(r.line()) + ": must be positive");
    cfg.has_obstacle = true;
}

void read_grid_spacing(Reader& r, ExperimentConfig& cfg) {
    cfg.grid.spacing = r.number_req("grid.spacing");
    cfg.line_grid = r.line();
    if (!(cfg.grid.spacing > 0.0))
        fail("grid.spacing" + at_line(r.line()) + ": must be positive");
    cfg.grid.padding = static_cast<int>(r.integer("grid.padding", 2));
    if (cfg.grid.padding < 1)
        fail("grid.padding" + at_line(r.line()) + ": must be >= 1");
}

void read_grid_fixed_box(Reader& r, ExperimentConfig& cfg, int rdim) {
    cfg.grid.nodes_per_axis = static_cast<int>(r.integer("grid.nodes_per_axis", 0));
    cfg.line_grid = r.line();
    if (cfg.grid.nodes_per_axis < 8)
        fail("grid.nodes_per_axis" + at_line(r.line()) + ": must be >= 8");
    const auto lo = to_double_list("grid.box_lo", r.required("grid.box_lo"), r.line());
    const auto hi = to_double_list("grid.box_hi", r.required("grid.box_hi"), r.line());
    if (static_cast<int>(lo.size()) != rdim || static_cast<int>(hi.size()) != rdim)
        fail("grid.box_lo/box_hi" + at_line(r.line()) + ": expected " +
             std::to_string(rdim) + " coordinates per corner");
    for (int a = 0; a < rdim; ++a) {
        if (!(lo[a] < hi[a]))
            fail("grid.box_lo/box_hi" + at_line(r.line()) + ": box is empty on axis " +
                 std::to_string(a));
        cfg.grid.box.lo[a] = lo[a];
        cfg.grid.box.hi[a] = hi[a];
    }
    cfg.grid.fixed_box = true;
}

void read_ladder(Reader& r, ExperimentConfig& cfg) {
    cfg.ladder.t_min = r.number_req("ladder.t_min");
    cfg.line_ladder = r.line();
    cfg.ladder.t_max = r.number_req("ladder.t_max");
    cfg.ladder.per_decade = static_cast<int>(r.integer("ladder.per_decade", 8));
    if (!(cfg.ladder.t_min > 0.0))
        fail("ladder.t_min" + at_line(cfg.line_ladder) + ": must be positive");
    if (!(cfg.ladder.t_max > cfg.ladder.t_min))
        fail("ladder.t_max" + at_line(r.line()) + ": must exceed t_min");
    if (cfg.ladder.per_decade < 1)
        fail("ladder.per_decade" + at_line(r.line()) + ": must be >= 1");
    cfg.has_ladder = true;
}

void read_graph_domain(Reader& r, ExperimentConfig& cfg) {
    const std::string kind = r.required("domain.kind");
    if (kind != "graph")
        fail("domain.kind" + at_line(r.line()) + ": experiment kind '" +
             to_string(cfg.kind) + "' requires a graph domain, got '" + kind + "'");
    cfg.domain.kind = kind;
    GraphSpec& gs = cfg.domain.graph;
    std::string sample_path;
    const std::string g_text = r.required("domain.g");
    gs.form = parse_graph_form(g_text, r.line(), &sample_path);
    if (gs.form == GraphForm::samples) {
        std::ifstream in(sample_path);
        if (!in)
            fail("domain.g" + at_line(r.line()) + ": cannot open samples file '" +
                 sample_path + "'");
        double x, y;
        while (in >> x >> y) gs.samples.push_back({x, y});
        if (gs.samples.size() < 2)
            fail("domain.g" + at_line(r.line()) + ": samples file '" + sample_path +
                 "' needs at least two rows");
    }
    gs.radius = r.number("domain.radius", 1.0);
    if (!(gs.radius > 0.0))
        fail("domain.radius" + at_line(r.line()) + ": must be positive");
    gs.data_radius = r.number("domain.data_radius", 2.0 * gs.radius);
    if (!(gs.data_radius > gs.radius))
        fail("domain.data_radius" + at_line(r.line()) + ": must exceed domain.radius");
    gs.holder_exponent = r.number("domain.holder_exponent",
                                  gs.form == GraphForm::neg_sqrt_abs ? 0.5 : 1.0);
    if (!(gs.holder_exponent > 0.0) || !(gs.holder_exponent <= 1.0))
        fail("domain.holder_exponent" + at_line(r.line()) + ": must lie in (0, 1]");
    gs.holder_constant = r.number("domain.holder_constant", 1.0);
    if (!(gs.holder_constant > 0.0))
        fail("domain.holder_constant" + at_line(r.line()) + ": must be positive");
}

void read_barrier(Reader& r, ExperimentConfig& cfg) {
    BarrierParams& p = cfg.barrier;
    p.alpha = r.number_req("barrier.alpha");
    cfg.line_barrier = r.line();
    if (!(p.alpha > 0.0) || !(p.alpha < 1.0))
        fail("barrier.alpha" + at_line(r.line()) + ": must lie in (0, 1)");
    if (auto e = r.number_opt("barrier.epsilon")) {
        p.epsilon = *e;
        cfg.epsilon_set = true;
        if (!(p.epsilon > 0.0) || !(p.epsilon < 1.0))
            fail("barrier.epsilon" + at_line(r.line()) + ": must lie in (0, 1)");
    } else {
        p.epsilon = p.alpha;
    }
    if (cfg.kind == ExperimentKind::holder || cfg.kind == ExperimentKind::key_lemma) {
        if (auto gm = r.number_opt("barrier.gamma")) {
            p.gamma = *gm;
            cfg.gamma_set = true;
            if (!(p.gamma >= 1.0))
                fail("barrier.gamma" + at_line(r.line()) + ": must be >= 1");
        }
        if (auto b = r.number_opt("barrier.beta_dil")) {
            p.beta_dil = *b;
            cfg.beta_set = true;
            if (!(p.beta_dil > 0.0))
                fail("barrier.beta_dil" + at_line(r.line()) + ": must be positive");
        }
    }
    if (cfg.kind == ExperimentKind::lipschitz) {
        p.c_demailly = r.number("barrier.c_demailly", 0.0);
        if (!(p.c_demailly >= 0.0))
            fail("barrier.c_demailly" + at_line(r.line()) + ": must be >= 0");
    }
    if (auto v = r.number_opt("barrier.r0")) {
        p.r0 = *v;
        cfg.r0_set = true;
        if (!(p.r0 > 0.0))
            fail("barrier.r0" + at_line(r.line()) + ": must be positive");
    }
    if (auto v = r.number_opt("barrier.t0")) {
        p.t0 = *v;
        cfg.t0_set = true;
        if (!(p.t0 > 0.0))
            fail("barrier.t0" + at_line(r.line()) + ": must be positive");
    }
    if (cfg.kind == ExperimentKind::holder || cfg.kind == ExperimentKind::lipschitz) {
        if (!(p.alpha + p.epsilon < 1.0))
            fail("barrier.alpha" + at_line(cfg.line_barrier) +
                 ": the decay-rate formulas require alpha + epsilon < 1");
    }
    cfg.has_barrier = true;
}

} // namespace

ExperimentConfig resolve_config(ConfigMap& map) {
    Reader r(map);
    ExperimentConfig cfg;

    const std::string kind_text = r.required("run.kind");
    const int kind_line = r.line();
    cfg.kind = parse_kind(kind_text, kind_line);
    read_run(r, cfg);
    check_expect(cfg, map.line_of("run.expect"));

    switch (cfg.kind) {
        case ExperimentKind::oracle: {
            const std::string dk = r.required("domain.kind");
            if (dk != "disc")
                fail("domain.kind" + at_line(r.line()) +
                     ": the oracle experiment runs on the unit disc, got '" + dk + "'");
            cfg.domain.kind = dk;
            cfg.domain.radius = r.number("domain.radius", 1.0);
            if (cfg.domain.radius != 1.0)
                fail("domain.radius" + at_line(r.line()) +
                     ": the oracle experiment requires radius 1");
            read_obstacle(r, cfg, 2);
            if (cfg.obstacle_center.x[0] != 0.0 || cfg.obstacle_center.x[1] != 0.0)
                fail("obstacle.center" + at_line(cfg.line_obstacle) +
                     ": the oracle obstacle must be centered at the origin");
            if (!(cfg.obstacle_radius < 1.0))
                fail("obstacle.radius" + at_line(cfg.line_obstacle) +
                     ": must be smaller than the disc radius");
            read_grid_spacing(r, cfg);
            read_ladder(r, cfg);
            break;
        }
        case ExperimentKind::holder:
        case ExperimentKind::lipschitz:
        case ExperimentKind::key_lemma: {
            read_graph_domain(r, cfg);
            read_obstacle(r, cfg, 2);
            read_grid_spacing(r, cfg);
            read_barrier(r, cfg);
            read_ladder(r, cfg);
            break;
        }
        case ExperimentKind::eta: {
            cfg.eta_text = r.required("barrier.eta");
            cfg.line_barrier = r.line();
            try {
                cfg.barrier.eta = EtaFunction::parse(cfg.eta_text);
            } catch (const ParameterError& e) {
                fail("barrier.eta" + at_line(r.line()) + ": " + e.what());
            }
            cfg.barrier.r0 = r.number_req("barrier.r0");
            cfg.r0_set = true;
            if (!(cfg.barrier.r0 > 0.0))
                fail("barrier.r0" + at_line(r.line()) + ": must be positive");
            cfg.has_barrier = true;
            break;
        }
        case ExperimentKind::hartogs: {
            const std::string dk = r.required("domain.kind");
            if (dk != "hartogs")
                fail("domain.kind" + at_line(r.line()) +
                     ": the hartogs experiment requires domain.kind = hartogs");
            cfg.domain.kind = dk;
            read_obstacle(r, cfg, 4);
            read_grid_fixed_box(r, cfg, 4);
            read_ladder(r, cfg);
            if (auto lv = r.optional("run.exhaustion_levels")) {
                cfg.exhaustion_levels =
                    to_double_list("run.exhaustion_levels", *lv,
                                   map.line_of("run.exhaustion_levels"));
                for (std::size_t i = 0; i < cfg.exhaustion_levels.size(); ++i) {
                    if (!(cfg.exhaustion_levels[i] > 0.0))
                        fail("run.exhaustion_levels" +
                             at_line(map.line_of("run.exhaustion_levels")) +
                             ": levels must be positive");
                    if (i > 0 && !(cfg.exhaustion_levels[i] < cfg.exhaustion_levels[i - 1]))
                        fail("run.exhaustion_levels" +
                             at_line(map.line_of("run.exhaustion_levels")) +
                             ": levels must be strictly decreasing");
                }
            }
            break;
        }
    }

    const std::vector<std::string> leftover = map.unused();
    if (!leftover.empty()) {
        std::string joined;
        for (const auto& k : leftover) joined += (joined.empty() ? "" : ", ") + k;
        fail("unknown or inapplicable key(s) for kind '" + to_string(cfg.kind) +
             "': " + joined);
    }
    return cfg;
}

} // namespace rholab
