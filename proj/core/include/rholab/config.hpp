#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rholab/barriers.hpp"
#include "rholab/geometry.hpp"

namespace rholab {

/// One `key = value` occurrence with its source line.
struct ConfigEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

/// Line-based config text: `[section]` headers group `key = value` lines,
/// stored flat under dotted names ("section.key"). Full-line comments start
/// with '#'. Duplicate keys, keys outside a section, and malformed lines are
/// rejected at parse time; keys never consumed by the resolver are reported
/// as unknown afterwards.
class ConfigMap {
  public:
    static ConfigMap parse_text(const std::string& text);
    static ConfigMap parse_file(const std::string& path);

    /// Looks up a dotted key, marking it consumed.
    std::optional<std::string> take(const std::string& dotted);
    bool has(const std::string& dotted) const;
    int line_of(const std::string& dotted) const;

    /// Inserts or replaces a value (command-line overrides); the entry starts
    /// unconsumed so the resolver validates it like any file-borne value.
    void override_value(const std::string& dotted, const std::string& value);

    /// Dotted names of entries never consumed, with line numbers.
    std::vector<std::string> unused() const;

  private:
    std::map<std::string, ConfigEntry> entries_;
};

enum class ExperimentKind { oracle, holder, lipschitz, eta, hartogs, key_lemma };

std::string to_string(ExperimentKind k);

struct LadderSpec {
    double t_min = 0.0;
    double t_max = 0.0;
    int per_decade = 8;
};

/// Geometric ladder t_k = t_max * 10^(-k/per_decade) descending until t_min,
/// returned ascending. t_min is appended as a final rung when the geometric
/// sequence does not land on it (within 1e-9 relative).
std::vector<double> build_ladder(const LadderSpec& spec);

struct DomainConfig {
    std::string kind; // disc | ball2 | annulus | polydisc | hartogs | graph
    double radius = 1.0;
    double radius2 = 1.0;      // polydisc second radius
    double inner_radius = 0.0; // annulus
    GraphSpec graph;           // graph domains
};

struct GridConfig {
    double spacing = 0.0; // spacing-driven build (padding layers around the box)
    int padding = 2;
    int nodes_per_axis = 0; // fixed-box build when > 0
    BoundingBox box;
    bool fixed_box = false;
};

/// A fully resolved experiment description. Defaults that need the built
/// domain (gamma, beta_dil, r0, t0) are filled by the runner; the *_set
/// flags record whether the config pinned them explicitly.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::oracle;
    std::string expect; // optional expected outcome token
    double tol = 1e-8;
    long max_iter = 200000;
    std::vector<double> exhaustion_levels;

    DomainConfig domain;

    Point obstacle_center;
    double obstacle_radius = 0.0;
    bool has_obstacle = false;

    GridConfig grid;

    BarrierParams barrier;
    bool has_barrier = false;
    bool gamma_set = false;
    bool beta_set = false;
    bool epsilon_set = false;
    bool r0_set = false;
    bool t0_set = false;
    std::string eta_text;

    LadderSpec ladder;
    bool has_ladder = false;

    // Source lines for late (geometry-dependent) diagnostics.
    int line_obstacle = 0;
    int line_grid = 0;
    int line_ladder = 0;
    int line_barrier = 0;
};

/// Validates structure, ranges, and kind-specific key admissibility; throws
/// ConfigError with line references on any problem, including keys that the
/// experiment kind does not accept.
ExperimentConfig resolve_config(ConfigMap& map);

} // namespace rholab
