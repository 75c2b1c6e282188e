#pragma once

#include "rholab/common.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rholab {

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

enum class DomainKind {
    ball,             // |z - c| < R, complex dimension 1 or 2
    annulus,          // r_in < |z| < r_out, complex dimension 1
    polydisc,         // |z1| < r1 and |z2| < r2
    hartogs_triangle, // |z1| < |z2| < 1
    graph,            // {|z| < radius, Im z < g(Re z)}, complex dimension 1
};

/// Axis-aligned box enclosing a domain, one [lo, hi] pair per real axis.
struct BoundingBox {
    std::array<double, 4> lo{};
    std::array<double, 4> hi{};
};

/// Closed-form profiles available for graph domains.
enum class GraphForm {
    zero,         // g(x) = 0          (flat wall; Lipschitz, beta = 1)
    neg_abs,      // g(x) = -|x|       (corner; Lipschitz, beta = 1)
    neg_sqrt_abs, // g(x) = -sqrt(|x|) (cusp; Hoelder, beta = 1/2)
    samples,      // piecewise-linear interpolation of tabulated values
};

/// Parameters for a graph domain {|z| < radius, Im z < g(Re z)}.
///
/// `radius` is the radius of the ball on which the domain is studied;
/// `data_radius` is the (strictly larger) radius on which the profile g is
/// known, which caps how far the domain can be dilated outward.  The Hoelder
/// data (exponent in (0,1], constant > 0) certify
/// |g(x) - g(x')| <= holder_constant * |x - x'|^holder_exponent.
struct GraphSpec {
    GraphForm form = GraphForm::zero;
    std::vector<std::array<double, 2>> samples; // rows (x, g(x)), ascending x
    double holder_exponent = 1.0;
    double holder_constant = 1.0;
    double radius = 1.0;
    double data_radius = 2.0;
};

class Domain {
  public:
    virtual ~Domain() = default;

    virtual DomainKind kind() const = 0;
    /// Complex dimension (1 or 2).
    virtual int cdim() const = 0;
    /// Number of real coordinates (2 * cdim()).
    int rdim() const { return 2 * cdim(); }

    /// Open-set membership.
    virtual bool contains(const Point& z) const = 0;

    /// Distance from an interior point to the boundary.
    /// Throws DomainError when z lies outside the domain.
    virtual double boundary_distance(const Point& z) const = 0;

    /// Upper bound on the absolute error of boundary_distance values
    /// (zero when the distance is evaluated in closed form).
    virtual double distance_slack() const { return 0.0; }

    virtual BoundingBox bounding_box() const = 0;

    /// First parameter in (0, limit] at which the segment z + tau*dir leaves
    /// the domain, if any.  `dir` need not be normalized; tau is measured in
    /// units of |dir|... callers pass unit directions so tau is a length.
    /// Requires contains(z).
    virtual std::optional<double> ray_exit(const Point& z, const Point& dir,
                                           double limit) const;

    virtual std::unique_ptr<Domain> clone() const = 0;

    /// Human-readable one-line description for reports.
    virtual std::string describe() const = 0;
};

class BallDomain final : public Domain {
  public:
    BallDomain(int cdim, Point center, double radius);

    DomainKind kind() const override { return DomainKind::ball; }
    int cdim() const override { return cdim_; }
    bool contains(const Point& z) const override;
    double boundary_distance(const Point& z) const override;
    BoundingBox bounding_box() const override;
    std::optional<double> ray_exit(const Point& z, const Point& dir,
                                   double limit) const override;
    std::unique_ptr<Domain> clone() const override;
    std::string describe() const override;

    const Point& center() const { return center_; }
    double radius() const { return radius_; }

  private:
    int cdim_;
    Point center_;
    double radius_;
};

class AnnulusDomain final : public Domain {
  public:
    AnnulusDomain(double inner, double outer);

    DomainKind kind() const override { return DomainKind::annulus; }
    int cdim() const override { return 1; }
    bool contains(const Point& z) const override;
    double boundary_distance(const Point& z) const override;
    BoundingBox bounding_box() const override;
    std::optional<double> ray_exit(const Point& z, const Point& dir,
                                   double limit) const override;
    std::unique_ptr<Domain> clone() const override;
    std::string describe() const override;

    double inner() const { return inner_; }
    double outer() const { return outer_; }

  private:
    double inner_;
    double outer_;
};

class PolydiscDomain final : public Domain {
  public:
    PolydiscDomain(double r1, double r2);

    DomainKind kind() const override { return DomainKind::polydisc; }
    int cdim() const override { return 2; }
    bool contains(const Point& z) const override;
    double boundary_distance(const Point& z) const override;
    BoundingBox bounding_box() const override;
    std::optional<double> ray_exit(const Point& z, const Point& dir,
                                   double limit) const override;
    std::unique_ptr<Domain> clone() const override;
    std::string describe() const override;

    double r1() const { return r1_; }
    double r2() const { return r2_; }

  private:
    double r1_;
    double r2_;
};

/// The model non-hyperconvex domain {|z1| < |z2| < 1} in C^2.
class HartogsTriangleDomain final : public Domain {
  public:
    HartogsTriangleDomain() = default;

    DomainKind kind() const override { return DomainKind::hartogs_triangle; }
    int cdim() const override { return 2; }
    bool contains(const Point& z) const override;
    double boundary_distance(const Point& z) const override;
    BoundingBox bounding_box() const override;
    std::optional<double> ray_exit(const Point& z, const Point& dir,
                                   double limit) const override;
    std::unique_ptr<Domain> clone() const override;
    std::string describe() const override;
};

/// Piecewise-linear interpolant of tabulated (x, g(x)) rows with a certified
/// Hoelder modulus.  Also evaluates the closed-form profiles.
class GraphProfile {
  public:
    explicit GraphProfile(const GraphSpec& spec);

    double operator()(double x) const;
    const GraphSpec& spec() const { return spec_; }

    /// Largest value of g on [-r, r] (exact for closed forms, sampled for
    /// tabulated profiles).
    double max_on(double r) const;

  private:
    GraphSpec spec_;
};

/// {x + i y : x^2 + y^2 < radius^2, y < g(x)}, a bounded domain under a
/// Hoelder graph.  Boundary distances for curved profiles are computed from a
/// refined boundary sample cloud; the flat profile g = 0 uses closed forms.
class GraphDomain final : public Domain {
  public:
    /// `dilation` shifts the graph up and widens the ball: the domain becomes
    /// {|z| < radius + dilation, y < g(x) + dilation}.  Requires
    /// dilation <= data_radius - radius so that g stays within its data.
    explicit GraphDomain(GraphSpec spec, double dilation = 0.0);

    DomainKind kind() const override { return DomainKind::graph; }
    int cdim() const override { return 1; }
    bool contains(const Point& z) const override;
    double boundary_distance(const Point& z) const override;
    double distance_slack() const override;
    BoundingBox bounding_box() const override;
    std::optional<double> ray_exit(const Point& z, const Point& dir,
                                   double limit) const override;
    std::unique_ptr<Domain> clone() const override;
    std::string describe() const override;

    const GraphSpec& spec() const { return spec_; }
    double dilation() const { return dilation_; }
    double effective_radius() const { return spec_.radius + dilation_; }
    double g(double x) const { return profile_(x) + dilation_; }

    /// Points sampled densely along the boundary (graph arc + circular arc),
    /// used by distance queries and by dilation certificates.
    const std::vector<Point>& boundary_cloud() const { return cloud_; }

  private:
    struct CloudSample {
        double x0, y0;  // position
        double param;   // graph abscissa, or arc angle
        bool on_graph;  // true: graph piece, false: circular arc
    };

    double refine_distance(const Point& z, const CloudSample& s,
                           double coarse) const;
    void build_cloud();

    GraphSpec spec_;
    GraphProfile profile_;
    double dilation_;
    bool flat_; // g identically zero: closed-form distances
    std::vector<Point> cloud_;
    std::vector<CloudSample> samples_; // graph-piece samples only
    double cloud_step_ = 0.0;          // arclength step between cloud samples
    double x_left_ = 0.0, x_right_ = 0.0;   // graph-piece abscissa range
    double theta_left_ = 0.0, arc_len_ = 0.0; // arc start angle / angular length
    // uniform bucket grid over the graph samples for nearest-sample lookup
    double bucket_size_ = 0.0;
    int bx_ = 0, by_ = 0;
    double box_lo_[2] = {0, 0};
    std::vector<std::vector<std::uint32_t>> buckets_;
};

/// Outward dilation of a graph domain by t (graph raised by t, ball radius
/// widened by t).  Requires 0 < t <= data_radius - radius.
std::unique_ptr<Domain> dilated_domain(const Domain& d, double t);

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

/// Uniform lattice covering the bounding box of a domain (plus `padding`
/// ghost layers on every side), with per-node interior flags and boundary
/// distances.  Nodes are indexed row-major; axis 0 is the slowest.
class Grid {
  public:
    Grid(const Domain& domain, double spacing, int padding = 2);

    /// Alternative constructor pinning the node count per axis: the box
    /// [lo, hi] is covered by exactly `nodes_per_axis` nodes on each axis
    /// with no padding (used for fixed-size lattices).
    Grid(const Domain& domain, const BoundingBox& box, int nodes_per_axis);

    int rdim() const { return rdim_; }
    double spacing() const { return h_; }
    std::size_t total_nodes() const { return total_; }
    std::size_t interior_count() const { return interior_count_; }
    int count(int axis) const { return cnt_[axis]; }
    double origin(int axis) const { return lo_[axis]; }
    std::ptrdiff_t stride(int axis) const { return stride_[axis]; }

    const Domain& domain() const { return *domain_; }

    Point node(std::size_t idx) const;
    std::size_t index(const std::array<int, 4>& ijk) const;
    std::array<int, 4> coords(std::size_t idx) const;

    bool is_inside(std::size_t idx) const { return inside_[idx] != 0; }
    double delta(std::size_t idx) const { return delta_[idx]; }
    const std::vector<std::uint8_t>& inside_mask() const { return inside_; }
    const std::vector<double>& delta_field() const { return delta_; }

    /// Largest boundary distance attained on the lattice.
    double max_delta() const { return max_delta_; }

  private:
    void build(const Domain& domain);

    std::unique_ptr<Domain> domain_;
    int rdim_;
    double h_;
    std::size_t total_ = 0;
    std::size_t interior_count_ = 0;
    double lo_[4] = {0, 0, 0, 0};
    int cnt_[4] = {1, 1, 1, 1};
    std::ptrdiff_t stride_[4] = {0, 0, 0, 0};
    std::vector<std::uint8_t> inside_;
    std::vector<double> delta_;
    double max_delta_ = 0.0;
};

/// Node sets cut out of a grid at threshold t: the deep part {delta > t},
/// the shell {delta <= shell_factor * t}, and the band {|delta - t| <= h}.
struct SublevelSets {
    std::vector<std::uint32_t> deep;  // interior nodes with delta > t
    std::vector<std::uint32_t> shell; // interior nodes with delta <= shell_factor*t
    std::vector<std::uint32_t> band;  // interior nodes with |delta - t| <= h
};

/// Partition the interior nodes of `g` at threshold t.  `shell_factor` scales
/// the shell cut (shell = {delta <= shell_factor * t}); 1.0 makes the shell
/// the complement of the deep part.  Requires t > 0.
SublevelSets sublevel_region(const Grid& g, double t, double shell_factor = 1.0);

// ---------------------------------------------------------------------------
// Dilation certificates
// ---------------------------------------------------------------------------

/// Per-level record of how far the dilated boundary moved from the base
/// boundary, checked against the law  lower * t^gamma <= gap <= upper * t.
struct DilationLevelReport {
    double t = 0.0;
    double min_gap = 0.0;   // min over base-boundary samples of dist to dilated bdry
    double max_gap = 0.0;   // max over the same samples
    double lower_bound = 0.0; // required floor: beta_dil * t^gamma
    double upper_bound = 0.0; // required cap (one dilation step cannot exceed it)
    bool pass = false;
};

struct DilationReport {
    double beta_dil = 0.0;
    double gamma = 0.0;
    std::vector<DilationLevelReport> levels;
    bool pass = false;
};

/// Certify, for each t in `ts`, that every base-boundary point lies at
/// distance in [beta_dil * t^gamma, upper * t] from the complement of the
/// dilated domain.  `beta_dil` and `gamma` derive from the Hoelder data:
/// gamma = 1 / holder_exponent capped at 1 for exponent 1, and
/// beta_dil = min(1/2, (2 * holder_constant)^(-1/holder_exponent)) for
/// curved profiles, 1 for the flat profile.
DilationReport verify_dilation_bounds(const Domain& d,
                                      const std::vector<double>& ts);

/// The dilation-law exponent gamma = 1 / holder_exponent for a graph domain
/// (1 for non-graph domains, which are not dilated).
double dilation_gamma(const Domain& d);

/// The dilation-law constant beta_dil for a graph domain.
double dilation_beta(const Domain& d);

} // namespace rholab
