#include "rholab/geometry.hpp"

#include "rholab/numerics.hpp"
#include "rholab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rholab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double sq(double v) { return v * v; }

// First tau > eps with |p2 + tau*d2| = R in a fixed real 2-plane.
std::optional<double> circle_crossing(double px, double py, double dx, double dy,
                                      double R, double eps) {
    return smallest_root_above(dx * dx + dy * dy, 2.0 * (px * dx + py * dy),
                               px * px + py * py - R * R, eps);
}

void keep_min(std::optional<double>& best, std::optional<double> cand, double limit) {
    if (cand && *cand <= limit && (!best || *cand < *best)) best = cand;
}

double wrap_nonneg(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// Domain base
// ---------------------------------------------------------------------------

std::optional<double> Domain::ray_exit(const Point& z, const Point& dir,
                                       double limit) const {
    // Generic fallback: scan for the first sign change of membership along
    // the segment, then bisect. The scan resolution bounds how shallow an
    // excursion outside the domain can be and still be detected.
    constexpr int kScan = 16;
    double prev = 0.0;
    for (int k = 1; k <= kScan; ++k) {
        const double t = limit * static_cast<double>(k) / kScan;
        if (!contains(z + dir * t)) {
            double a = prev, b = t;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                if (contains(z + dir * m))
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

// ---------------------------------------------------------------------------
// Ball
// ---------------------------------------------------------------------------

BallDomain::BallDomain(int cdim, Point center, double radius)
    : cdim_(cdim), center_(center), radius_(radius) {
    if (cdim != 1 && cdim != 2) throw ParameterError("ball: cdim must be 1 or 2");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw ParameterError("ball: radius must be positive and finite");
    center_.n = cdim;
}

bool BallDomain::contains(const Point& z) const {
    return (z - center_).norm() < radius_;
}

double BallDomain::boundary_distance(const Point& z) const {
    const double d = radius_ - (z - center_).norm();
    if (d <= 0.0) throw DomainError("ball: point is not interior");
    return d;
}

BoundingBox BallDomain::bounding_box() const {
    BoundingBox b;
    for (int a = 0; a < rdim(); ++a) {
        b.lo[a] = center_.x[a] - radius_;
        b.hi[a] = center_.x[a] + radius_;
    }
    return b;
}

std::optional<double> BallDomain::ray_exit(const Point& z, const Point& dir,
                                           double limit) const {
    const Point p = z - center_;
    std::optional<double> best;
    keep_min(best,
             smallest_root_above(dir.norm2(), 2.0 * p.dot(dir),
                                 p.norm2() - radius_ * radius_, 0.0),
             limit);
    return best;
}

std::unique_ptr<Domain> BallDomain::clone() const {
    return std::make_unique<BallDomain>(*this);
}

std::string BallDomain::describe() const {
    std::ostringstream os;
    os << "ball(cdim=" << cdim_ << ", radius=" << radius_ << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// Annulus
// ---------------------------------------------------------------------------

AnnulusDomain::AnnulusDomain(double inner, double outer)
    : inner_(inner), outer_(outer) {
    if (!(0.0 < inner && inner < outer) || !std::isfinite(outer))
        throw ParameterError("annulus: need 0 < inner < outer < inf");
}

bool AnnulusDomain::contains(const Point& z) const {
    const double r = z.cmod(0);
    return inner_ < r && r < outer_;
}

double AnnulusDomain::boundary_distance(const Point& z) const {
    const double r = z.cmod(0);
    const double d = std::min(r - inner_, outer_ - r);
    if (d <= 0.0) throw DomainError("annulus: point is not interior");
    return d;
}

BoundingBox AnnulusDomain::bounding_box() const {
    BoundingBox b;
    b.lo[0] = b.lo[1] = -outer_;
    b.hi[0] = b.hi[1] = outer_;
    return b;
}

std::optional<double> AnnulusDomain::ray_exit(const Point& z, const Point& dir,
                                              double limit) const {
    std::optional<double> best;
    keep_min(best, circle_crossing(z.x[0], z.x[1], dir.x[0], dir.x[1], outer_, 0.0),
             limit);
    keep_min(best, circle_crossing(z.x[0], z.x[1], dir.x[0], dir.x[1], inner_, 0.0),
             limit);
    return best;
}

std::unique_ptr<Domain> AnnulusDomain::clone() const {
    return std::make_unique<AnnulusDomain>(*this);
}

std::string AnnulusDomain::describe() const {
    std::ostringstream os;
    os << "annulus(inner=" << inner_ << ", outer=" << outer_ << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// Polydisc
// ---------------------------------------------------------------------------

PolydiscDomain::PolydiscDomain(double r1, double r2) : r1_(r1), r2_(r2) {
    if (!(r1 > 0.0) || !(r2 > 0.0) || !std::isfinite(r1) || !std::isfinite(r2))
        throw ParameterError("polydisc: radii must be positive and finite");
}

bool PolydiscDomain::contains(const Point& z) const {
    return z.cmod(0) < r1_ && z.cmod(1) < r2_;
}

double PolydiscDomain::boundary_distance(const Point& z) const {
    const double d = std::min(r1_ - z.cmod(0), r2_ - z.cmod(1));
    if (d <= 0.0) throw DomainError("polydisc: point is not interior");
    return d;
}

BoundingBox PolydiscDomain::bounding_box() const {
    BoundingBox b;
    b.lo[0] = b.lo[1] = -r1_;
    b.hi[0] = b.hi[1] = r1_;
    b.lo[2] = b.lo[3] = -r2_;
    b.hi[2] = b.hi[3] = r2_;
    return b;
}

std::optional<double> PolydiscDomain::ray_exit(const Point& z, const Point& dir,
                                               double limit) const {
    std::optional<double> best;
    keep_min(best, circle_crossing(z.x[0], z.x[1], dir.x[0], dir.x[1], r1_, 0.0),
             limit);
    keep_min(best, circle_crossing(z.x[2], z.x[3], dir.x[2], dir.x[3], r2_, 0.0),
             limit);
    return best;
}

std::unique_ptr<Domain> PolydiscDomain::clone() const {
    return std::make_unique<PolydiscDomain>(*this);
}

std::string PolydiscDomain::describe() const {
    std::ostringstream os;
    os << "polydisc(r1=" << r1_ << ", r2=" << r2_ << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// Hartogs triangle
// ---------------------------------------------------------------------------

bool HartogsTriangleDomain::contains(const Point& z) const {
    const double m1 = z.cmod(0), m2 = z.cmod(1);
    return m1 < m2 && m2 < 1.0;
}

double HartogsTriangleDomain::boundary_distance(const Point& z) const {
    // Distance to the complement is the lesser of the distance to the cone
    // {|z1| >= |z2|} (attained in the 2-plane spanned by the two moduli,
    // value (|z2|-|z1|)/sqrt(2)) and the distance to {|z2| >= 1}.
    const double m1 = z.cmod(0), m2 = z.cmod(1);
    const double d = std::min((m2 - m1) / std::sqrt(2.0), 1.0 - m2);
    if (d <= 0.0 || !(m1 < m2)) throw DomainError("hartogs: point is not interior");
    return d;
}

BoundingBox HartogsTriangleDomain::bounding_box() const {
    BoundingBox b;
    for (int a = 0; a < 4; ++a) {
        b.lo[a] = -1.0;
        b.hi[a] = 1.0;
    }
    return b;
}

std::optional<double> HartogsTriangleDomain::ray_exit(const Point& z, const Point& dir,
                                                      double limit) const {
    std::optional<double> best;
    // outer cylinder |z2 + tau*d2| = 1
    keep_min(best, circle_crossing(z.x[2], z.x[3], dir.x[2], dir.x[3], 1.0, 0.0),
             limit);
    // cone |z1 + tau*d1| = |z2 + tau*d2|, i.e. a real quadratic in tau
    const double a = (sq(dir.x[0]) + sq(dir.x[1])) - (sq(dir.x[2]) + sq(dir.x[3]));
    const double b = 2.0 * ((z.x[0] * dir.x[0] + z.x[1] * dir.x[1]) -
                            (z.x[2] * dir.x[2] + z.x[3] * dir.x[3]));
    const double c = (sq(z.x[0]) + sq(z.x[1])) - (sq(z.x[2]) + sq(z.x[3]));
    keep_min(best, smallest_root_above(a, b, c, 0.0), limit);
    return best;
}

std::unique_ptr<Domain> HartogsTriangleDomain::clone() const {
    return std::make_unique<HartogsTriangleDomain>(*this);
}

std::string HartogsTriangleDomain::describe() const {
    return "hartogs_triangle(|z1| < |z2| < 1)";
}

// ---------------------------------------------------------------------------
// Graph profile
// ---------------------------------------------------------------------------

GraphProfile::GraphProfile(const GraphSpec& spec) : spec_(spec) {
    if (!(spec_.radius > 0.0) || !std::isfinite(spec_.radius))
        throw ParameterError("graph: radius must be positive and finite");
    if (!(spec_.data_radius > spec_.radius))
        throw ParameterError("graph: data_radius must exceed radius");
    if (!(spec_.holder_exponent > 0.0) || !(spec_.holder_exponent <= 1.0))
        throw ParameterError("graph: holder_exponent must lie in (0, 1]");
    if (!(spec_.holder_constant > 0.0) || !std::isfinite(spec_.holder_constant))
        throw ParameterError("graph: holder_constant must be positive");

    std::vector<double> pts;
    if (spec_.form == GraphForm::samples) {
        if (spec_.samples.size() < 2)
            throw ParameterError("graph: sampled profile needs at least 2 rows");
        for (std::size_t i = 0; i < spec_.samples.size(); ++i) {
            if (!std::isfinite(spec_.samples[i][0]) || !std::isfinite(spec_.samples[i][1]))
                throw ParameterError("graph: sampled profile has a non-finite entry");
            if (i > 0 && !(spec_.samples[i][0] > spec_.samples[i - 1][0]))
                throw ParameterError("graph: sample abscissas must be strictly increasing");
        }
        if (spec_.samples.front()[0] > -spec_.data_radius ||
            spec_.samples.back()[0] < spec_.data_radius)
            throw ParameterError("graph: samples must cover [-data_radius, data_radius]");
        for (std::size_t i = 0; i + 1 < spec_.samples.size(); ++i) {
            pts.push_back(spec_.samples[i][0]);
            pts.push_back(0.5 * (spec_.samples[i][0] + spec_.samples[i + 1][0]));
        }
        pts.push_back(spec_.samples.back()[0]);
        if (pts.size() > 2000) {
            std::vector<double> thin;
            const std::size_t step = pts.size() / 2000 + 1;
            for (std::size_t i = 0; i < pts.size(); i += step) thin.push_back(pts[i]);
            thin.push_back(pts.back());
            pts.swap(thin);
        }
    } else {
        const int m = 512;
        for (int i = 0; i <= m; ++i)
            pts.push_back(-spec_.data_radius +
                          (2.0 * spec_.data_radius) * static_cast<double>(i) / m);
    }

    // Certify the declared modulus of continuity on the check lattice.
    const double c = spec_.holder_constant, beta = spec_.holder_exponent;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double gi = (*this)(pts[i]);
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double dx = std::abs(pts[j] - pts[i]);
            const double bound = c * std::pow(dx, beta);
            if (std::abs((*this)(pts[j]) - gi) > bound * (1.0 + 1e-9) + 1e-12) {
                std::ostringstream os;
                os << "graph: profile violates |g(x)-g(x')| <= " << c << "*|x-x'|^"
                   << beta << " at x=" << pts[i] << ", x'=" << pts[j];
                throw ParameterError(os.str());
            }
        }
    }
}

double GraphProfile::operator()(double x) const {
    switch (spec_.form) {
    case GraphForm::zero:
        return 0.0;
    case GraphForm::neg_abs:
        return -std::abs(x);
    case GraphForm::neg_sqrt_abs:
        return -std::sqrt(std::abs(x));
    case GraphForm::samples: {
        const auto& s = spec_.samples;
        if (x <= s.front()[0]) return s.front()[1];
        if (x >= s.back()[0]) return s.back()[1];
        auto it = std::upper_bound(
            s.begin(), s.end(), x,
            [](double v, const std::array<double, 2>& row) { return v < row[0]; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (x - lo[0]) / (hi[0] - lo[0]);
        return lo[1] + w * (hi[1] - lo[1]);
    }
    }
    throw ParameterError("graph: unknown profile form");
}

double GraphProfile::max_on(double r) const {
    if (spec_.form != GraphForm::samples) return 0.0; // all closed forms peak at 0
    double m = std::max((*this)(-r), (*this)(r));
    for (const auto& row : spec_.samples)
        if (row[0] > -r && row[0] < r) m = std::max(m, row[1]);
    return m;
}

// ---------------------------------------------------------------------------
// Graph domain
// ---------------------------------------------------------------------------

GraphDomain::GraphDomain(GraphSpec spec, double dilation)
    : spec_(std::move(spec)), profile_(spec_), dilation_(dilation),
      flat_(spec_.form == GraphForm::zero) {
    if (!(dilation >= 0.0) || !std::isfinite(dilation))
        throw ParameterError("graph: dilation must be >= 0");
    if (dilation > spec_.data_radius - spec_.radius + 1e-12)
        throw ParameterError("graph: dilation exceeds data_radius - radius");
    const double R = effective_radius();
    const double g0 = g(0.0);
    if (!(g0 > -R) || !(g0 < R))
        throw ParameterError("graph: profile must cut the ball at x = 0");
    build_cloud();
}

bool GraphDomain::contains(const Point& z) const {
    const double R = effective_radius();
    if (z.x[0] * z.x[0] + z.x[1] * z.x[1] >= R * R) return false;
    return z.x[1] < g(z.x[0]);
}

double GraphDomain::distance_slack() const {
    return flat_ ? 0.0 : 0.5 * cloud_step_;
}

BoundingBox GraphDomain::bounding_box() const {
    const double R = effective_radius();
    BoundingBox b;
    b.lo[0] = -R;
    b.hi[0] = R;
    b.lo[1] = -R;
    b.hi[1] = std::min(R, profile_.max_on(R) + dilation_);
    return b;
}

void GraphDomain::build_cloud() {
    const double R = effective_radius();

    // Abscissas where the graph meets the circle, found as the first sign
    // change of x^2 + g(x)^2 - R^2 away from x = 0.
    const auto F = [&](double x) { return x * x + sq(g(x)) - R * R; };
    const auto first_crossing = [&](double sign) {
        const int n = 4096;
        double prev = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double x = sign * R * static_cast<double>(k) / n;
            if (F(x) >= 0.0) {
                double a = prev, b = x;
                for (int it = 0; it < 80; ++it) {
                    const double m = 0.5 * (a + b);
                    if (F(m) < 0.0)
                        a = m;
                    else
                        b = m;
                }
                return 0.5 * (a + b);
            }
            prev = x;
        }
        return sign * R;
    };
    x_right_ = first_crossing(1.0);
    x_left_ = first_crossing(-1.0);

    const double yr = g(x_right_), yl = g(x_left_);
    const double theta_r = std::atan2(yr, x_right_);
    theta_left_ = std::atan2(yl, x_left_);
    arc_len_ = wrap_nonneg(theta_r - theta_left_);
    if (arc_len_ == 0.0) arc_len_ = kTwoPi; // profile fully outside: whole circle

    cloud_step_ = std::max(2e-3, 2e-3 * R);

    cloud_.clear();
    samples_.clear();
    const int mg = std::max(8, static_cast<int>(std::ceil((x_right_ - x_left_) / cloud_step_)));
    for (int i = 0; i <= mg; ++i) {
        const double x = x_left_ + (x_right_ - x_left_) * static_cast<double>(i) / mg;
        CloudSample s{x, g(x), x, true};
        samples_.push_back(s);
        cloud_.push_back(Point::c1(s.x0, s.y0));
    }
    const int ma = std::max(8, static_cast<int>(std::ceil(R * arc_len_ / cloud_step_)));
    for (int i = 1; i < ma; ++i) { // endpoints already present as graph samples
        const double phi = theta_left_ + arc_len_ * static_cast<double>(i) / ma;
        cloud_.push_back(Point::c1(R * std::cos(phi), R * std::sin(phi)));
    }

    // Bucket the graph samples for nearest-sample lookup.
    double xlo = samples_.front().x0, xhi = samples_.front().x0;
    double ylo = samples_.front().y0, yhi = samples_.front().y0;
    for (const auto& s : samples_) {
        xlo = std::min(xlo, s.x0);
        xhi = std::max(xhi, s.x0);
        ylo = std::min(ylo, s.y0);
        yhi = std::max(yhi, s.y0);
    }
    bucket_size_ = 8.0 * cloud_step_;
    box_lo_[0] = xlo;
    box_lo_[1] = ylo;
    bx_ = std::max(1, static_cast<int>((xhi - xlo) / bucket_size_) + 1);
    by_ = std::max(1, static_cast<int>((yhi - ylo) / bucket_size_) + 1);
    buckets_.assign(static_cast<std::size_t>(bx_) * by_, {});
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        int cx = static_cast<int>((samples_[i].x0 - box_lo_[0]) / bucket_size_);
        int cy = static_cast<int>((samples_[i].y0 - box_lo_[1]) / bucket_size_);
        cx = std::clamp(cx, 0, bx_ - 1);
        cy = std::clamp(cy, 0, by_ - 1);
        buckets_[static_cast<std::size_t>(cy) * bx_ + cx].push_back(
            static_cast<std::uint32_t>(i));
    }
}

double GraphDomain::refine_distance(const Point& z, const CloudSample& s,
                                    double coarse) const {
    // Golden-section refinement of the squared distance to the graph piece
    // over one cloud step on either side of the winning sample.
    const auto f = [&](double x) {
        return sq(x - z.x[0]) + sq(g(x) - z.x[1]);
    };
    double a = std::max(x_left_, s.param - cloud_step_);
    double b = std::min(x_right_, s.param + cloud_step_);
    if (!(b > a)) return coarse;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return std::min(coarse, std::sqrt(std::min(f1, f2)));
}

double GraphDomain::boundary_distance(const Point& z) const {
    if (!contains(z)) throw DomainError("graph: point is not interior");
    const double R = effective_radius();

    if (flat_) {
        // Intersection of the disc with a half-plane: the distance to the
        // complement is the lesser of the two face distances.
        return std::min(R - std::hypot(z.x[0], z.x[1]), dilation_ - z.x[1]);
    }

    // Exact distance to the circular-arc piece.
    const double r = std::hypot(z.x[0], z.x[1]);
    const double phi = std::atan2(z.x[1], z.x[0]);
    double arc_d;
    if (wrap_nonneg(phi - theta_left_) <= arc_len_) {
        arc_d = R - r; // radial projection lands on the arc
    } else {
        const double pr = wrap_nonneg(theta_left_ + arc_len_);
        const double ex0 = R * std::cos(theta_left_), ey0 = R * std::sin(theta_left_);
        const double ex1 = R * std::cos(pr), ey1 = R * std::sin(pr);
        arc_d = std::sqrt(std::min(sq(z.x[0] - ex0) + sq(z.x[1] - ey0),
                                   sq(z.x[0] - ex1) + sq(z.x[1] - ey1)));
    }

    // Nearest graph sample via the bucket grid, then local refinement.
    const int cx = std::clamp(
        static_cast<int>((z.x[0] - box_lo_[0]) / bucket_size_), 0, bx_ - 1);
    const int cy = std::clamp(
        static_cast<int>((z.x[1] - box_lo_[1]) / bucket_size_), 0, by_ - 1);
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_idx = 0;
    const int rmax = std::max(bx_, by_);
    for (int ring = 0; ring <= rmax; ++ring) {
        if (best < std::numeric_limits<double>::infinity() &&
            (static_cast<double>(ring) - 1.5) * bucket_size_ > std::sqrt(best))
            break;
        for (int dy = -ring; dy <= ring; ++dy) {
            const int yy = cy + dy;
            if (yy < 0 || yy >= by_) continue;
            const int step = (std::abs(dy) == ring) ? 1 : 2 * ring;
            for (int dx = -ring; dx <= ring; dx += (step == 0 ? 1 : step)) {
                const int xx = cx + dx;
                if (xx < 0 || xx >= bx_) continue;
                for (std::uint32_t idx : buckets_[static_cast<std::size_t>(yy) * bx_ + xx]) {
                    const auto& s = samples_[idx];
                    const double d2 = sq(s.x0 - z.x[0]) + sq(s.y0 - z.x[1]);
                    if (d2 < best) {
                        best = d2;
                        best_idx = idx;
                    }
                }
                if (ring == 0) break;
            }
        }
    }
    double graph_d = std::numeric_limits<double>::infinity();
    if (best < std::numeric_limits<double>::infinity())
        graph_d = refine_distance(z, samples_[best_idx], std::sqrt(best));

    return std::min(arc_d, graph_d);
}

std::optional<double> GraphDomain::ray_exit(const Point& z, const Point& dir,
                                            double limit) const {
    if (!flat_) return Domain::ray_exit(z, dir, limit); // scan + bisect on g
    std::optional<double> best;
    keep_min(best,
             circle_crossing(z.x[0], z.x[1], dir.x[0], dir.x[1], effective_radius(), 0.0),
             limit);
    if (dir.x[1] > 0.0) {
        const double t = (dilation_ - z.x[1]) / dir.x[1];
        keep_min(best, std::optional<double>(t), limit);
    }
    return best;
}

std::unique_ptr<Domain> GraphDomain::clone() const {
    return std::make_unique<GraphDomain>(spec_, dilation_);
}

std::string GraphDomain::describe() const {
    static const char* names[] = {"zero", "neg_abs", "neg_sqrt_abs", "samples"};
    std::ostringstream os;
    os << "graph(form=" << names[static_cast<int>(spec_.form)]
       << ", radius=" << spec_.radius << ", dilation=" << dilation_ << ")";
    return os.str();
}

std::unique_ptr<Domain> dilated_domain(const Domain& d, double t) {
    const auto* gd = dynamic_cast<const GraphDomain*>(&d);
    if (!gd) throw UnsupportedKindError("dilation is defined for graph domains only");
    if (!(t > 0.0)) throw ParameterError("dilation: t must be positive");
    return std::make_unique<GraphDomain>(gd->spec(), gd->dilation() + t);
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

Grid::Grid(const Domain& domain, double spacing, int padding)
    : domain_(domain.clone()), rdim_(domain.rdim()), h_(spacing) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw ParameterError("grid: spacing must be positive and finite");
    if (padding < 1) throw ParameterError("grid: padding must be >= 1");
    const BoundingBox box = domain.bounding_box();
    total_ = 1;
    for (int a = 0; a < rdim_; ++a) {
        lo_[a] = box.lo[a] - padding * h_;
        const double hi = box.hi[a] + padding * h_;
        cnt_[a] = static_cast<int>(std::ceil((hi - lo_[a]) / h_ - 1e-9)) + 1;
        total_ *= static_cast<std::size_t>(cnt_[a]);
    }
    build(domain);
}

Grid::Grid(const Domain& domain, const BoundingBox& box, int nodes_per_axis)
    : domain_(domain.clone()), rdim_(domain.rdim()) {
    if (nodes_per_axis < 2) throw ParameterError("grid: need at least 2 nodes per axis");
    h_ = (box.hi[0] - box.lo[0]) / (nodes_per_axis - 1);
    if (!(h_ > 0.0)) throw ParameterError("grid: box must have positive extent");
    total_ = 1;
    for (int a = 0; a < rdim_; ++a) {
        const double ha = (box.hi[a] - box.lo[a]) / (nodes_per_axis - 1);
        if (std::abs(ha - h_) > 1e-9 * h_)
            throw ParameterError("grid: fixed-count box must be a cube");
        lo_[a] = box.lo[a];
        cnt_[a] = nodes_per_axis;
        total_ *= static_cast<std::size_t>(cnt_[a]);
    }
    build(domain);
}

void Grid::build(const Domain& domain) {
    if (total_ > 0xffffffffULL)
        throw ParameterError("grid: node count exceeds the 2^32 indexing cap");
    stride_[rdim_ - 1] = 1;
    for (int a = rdim_ - 2; a >= 0; --a)
        stride_[a] = stride_[a + 1] * cnt_[a + 1];
    for (int a = rdim_; a < 4; ++a) stride_[a] = 1;

    inside_.assign(total_, 0);
    delta_.assign(total_, 0.0);
    global_pool().run_chunks(total_, [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Point p = node(i);
            if (domain.contains(p)) {
                inside_[i] = 1;
                delta_[i] = domain.boundary_distance(p);
            }
        }
    });
    interior_count_ = 0;
    max_delta_ = 0.0;
    for (std::size_t i = 0; i < total_; ++i) {
        if (inside_[i]) {
            ++interior_count_;
            max_delta_ = std::max(max_delta_, delta_[i]);
        }
    }
}

Point Grid::node(std::size_t idx) const {
    Point p{};
    p.n = rdim_ / 2;
    std::size_t r = idx;
    for (int a = 0; a < rdim_; ++a) {
        const std::size_t q = r / static_cast<std::size_t>(stride_[a]);
        r -= q * static_cast<std::size_t>(stride_[a]);
        p.x[a] = lo_[a] + static_cast<double>(q) * h_;
    }
    return p;
}

std::size_t Grid::index(const std::array<int, 4>& ijk) const {
    std::size_t idx = 0;
    for (int a = 0; a < rdim_; ++a)
        idx += static_cast<std::size_t>(ijk[a]) * static_cast<std::size_t>(stride_[a]);
    return idx;
}

std::array<int, 4> Grid::coords(std::size_t idx) const {
    std::array<int, 4> c{0, 0, 0, 0};
    std::size_t r = idx;
    for (int a = 0; a < rdim_; ++a) {
        c[a] = static_cast<int>(r / static_cast<std::size_t>(stride_[a]));
        r -= static_cast<std::size_t>(c[a]) * static_cast<std::size_t>(stride_[a]);
    }
    return c;
}

SublevelSets sublevel_region(const Grid& g, double t, double shell_factor) {
    if (!(t > 0.0)) throw ParameterError("sublevel_region: t must be positive");
    if (!(shell_factor > 0.0) || shell_factor > 1.0)
        throw ParameterError("sublevel_region: shell factor must lie in (0, 1]");
    SublevelSets s;
    const double h = g.spacing();
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        if (!g.is_inside(i)) continue;
        const double d = g.delta(i);
        if (d > t) s.deep.push_back(static_cast<std::uint32_t>(i));
        if (d <= shell_factor * t) s.shell.push_back(static_cast<std::uint32_t>(i));
        if (std::abs(d - t) <= h) s.band.push_back(static_cast<std::uint32_t>(i));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Dilation certificates
// ---------------------------------------------------------------------------

double dilation_gamma(const Domain& d) {
    const auto* gd = dynamic_cast<const GraphDomain*>(&d);
    if (!gd) throw UnsupportedKindError("dilation law applies to graph domains only");
    return 1.0 / gd->spec().holder_exponent;
}

double dilation_beta(const Domain& d) {
    const auto* gd = dynamic_cast<const GraphDomain*>(&d);
    if (!gd) throw UnsupportedKindError("dilation law applies to graph domains only");
    if (gd->spec().form == GraphForm::zero) return 1.0;
    const double c = gd->spec().holder_constant, beta = gd->spec().holder_exponent;
    return std::min(0.5, std::pow(2.0 * c, -1.0 / beta));
}

DilationReport verify_dilation_bounds(const Domain& d, const std::vector<double>& ts) {
    const auto* gd = dynamic_cast<const GraphDomain*>(&d);
    if (!gd) throw UnsupportedKindError("dilation law applies to graph domains only");
    if (gd->dilation() != 0.0)
        throw ParameterError("dilation certificate starts from the undilated domain");

    DilationReport rep;
    rep.beta_dil = dilation_beta(d);
    rep.gamma = dilation_gamma(d);
    rep.pass = true;

    // Cap the boundary sample count: the certificate is a statistical sweep
    // over the base boundary, not an exhaustive check.
    std::vector<Point> pts = gd->boundary_cloud();
    if (pts.size() > 4000) {
        std::vector<Point> thin;
        const std::size_t step = pts.size() / 4000 + 1;
        for (std::size_t i = 0; i < pts.size(); i += step) thin.push_back(pts[i]);
        pts.swap(thin);
    }

    for (double t : ts) {
        if (!(t > 0.0) || t > gd->spec().data_radius - gd->spec().radius)
            throw ParameterError("dilation certificate: t outside (0, data_radius - radius]");
        GraphDomain dil(gd->spec(), t);
        DilationLevelReport lev;
        lev.t = t;
        lev.lower_bound = rep.beta_dil * std::pow(t, rep.gamma);
        lev.upper_bound = t;
        double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
        for (const auto& p : pts) {
            const double gap = dil.boundary_distance(p);
            mn = std::min(mn, gap);
            mx = std::max(mx, gap);
        }
        lev.min_gap = mn;
        lev.max_gap = mx;
        lev.pass = (mn >= lev.lower_bound * (1.0 - 1e-9) - 1e-12) &&
                   (mx <= lev.upper_bound * (1.0 + 1e-9) + dil.distance_slack() + 1e-12);
        rep.pass = rep.pass && lev.pass;
        rep.levels.push_back(lev);
    }
    return rep;
}

} // namespace rholab
