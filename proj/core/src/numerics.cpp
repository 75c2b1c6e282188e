#include "rholab/numerics.hpp"

#include "rholab/common.hpp"

#include <cmath>
#include <utility>

namespace rholab {

namespace {

struct SimpsonCtx {
    const std::function<double(double)>& f;
    double rel_tol;
    double abs_floor;
    int max_depth;
    std::size_t evals = 0;
    double err_accum = 0.0;

    double eval(double x) {
        ++evals;
        return f(x);
    }

    // Recursive bisection with the classical 1/15 Richardson error estimate.
    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   int depth, double scale) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = eval(lm), frm = eval(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        const double tol = std::max(abs_floor, rel_tol * scale);
        if (depth >= max_depth || std::abs(delta) <= 15.0 * tol) {
            err_accum += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        // Halve the tolerance budget in each child so the panel total honors it.
        return recurse(a, m, fa, flm, fm, left, depth + 1, 0.5 * scale) +
               recurse(m, b, fm, frm, fb, right, depth + 1, 0.5 * scale);
    }
};

} // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double rel_tol, double abs_floor, int base_panels,
                            int max_depth) {
    QuadResult out;
    if (!(b > a)) return out; // empty or inverted range integrates to zero
    if (base_panels < 1) base_panels = 1;

    SimpsonCtx ctx{f, rel_tol, abs_floor, max_depth};

    // First pass: coarse composite Simpson over the base panels to obtain a
    // magnitude estimate that anchors the relative tolerance.
    std::vector<double> pa(base_panels + 1), pf(base_panels + 1), pm(base_panels),
        pfm(base_panels);
    for (int i = 0; i <= base_panels; ++i) {
        pa[i] = a + (b - a) * static_cast<double>(i) / base_panels;
    }
    pa[base_panels] = b;
    for (int i = 0; i <= base_panels; ++i) pf[i] = ctx.eval(pa[i]);
    double coarse = 0.0;
    for (int i = 0; i < base_panels; ++i) {
        pm[i] = 0.5 * (pa[i] + pa[i + 1]);
        pfm[i] = ctx.eval(pm[i]);
        coarse += (pa[i + 1] - pa[i]) / 6.0 * (pf[i] + 4.0 * pfm[i] + pf[i + 1]);
    }
    const double scale = std::max(std::abs(coarse), abs_floor);

    double total = 0.0;
    for (int i = 0; i < base_panels; ++i) {
        const double whole =
            (pa[i + 1] - pa[i]) / 6.0 * (pf[i] + 4.0 * pfm[i] + pf[i + 1]);
        total += ctx.recurse(pa[i], pa[i + 1], pf[i], pfm[i], pf[i + 1], whole, 0,
                             scale / base_panels);
    }
    out.value = total;
    out.error_estimate = ctx.err_accum;
    out.evaluations = ctx.evals;
    return out;
}

double composite_simpson(const std::function<double(double)>& f, double a, double b,
                         int nodes) {
    if (nodes < 3 || nodes % 2 == 0)
        throw ParameterError("composite_simpson: nodes must be odd and >= 3");
    const int n = nodes - 1; // even number of sub-intervals
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw ParameterError("fit_line: mismatched input lengths");
    if (xs.size() < 2) throw ParameterError("fit_line: need at least two points");
    LineFit fit;
    fit.points = xs.size();
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw ParameterError("fit_line: degenerate abscissae");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = v[0];
        for (std::size_t i = 1; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

} // namespace rholab

namespace rholab {

std::optional<double> smallest_root_above(double a, double b, double c, double eps) {
    if (std::abs(a) < 1e-300) {
        if (std::abs(b) < 1e-300) return std::nullopt;
        const double r = -c / b;
        return r > eps ? std::optional<double>(r) : std::nullopt;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double sd = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sd : -sd));
    double r1, r2;
    if (q != 0.0) {
        r1 = q / a;
        r2 = c / q;
    } else {
        r1 = 0.0;
        r2 = -b / a;
    }
    if (r1 > r2) std::swap(r1, r2);
    if (r1 > eps) return r1;
    if (r2 > eps) return r2;
    return std::nullopt;
}

} // namespace rholab
