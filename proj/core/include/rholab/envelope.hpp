#pragma once

#include "rholab/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rholab {

/// Closed ball on which competitors are forced to lie at or below -1.
struct ObstacleBall {
    Point center;
    double radius = 0.0;
};

/// A grid function together with the metadata of the solve that produced it.
/// `values` holds one real per node: ghost nodes (outside the domain, or
/// outside the sublevel cut of an exhaustion solve) hold 0, obstacle nodes
/// hold -1, and the remaining interior nodes hold the converged iterate.
struct ScalarField {
    const Grid* grid = nullptr;
    std::vector<double> values;
    std::vector<std::uint8_t> obstacle; // 1 on nodes of the pinned closed ball
    long iterations = 0;
    double final_residual = 0.0;
    bool converged = true;
    double tol = 0.0;
    double level = 0.0; // sublevel cut the solve ran on (0 = full domain)
};

/// Closed-form solution on the unit disc with a centered obstacle: the
/// radial harmonic interpolant log|z| / log(1/s0) between the obstacle rim
/// (value -1) and the outer circle (value 0).
ScalarField solve_harmonic_oracle(const Grid& g, const ObstacleBall& ob);

/// Iterative envelope solve: sweeps replace each active node by
/// min(0, min over the fixed complex-direction set of the discrete circle
/// average at radius h in that direction), starting from 0 (and -1 on the
/// obstacle, which stays pinned). Sample rays that would cross the domain
/// boundary (value 0) or the obstacle sphere (value -1) within the radius
/// are shortened to the crossing, and opposite samples are combined with
/// arm-length weights, which reduces to the plain 8-point average when
/// nothing is clipped. Each sweep updates the lattice-parity color classes
/// in turn, in place: within a color no node reads another, so the pass is
/// Gauss-Seidel in effect yet bit-identical for every worker count, and
/// iterates decrease monotonically from the zero start. Stops when the
/// sup-norm update drops below tol; `level` > 0 restricts the solve to the
/// sublevel region {delta > level}.
ScalarField solve_envelope_grid(const Grid& g, const ObstacleBall& ob, double tol,
                                long max_iter, double level = 0.0);

/// Result of solving on a growing family of sublevel regions.
struct ExhaustionResult {
    std::vector<double> cuts;         // accepted cuts, decreasing (0 = full)
    std::vector<ScalarField> fields;  // one per accepted cut
    std::vector<double> sup_gaps;     // sup|u_{k+1} - u_k| on common active nodes
    std::vector<double> skipped;      // cuts rejected: obstacle does not fit
    double monotone_worst = 0.0;      // max over nodes of u_{k+1} - u_k
    bool monotone = true;             // monotone_worst <= tol held throughout
};

/// Solve on each region {delta > cut} in decreasing-cut order (domains grow,
/// solutions decrease nodewise). Cuts that leave no room for the obstacle
/// are skipped and recorded. Requires at least one accepted cut.
ExhaustionResult exhaustion_solve(const Grid& g, const ObstacleBall& ob,
                                  const std::vector<double>& cuts, double tol,
                                  long max_iter);

// ---------------------------------------------------------------------------
// Circle-average stencils (shared by the solver and the psh verifier)
// ---------------------------------------------------------------------------

/// Read patterns for 8-point circle averages at radius h on the lattice.
/// In C^1 there is one complex direction (the full circle); in C^2 there are
/// four: both coordinate axes and the two complex diagonals (e1 +- e2)/sqrt2.
/// Every pattern is a list of (flat node offset, weight) pairs; the
/// per-direction patterns average all 8 samples, the per-sample patterns are
/// the raw multilinear reads of one sample point.
struct CircleStencil {
    struct Pat {
        std::vector<std::ptrdiff_t> off;
        std::vector<double> w;
    };
    int ndir = 0;
    std::vector<Pat> per_direction;                 // ndir merged patterns
    std::vector<Pat> per_sample;                    // ndir*8 sample patterns
    std::vector<std::array<double, 4>> sample_offsets; // lattice units, per sample
};

CircleStencil make_circle_stencil(const Grid& g);

} // namespace rholab
