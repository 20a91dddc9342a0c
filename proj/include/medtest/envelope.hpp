#pragma once

// Discretized power envelope: point-optimal critical regions built from
// cells of the ordered-absolute-t octant, solved as a linear program.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "medtest/boundary.hpp"
#include "medtest/dist.hpp"
#include "medtest/rp.hpp"

namespace medtest {

/// Cells are indexed by bins i <= j of |t|_(1) and |t|_(2). Bins 0 .. N-1 are
/// [k h, (k+1) h) with N h = t_max; bin N is [t_max, inf), so the cells
/// partition the whole octant.
struct EnvelopeProblem {
    double t_max = 6.0;
    double cell_size = 0.05;
    std::vector<Noncentrality> null_points;
    Noncentrality alt_point{0.0, 0.0};
    double epsilon = 1e-5;
    double alpha = 0.05;
    bool nonsimilar = false;  // drop the lower size constraints

    std::size_t bins() const;  // N, the number of finite bins
    std::size_t cell_count() const;
    std::size_t cell_index(std::size_t i, std::size_t j) const;
    void validate() const;
};

struct Cell {
    std::size_t i, j;
    double t1_lo, t1_hi, t2_lo, t2_hi;  // hi may be +inf
};

std::vector<Cell> cells(const EnvelopeProblem& problem);

/// Probability of each cell under mu (K = 2), in cell_index order.
std::vector<double> cell_probabilities(const Noncentrality& mu, const EnvelopeProblem& problem);

struct PointOptimalResult {
    std::vector<double> relaxed;          // LP solution, phi in [0, 1]
    std::vector<std::uint8_t> selection;  // rounded 0/1 selection
    double relaxed_power = 0.0;           // LP optimum: the envelope value
    double rounded_power = 0.0;
    bool rounded_feasible = false;        // rounded selection meets every size constraint
    std::vector<double> rounded_sizes;    // rejection probability at each null point
    std::size_t lp_iterations = 0;
};

/// Throws infeasible_constraints when no relaxed selection meets the size band.
PointOptimalResult point_optimal_cr(const EnvelopeProblem& problem);

struct EnvelopeSurface {
    RPGrid relaxed;
    RPGrid rounded;
    std::vector<bool> rounded_feasible;
};

/// Envelope over `alt_grid`, reusing everything but the alternative point
/// from `problem`.
EnvelopeSurface power_envelope(std::span<const Noncentrality> alt_grid,
                               const EnvelopeProblem& problem, std::size_t threads = 0);

/// mu0 equally spaced on [0, mu_max] along the null ray (0, mu0).
std::vector<Noncentrality> null_grid(std::size_t count, double mu_max);

/// mu2 in {step, ..., mu_max}, mu1 in {step, ..., mu2}.
std::vector<Noncentrality> triangular_alt_grid(double step = 0.2, double mu_max = 4.0);

/// "i,j,t1_lo,t1_hi,t2_lo,t2_hi,phi" for every cell with phi > 0.
std::string selection_to_delimited(const EnvelopeProblem& problem, std::span<const double> phi);

}  // namespace medtest
