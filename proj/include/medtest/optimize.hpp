#pragma once

// Varying-g construction of near-similar boundaries: the basic algorithm
// (NRP as close to alpha as possible) and the optimal algorithm (power as
// close to an envelope as possible inside the epsilon band).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "medtest/boundary.hpp"
#include "medtest/dist.hpp"
#include "medtest/rp.hpp"

namespace medtest {

struct OptimizeLogEntry {
    std::string phase;
    std::size_t knots = 0;  // free knots J
    std::size_t iteration = 0;
    double q = 0.0;
    double epsilon = 0.0;  // alpha - min NRP
    double max_nrp = 0.0;
    double power_gap = 0.0;  // mean envelope minus power (optimal algorithm only)
};

struct OptimizeConfig {
    std::size_t knots = 16;  // largest J on the escalation path 1, 2, 4, ...
    std::vector<double> null_grid;  // mu0 values along (0, mu0)
    std::vector<Noncentrality> alt_grid;
    double epsilon = 1e-5;
    double alpha = 0.05;
    double tol = 1e-10;
    std::size_t max_iterations = 200;  // per knot count
    double t_end = 2.5;                // g reaches z_{alpha/2} here
    double min_improvement = 0.0;      // stop escalating when Q drops by a smaller fraction
    std::size_t restarts = 8;          // perturbed restarts at the final knot count
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::function<void(const OptimizeLogEntry&)> on_progress;

    void validate() const;
};

/// 60 points equally spaced on [0, 6] followed by 16 on (6, 20].
std::vector<double> default_null_grid();

struct OptimizeResult {
    GBoundary boundary = lr_boundary();
    double epsilon = 0.0;
    double q = 0.0;
    std::vector<double> nrp;  // on the config's null grid
    std::vector<double> power;  // on the alternative grid (optimal algorithm only)
    double max_power_gap = 0.0;
    std::vector<OptimizeLogEntry> log;
    bool converged = false;
};

/// Q(g) = sum over the null grid of (NRP - alpha)^2.
double q_value(std::span<const double> nrp, double alpha);

/// Minimizes Q subject to NRP <= alpha on the null grid. Knot abscissae and
/// ordinates are free; J doubles by midpoint insertion, and one knot stays
/// pinned at z_{alpha/2}. Starts from the likelihood-ratio boundary.
OptimizeResult basic_varying_g(const OptimizeConfig& config);

/// Maximizes power summed over config.alt_grid (equivalently minimizes the
/// summed gap to `envelope`) subject to alpha - epsilon <= NRP <= alpha.
/// `start` supplies the knot layout and initial ordinates; the basic
/// algorithm is run when it is empty. Throws infeasible_constraints carrying
/// the best iterate's epsilon in the message when the band cannot be reached.
OptimizeResult optimal_varying_g(const OptimizeConfig& config, const RPGrid& envelope,
                                 const GBoundary* start = nullptr);

/// "phase,knots,iteration,q,epsilon,max_nrp,power_gap" lines with a header.
std::string log_to_delimited(std::span<const OptimizeLogEntry> log);

}  // namespace medtest
