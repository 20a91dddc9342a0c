#pragma once

// Dense bounded-variable primal simplex for small LPs with many columns:
//   maximize c'x  subject to  row_lower <= A x <= row_upper,
//                             col_lower <= x <= col_upper.
// Column bounds must be finite; row bounds may be infinite.

#include <cstddef>
#include <vector>

namespace medtest {

struct LinearProgram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;  // row-major, rows x cols
    std::vector<double> objective;
    std::vector<double> row_lower, row_upper;
    std::vector<double> col_lower, col_upper;

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    /// Allocates a zero matrix with free rows and [0, 1] columns.
    static LinearProgram zeros(std::size_t rows, std::size_t cols);
};

enum class LpStatus { optimal, infeasible, iteration_limit };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t iterations = 0;
    std::vector<bool> basic;  // which structural columns ended basic
};

LpSolution solve_lp(const LinearProgram& lp, std::size_t max_iterations = 0);

}  // namespace medtest
