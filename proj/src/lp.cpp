#include "medtest/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "medtest/error.hpp"

namespace medtest {

LinearProgram LinearProgram::zeros(std::size_t rows, std::size_t cols) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    LinearProgram lp;
    lp.rows = rows;
    lp.cols = cols;
    lp.a.assign(rows * cols, 0.0);
    lp.objective.assign(cols, 0.0);
    lp.row_lower.assign(rows, -inf);
    lp.row_upper.assign(rows, inf);
    lp.col_lower.assign(cols, 0.0);
    lp.col_upper.assign(cols, 1.0);
    return lp;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr std::size_t kRefactorEvery = 64;

// Working problem in equality form
//   [A_scaled  -I  D] (x, s, art) = 0
// with slack s carrying the (scaled) row bounds and one artificial per row.
class Simplex {
public:
    explicit Simplex(const LinearProgram& lp) : m_(lp.rows), n_(lp.cols) {
        row_scale_.assign(m_, 1.0);
        for (std::size_t r = 0; r < m_; ++r) {
            double big = 0.0;
            for (std::size_t c = 0; c < n_; ++c) big = std::max(big, std::abs(lp.at(r, c)));
            if (big > 0.0) row_scale_[r] = 1.0 / big;
        }
        a_.resize(m_ * n_);
        for (std::size_t r = 0; r < m_; ++r) {
            for (std::size_t c = 0; c < n_; ++c) a_[r * n_ + c] = lp.at(r, c) * row_scale_[r];
        }
        const std::size_t total = n_ + 2 * m_;
        lower_.resize(total);
        upper_.resize(total);
        for (std::size_t c = 0; c < n_; ++c) {
            lower_[c] = lp.col_lower[c];
            upper_[c] = lp.col_upper[c];
            if (!std::isfinite(lower_[c]) || !std::isfinite(upper_[c]) || lower_[c] > upper_[c]) {
                throw Error(ErrorCode::domain_error, "LP column bounds must be finite and ordered");
            }
        }
        for (std::size_t r = 0; r < m_; ++r) {
            lower_[n_ + r] = lp.row_lower[r] * row_scale_[r];
            upper_[n_ + r] = lp.row_upper[r] * row_scale_[r];
            if (lower_[n_ + r] > upper_[n_ + r]) throw Error(ErrorCode::domain_error, "LP row bounds are inverted");
        }
        cost_max_ = 0.0;
        for (double v : lp.objective) cost_max_ = std::max(cost_max_, std::abs(v));
        const double cs = cost_max_ > 0.0 ? 1.0 / cost_max_ : 1.0;
        true_cost_.assign(total, 0.0);
        for (std::size_t c = 0; c < n_; ++c) true_cost_[c] = -lp.objective[c] * cs;  // minimize

        value_.assign(total, 0.0);
        art_sign_.assign(m_, 1.0);
        basis_.resize(m_);
        is_basic_.assign(total, false);

        // Structurals at the bound nearest zero; slacks pick up A x.
        for (std::size_t c = 0; c < n_; ++c) {
            value_[c] = (lower_[c] <= 0.0 && 0.0 <= upper_[c]) ? 0.0
                        : std::abs(lower_[c]) <= std::abs(upper_[c]) ? lower_[c] : upper_[c];
        }
        for (std::size_t r = 0; r < m_; ++r) {
            double ax = 0.0;
            for (std::size_t c = 0; c < n_; ++c) ax += a_[r * n_ + c] * value_[c];
            const std::size_t s = n_ + r, art = n_ + m_ + r;
            if (ax >= lower_[s] - kPrimalTol && ax <= upper_[s] + kPrimalTol) {
                value_[s] = ax;
                basis_[r] = s;
                lower_[art] = upper_[art] = 0.0;
            } else {
                // Slack sits at the violated bound; the artificial absorbs the gap.
                const double target = ax < lower_[s] ? lower_[s] : upper_[s];
                value_[s] = target;
                const double gap = ax - target;  // A x - s + sign * art = 0
                art_sign_[r] = gap > 0.0 ? -1.0 : 1.0;
                value_[art] = std::abs(gap);
                lower_[art] = 0.0;
                upper_[art] = kInf;
                basis_[r] = art;
            }
            is_basic_[basis_[r]] = true;
        }
    }

    LpSolution run(std::size_t max_iterations) {
        if (max_iterations == 0) max_iterations = 50 * (n_ + m_) + 1000;
        LpSolution sol;

        // Phase 1: drive the artificials to zero.
        cost_.assign(lower_.size(), 0.0);
        for (std::size_t r = 0; r < m_; ++r) cost_[n_ + m_ + r] = 1.0;
        refactor();
        if (!iterate(max_iterations, sol.iterations)) {
            sol.status = LpStatus::iteration_limit;
            return sol;
        }
        double infeasibility = 0.0;
        for (std::size_t r = 0; r < m_; ++r) infeasibility += value_[n_ + m_ + r];
        if (infeasibility > 1e-8) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        for (std::size_t r = 0; r < m_; ++r) {
            const std::size_t art = n_ + m_ + r;
            lower_[art] = upper_[art] = 0.0;
            if (!is_basic_[art]) value_[art] = 0.0;
        }

        // Phase 2.
        cost_ = true_cost_;
        refactor();
        if (!iterate(max_iterations, sol.iterations)) {
            sol.status = LpStatus::iteration_limit;
            return sol;
        }
        sol.status = LpStatus::optimal;
        sol.x.assign(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(n_));
        for (std::size_t c = 0; c < n_; ++c) sol.x[c] = std::clamp(sol.x[c], lower_[c], upper_[c]);
        sol.basic.assign(is_basic_.begin(), is_basic_.begin() + static_cast<std::ptrdiff_t>(n_));
        return sol;
    }

private:
    // Column j of the working matrix, scattered into `out` (length m).
    void column(std::size_t j, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        if (j < n_) {
            for (std::size_t r = 0; r < m_; ++r) out[r] = a_[r * n_ + j];
        } else if (j < n_ + m_) {
            out[j - n_] = -1.0;
        } else {
            out[j - n_ - m_] = art_sign_[j - n_ - m_];
        }
    }

    double column_dot(std::size_t j, const std::vector<double>& y) const {
        if (j < n_) {
            double s = 0.0;
            for (std::size_t r = 0; r < m_; ++r) s += y[r] * a_[r * n_ + j];
            return s;
        }
        if (j < n_ + m_) return -y[j - n_];
        return art_sign_[j - n_ - m_] * y[j - n_ - m_];
    }

    // Dense inverse of the basis by Gauss-Jordan with partial pivoting, then
    // basic values recomputed from the nonbasic ones.
    void refactor() {
        std::vector<double> b(m_ * m_), col(m_);
        for (std::size_t k = 0; k < m_; ++k) {
            column(basis_[k], col);
            for (std::size_t r = 0; r < m_; ++r) b[r * m_ + k] = col[r];
        }
        binv_.assign(m_ * m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) binv_[r * m_ + r] = 1.0;
        for (std::size_t k = 0; k < m_; ++k) {
            std::size_t piv = k;
            for (std::size_t r = k + 1; r < m_; ++r) {
                if (std::abs(b[r * m_ + k]) > std::abs(b[piv * m_ + k])) piv = r;
            }
            if (std::abs(b[piv * m_ + k]) < 1e-14) throw Error(ErrorCode::accuracy_failure, "simplex basis became singular");
            if (piv != k) {
                for (std::size_t c = 0; c < m_; ++c) {
                    std::swap(b[k * m_ + c], b[piv * m_ + c]);
                    std::swap(binv_[k * m_ + c], binv_[piv * m_ + c]);
                }
            }
            const double d = 1.0 / b[k * m_ + k];
            for (std::size_t c = 0; c < m_; ++c) {
                b[k * m_ + c] *= d;
                binv_[k * m_ + c] *= d;
            }
            for (std::size_t r = 0; r < m_; ++r) {
                if (r == k) continue;
                const double f = b[r * m_ + k];
                if (f == 0.0) continue;
                for (std::size_t c = 0; c < m_; ++c) {
                    b[r * m_ + c] -= f * b[k * m_ + c];
                    binv_[r * m_ + c] -= f * binv_[k * m_ + c];
                }
            }
        }
        // x_B = -B^{-1} N x_N
        std::vector<double> rhs(m_, 0.0);
        for (std::size_t j = 0; j < lower_.size(); ++j) {
            if (is_basic_[j] || value_[j] == 0.0) continue;
            column(j, col);
            for (std::size_t r = 0; r < m_; ++r) rhs[r] -= col[r] * value_[j];
        }
        for (std::size_t k = 0; k < m_; ++k) {
            double s = 0.0;
            for (std::size_t r = 0; r < m_; ++r) s += binv_[k * m_ + r] * rhs[r];
            value_[basis_[k]] = s;
        }
        since_refactor_ = 0;
    }

    bool iterate(std::size_t max_iterations, std::size_t& iterations) {
        std::vector<double> y(m_), alpha(m_), col(m_);
        std::size_t stalled = 0;
        double last_obj = objective_value();
        while (true) {
            if (iterations >= max_iterations) return false;
            // Duals y' = c_B' B^{-1}.
            for (std::size_t r = 0; r < m_; ++r) {
                double s = 0.0;
                for (std::size_t k = 0; k < m_; ++k) s += cost_[basis_[k]] * binv_[k * m_ + r];
                y[r] = s;
            }
            const bool bland = stalled > 50;
            std::size_t entering = lower_.size();
            double best = 0.0;
            double direction = 0.0;
            for (std::size_t j = 0; j < lower_.size(); ++j) {
                if (is_basic_[j] || lower_[j] == upper_[j]) continue;
                const double d = cost_[j] - column_dot(j, y);
                const bool at_lower = value_[j] <= lower_[j];
                const bool at_upper = value_[j] >= upper_[j];
                double gain = 0.0, dir = 0.0;
                if (d < -kDualTol && !at_upper) {
                    gain = -d;
                    dir = 1.0;
                } else if (d > kDualTol && !at_lower) {
                    gain = d;
                    dir = -1.0;
                }
                if (gain <= 0.0) continue;
                if (bland) {
                    entering = j;
                    direction = dir;
                    break;
                }
                if (gain > best) {
                    best = gain;
                    entering = j;
                    direction = dir;
                }
            }
            if (entering == lower_.size()) return true;

            column(entering, col);
            for (std::size_t k = 0; k < m_; ++k) {
                double s = 0.0;
                for (std::size_t r = 0; r < m_; ++r) s += binv_[k * m_ + r] * col[r];
                alpha[k] = s;
            }
            // Moving the entering variable by direction * theta changes x_B by
            // -direction * theta * alpha.
            // Harris two-pass ratio test: find the largest step allowed with
            // bounds relaxed by the feasibility tolerance, then among rows that
            // block within it pick the largest pivot.
            double theta = upper_[entering] - lower_[entering];
            double relaxed = theta;
            for (std::size_t k = 0; k < m_; ++k) {
                const double rate = -direction * alpha[k];
                if (std::abs(rate) < kPivotTol) continue;
                const std::size_t bj = basis_[k];
                const double room = rate > 0.0 ? upper_[bj] - value_[bj] : value_[bj] - lower_[bj];
                if (!std::isfinite(room)) continue;
                relaxed = std::min(relaxed, (std::max(0.0, room) + kPrimalTol) / std::abs(rate));
            }
            std::size_t leaving = m_;
            double leaving_pivot = 0.0;
            for (std::size_t k = 0; k < m_; ++k) {
                const double rate = -direction * alpha[k];
                if (std::abs(rate) < kPivotTol) continue;
                const std::size_t bj = basis_[k];
                const double room = rate > 0.0 ? upper_[bj] - value_[bj] : value_[bj] - lower_[bj];
                if (!std::isfinite(room)) continue;
                const double limit = std::max(0.0, room) / std::abs(rate);
                if (limit <= relaxed && std::abs(rate) > std::abs(leaving_pivot)) {
                    leaving = k;
                    leaving_pivot = rate;
                }
            }
            if (leaving < m_) {
                const std::size_t bj = basis_[leaving];
                const double room = leaving_pivot > 0.0 ? upper_[bj] - value_[bj] : value_[bj] - lower_[bj];
                theta = std::min(theta, std::max(0.0, room) / std::abs(leaving_pivot));
                if (upper_[entering] - lower_[entering] <= theta) leaving = m_;
            }
            if (!std::isfinite(theta)) throw Error(ErrorCode::accuracy_failure, "LP is unbounded");

            value_[entering] += direction * theta;
            for (std::size_t k = 0; k < m_; ++k) value_[basis_[k]] -= direction * theta * alpha[k];

            if (leaving < m_) {
                const std::size_t out = basis_[leaving];
                // Snap the leaving variable exactly onto the bound it hit.
                value_[out] = leaving_pivot > 0.0 ? upper_[out] : lower_[out];
                is_basic_[out] = false;
                is_basic_[entering] = true;
                basis_[leaving] = entering;
                // Eta update of B^{-1}.
                const double piv = alpha[leaving];
                for (std::size_t r = 0; r < m_; ++r) binv_[leaving * m_ + r] /= piv;
                for (std::size_t k = 0; k < m_; ++k) {
                    if (k == leaving || alpha[k] == 0.0) continue;
                    const double f = alpha[k];
                    for (std::size_t r = 0; r < m_; ++r) binv_[k * m_ + r] -= f * binv_[leaving * m_ + r];
                }
                if (++since_refactor_ >= kRefactorEvery) refactor();
            } else {
                value_[entering] = direction > 0.0 ? upper_[entering] : lower_[entering];
            }
            ++iterations;

            const double obj = objective_value();
            if (obj < last_obj - 1e-13) {
                stalled = 0;
                last_obj = obj;
            } else {
                ++stalled;
            }
        }
    }

    double objective_value() const {
        double s = 0.0;
        for (std::size_t j = 0; j < cost_.size(); ++j) s += cost_[j] * value_[j];
        return s;
    }

    std::size_t m_, n_;
    std::vector<double> a_, row_scale_;
    std::vector<double> lower_, upper_, value_, cost_, true_cost_, art_sign_;
    std::vector<std::size_t> basis_;
    std::vector<bool> is_basic_;
    std::vector<double> binv_;
    double cost_max_ = 0.0;
    std::size_t since_refactor_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, std::size_t max_iterations) {
    if (lp.a.size() != lp.rows * lp.cols || lp.objective.size() != lp.cols ||
        lp.row_lower.size() != lp.rows || lp.row_upper.size() != lp.rows ||
        lp.col_lower.size() != lp.cols || lp.col_upper.size() != lp.cols) {
        throw Error(ErrorCode::domain_error, "LP dimensions are inconsistent");
    }
    Simplex simplex(lp);
    LpSolution sol = simplex.run(max_iterations);
    if (sol.status == LpStatus::optimal) {
        sol.objective = 0.0;
        for (std::size_t c = 0; c < lp.cols; ++c) sol.objective += lp.objective[c] * sol.x[c];
    }
    return sol;
}

}  // namespace medtest
