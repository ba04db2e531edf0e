/**
 * @file lp.hpp
 * @brief Dense bounded-variable primal simplex and epigraph encodings of
 *        separable convex piecewise-linear objectives.
 */

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace robust_nv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal, GreaterEqual };

/**
 * @brief min c'x  s.t.  A x (<=,=,>=) b,  lower <= x <= upper.
 *
 * Rows are stored densely but may be shorter than the number of variables;
 * missing trailing coefficients are zero. This lets callers add variables
 * after rows without rewriting the matrix.
 */
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<Sense> senses;
    std::vector<double> rhs;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t num_vars() const { return objective.size(); }
    std::size_t num_rows() const { return rows.size(); }

    /// Returns the index of the new variable.
    std::size_t add_variable(double cost, double lo = 0.0, double hi = kInf);

    /// Returns the index of the new row.
    std::size_t add_row(std::vector<double> coeffs, Sense sense, double b);

    double coefficient(std::size_t row, std::size_t var) const {
        const auto& r = rows[row];
        return var < r.size() ? r[var] : 0.0;
    }

    /// Throws std::invalid_argument on inconsistent dimensions or bounds.
    void check() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LpStatus status);

/**
 * @brief Result of a simplex solve.
 *
 * Duals follow the convention reduced_cost = c - A'y. For a minimization,
 * a binding <= row has y <= 0 and a binding >= row has y >= 0.
 */
struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::vector<double> duals;
    std::vector<double> reduced_costs;
    std::size_t iterations = 0;
    bool used_bland = false;

    bool optimal() const { return status == LpStatus::Optimal; }
};

struct SimplexOptions {
    double feasibility_tol = 1e-9;
    double pivot_tol = 1e-12;
    double optimality_tol = 1e-10;
    std::size_t max_iterations = 1'000'000;
};

/**
 * @brief Two-phase primal simplex on a dense tableau.
 *
 * Nonbasic variables rest at either bound, so finite upper bounds never
 * become rows. Free variables are split. Dantzig pricing switches to Bland's
 * rule once 2*(rows+cols) degenerate pivots have been made.
 */
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

/// Convex piecewise-linear function max_k (slopes[k] * x + intercepts[k]).
struct PwlFunction {
    std::vector<double> slopes;
    std::vector<double> intercepts;

    double operator()(double x) const;
};

/**
 * @brief linear_coef * x + constant + sum_k weights[k] * (points[k] - x)^+.
 *
 * With nonnegative weights this is convex; it is the expected cost of a
 * newsvendor item under a discrete demand law.
 */
struct HingeSum {
    double linear_coef = 0.0;
    double constant = 0.0;
    std::vector<double> points;
    std::vector<double> weights;

    double operator()(double x) const;
};

/// sum_i coeffs[i] * q_i (sense) rhs, over the item quantities.
struct LinearConstraint {
    std::vector<double> coeffs;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
};

/**
 * @brief An LP whose optimum over (q, auxiliaries) equals the minimum of a
 *        separable convex objective.
 *
 * `q_index[i]` is the LP column of item i. The LP objective plus `constant`
 * equals the original objective value; `constraint_rows[j]` is the row of the
 * j-th caller constraint (for reading its dual).
 */
struct EpigraphLp {
    LinearProgram lp;
    std::vector<std::size_t> q_index;
    std::vector<std::size_t> constraint_rows;
    double constant = 0.0;
};

/**
 * @brief Max-form encoding: one epigraph variable t_i per item with a row
 *        t_i >= slope * q_i + intercept for every affine piece.
 *
 * `q_upper` (may be empty) caps each q_i; the max-of-pieces form is only
 * faithful on the interval where the pieces describe the cost.
 * Throws std::invalid_argument if the slopes of an item are not
 * nondecreasing (the pieces must be listed left to right).
 */
EpigraphLp pwl_epigraph(std::span<const PwlFunction> items,
                        std::span<const LinearConstraint> constraints,
                        std::span<const double> q_upper = {});

/**
 * @brief Dummy-variable encoding: tau_ik >= points_k - q_i, tau_ik >= 0, and
 *        the objective weights tau by the hinge weights.
 *
 * Exact on all of q >= 0. Throws std::invalid_argument on negative weights.
 */
EpigraphLp hinge_epigraph(std::span<const HingeSum> items,
                          std::span<const LinearConstraint> constraints);

}  // namespace robust_nv
