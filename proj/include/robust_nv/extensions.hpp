/**
 * @file extensions.hpp
 * @brief Robust ordering with several budgets, random supply yield, or a
 *        CVaR criterion. Each variant is solved as a single LP.
 */

#pragma once

#include <span>
#include <vector>

#include "robust_nv/knapsack.hpp"
#include "robust_nv/lp.hpp"
#include "robust_nv/moments.hpp"

namespace robust_nv {

/// Rows of sum_i coeffs[i] q_i <= budget with nonnegative coefficients.
struct BudgetRow {
    std::vector<double> coeffs;
    double budget = 0.0;

    bool operator==(const BudgetRow&) const = default;
};

struct MultiConstraintResult {
    LpStatus status = LpStatus::Infeasible;
    OrderingPolicy policy;
    /// Worst-case cost saved per extra unit of each budget (>= 0).
    std::vector<double> shadow_prices;
};

/// Worst-case ordering under every row of `rows`.
MultiConstraintResult multi_constraint_policy(std::span<const Item> items, std::span<const BudgetRow> rows);

/// Multiplicative yield: item i receives Z_i q_i with Z_i in [0, 1].
using YieldSpec = MomentSpec;

/// Moment checks plus b <= 1. Throws std::invalid_argument.
void require_valid_yield(const YieldSpec& yield);

/**
 * @brief Worst-case ordering when demand and yield are independent and both
 *        known only through mean, MAD and range.
 *
 * The objective per item is
 * c (d (mu_Z q - mu) + (m + d) E (D - Z q)^+) under the two worst-case
 * three-point laws.
 */
OrderingPolicy yield_robust_policy(std::span<const Item> items, std::span<const YieldSpec> yields, double budget);

/// The same LP with q held fixed; returns its optimal value.
double yield_lp_value(std::span<const Item> items, std::span<const YieldSpec> yields, std::span<const double> q);

/// Largest item count accepted by the CVaR model (3^n scenarios).
inline constexpr std::size_t kMaxCvarItems = 12;

struct CvarResult {
    OrderingPolicy policy;
    /// Value-at-risk level at the optimum.
    double theta = 0.0;
};

/**
 * @brief Minimize the worst-case CVaR at level gamma over the budget set.
 *
 * Scenarios are all combinations of the items' worst-case three-point laws.
 * Throws std::invalid_argument for more than kMaxCvarItems items or gamma
 * outside [0, 1).
 */
CvarResult cvar_robust_policy(std::span<const Item> items, double budget, double gamma);

/// Worst-case CVaR at a fixed q (the LP with q held fixed).
double cvar_lp_value(std::span<const Item> items, std::span<const double> q, double gamma);

}  // namespace robust_nv
