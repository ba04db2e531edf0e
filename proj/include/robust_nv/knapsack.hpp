/**
 * @file knapsack.hpp
 * @brief Budget-constrained robust ordering as a continuous knapsack.
 *
 * Every item's worst-case cost is convex and piecewise linear with
 * breakpoints a_i, mu_i, b_i. Each descending piece is a knapsack item whose
 * weight is c_i per unit and whose value is its slope; sorting the pieces by
 * slope / c_i and filling greedily solves the budgeted problem exactly. The
 * ranking never looks at the budget, so a larger budget only extends the
 * allocation made for a smaller one.
 */

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "robust_nv/moments.hpp"
#include "robust_nv/single_item.hpp"

namespace robust_nv {

struct Item {
    ItemEconomics econ;
    MomentSpec spec;

    bool operator==(const Item&) const = default;
};

struct Instance {
    std::vector<Item> items;
    double budget = 0.0;

    std::size_t size() const { return items.size(); }
    bool has_betas() const;

    bool operator==(const Instance&) const = default;
};

/// Throws std::invalid_argument naming the first offending item.
void require_valid(const Instance& instance);

/// Per-item affine pieces of the worst-case cost.
std::vector<PwlCost> build_coefficients(const Instance& instance);

/// A convex cost on [0, inf) described by consecutive segments starting at
/// q = 0: segment k has the given slope over the given length.
struct SegmentedCost {
    double unit_cost = 1.0;
    std::vector<double> slopes;
    std::vector<double> lengths;
};

/// Segments of c (d (q - mu) + (m + d) E (D - q)^+) for a finite law: one
/// segment per support point, ending there. The final slope c d is omitted.
SegmentedCost segments_from_distribution(const ItemEconomics& econ, const DiscreteDistribution& demand);

struct RankedEntry {
    std::size_t item = 0;
    int piece = 0;
    /// slope / unit_cost
    double ratio = 0.0;
    double capacity = 0.0;
    double unit_cost = 0.0;
};

struct RankedList {
    std::size_t num_items = 0;
    std::vector<RankedEntry> entries;
};

/// Keep segments with negative slope, sorted by (ratio, item, piece).
RankedList rank_segments(std::span<const SegmentedCost> items);

/// Ranked pieces of the worst-case cost (capacities a_i, mu_i - a_i,
/// b_i - mu_i). Independent of the budget.
RankedList build_ranked_list(const Instance& instance);

/// Ranked pieces of the best-case cost (requires every beta).
RankedList build_lower_ranked_list(const Instance& instance);

enum class PolicyModel { RobustUpper, RobustLower, MeanRange, MeanVariance, FullInfo };

std::string to_string(PolicyModel model);

struct OrderingPolicy {
    std::vector<double> q;
    double objective = 0.0;
    double spent = 0.0;
    PolicyModel provenance = PolicyModel::RobustUpper;
    /// Last piece touched per item by a greedy allocation (-1: none).
    /// Empty for policies not produced by the knapsack.
    std::vector<int> piece_reached;
    /// Item that received the partial fill, if the budget bound.
    std::ptrdiff_t partial_item = -1;
};

/// Greedy fill of a ranked list under the budget. Objective is left at 0.
OrderingPolicy greedy_fill(const RankedList& list, double budget, PolicyModel model);

/// Robust (worst-case) policy at instance.budget.
OrderingPolicy knapsack_allocate(const Instance& instance);

/// Robust policy at `budget`, reusing a list built once for the instance.
OrderingPolicy knapsack_allocate(const Instance& instance, const RankedList& list, double budget);

/// Best-case policy (lower-bound model) at instance.budget.
OrderingPolicy lower_bound_policy(const Instance& instance);
OrderingPolicy lower_bound_policy(const Instance& instance, const RankedList& list, double budget);

/// Sum of worst-case costs at q.
double evaluate_upper(const Instance& instance, std::span<const double> q);

/// Sum of best-case costs at q (requires every beta).
double evaluate_lower(const Instance& instance, std::span<const double> q);

struct PerformanceInterval {
    double lower = 0.0;
    double upper = 0.0;
};

/// [min best-case cost, min worst-case cost] at instance.budget.
PerformanceInterval performance_interval(const Instance& instance);

}  // namespace robust_nv
