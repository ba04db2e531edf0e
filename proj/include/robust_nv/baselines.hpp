/**
 * @file baselines.hpp
 * @brief Ground-truth demand laws and the policies the robust one is judged against.
 *
 * A sweep fixes a set of items with known demand laws, computes the
 * full-information optimum over a budget grid, and reports how much every
 * other policy loses relative to it (the expected value of additional
 * information, EVAI).
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "robust_nv/knapsack.hpp"
#include "robust_nv/moments.hpp"
#include "robust_nv/single_item.hpp"

namespace robust_nv {

/// A demand law with closed-form (or incomplete-beta) CDF, quantile and
/// partial expectation.
class GroundTruthDistribution {
public:
    using Family = std::variant<family::Uniform, family::Beta, family::Triangular, DiscreteDistribution>;

    explicit GroundTruthDistribution(Family f);

    static GroundTruthDistribution uniform(double a, double b);
    static GroundTruthDistribution beta(double k, double lambda, double a, double b);
    static GroundTruthDistribution triangular(double a, double b, double mode);
    static GroundTruthDistribution discrete(std::vector<double> points, std::vector<double> probs);

    const Family& family() const { return family_; }
    std::string name() const;

    double lower() const { return lo_; }
    double upper() const { return hi_; }
    double mean() const { return mean_; }
    double mad() const { return mad_; }
    double sigma() const { return sigma_; }
    /// P(D >= mean)
    double beta_skew() const { return beta_; }

    double cdf(double x) const;
    /// Smallest x with cdf(x) >= p; the lower end of the support for p <= 0.
    double quantile(double p) const;
    /// E (D - q)^+
    double expected_shortfall(double q) const;

    /// (a, mu, b, delta) with beta and sigma filled in.
    MomentSpec moments() const;

private:
    Family family_;
    double lo_ = 0.0, hi_ = 0.0, mean_ = 0.0, mad_ = 0.0, sigma_ = 0.0, beta_ = 0.0;
};

/// c (d (q - mu) + (m + d) E (D - q)^+) under the true law.
double true_cost(const ItemEconomics& econ, const GroundTruthDistribution& dist, double q);
double true_cost(std::span<const ItemEconomics> econ, std::span<const GroundTruthDistribution> dists,
                 std::span<const double> q);

/// Constrained optimum under full information. `multiplier` is the budget
/// multiplier per unit of spend.
struct FullInfoPolicy {
    OrderingPolicy policy;
    double multiplier = 0.0;
};

FullInfoPolicy full_info_optimal(std::span<const ItemEconomics> econ, std::span<const GroundTruthDistribution> dists,
                                 double budget);

struct MeanSigma {
    double mu = 0.0;
    double sigma = 0.0;
};

/// Sum of per-item mean-variance worst-case costs.
double gallego_moon_objective(std::span<const ItemEconomics> econ, std::span<const MeanSigma> ms,
                              std::span<const double> q);

/// Per-item minimizer of scarf_cost(q) + lambda c q over q >= 0.
double gallego_moon_quantity(const ItemEconomics& econ, const MeanSigma& ms, double lambda);

/// Budgeted mean-variance policy; the multiplier is found by bisection.
OrderingPolicy gallego_moon_policy(std::span<const ItemEconomics> econ, std::span<const MeanSigma> ms,
                                   double budget);

/// Knapsack over the mean-range extremal laws on {a, b}.
RankedList build_em_ranked_list(const Instance& instance);
OrderingPolicy em_policy(const Instance& instance);
OrderingPolicy em_policy(const Instance& instance, const RankedList& list, double budget);

/// Sum of expected costs under the mean-range extremal laws.
double evaluate_em(const Instance& instance, std::span<const double> q);

/// (C(q) - C(q*)) / C(q*) under the true laws. Throws if C(q*) is zero.
double evai(std::span<const double> q, std::span<const double> q_star, std::span<const ItemEconomics> econ,
            std::span<const GroundTruthDistribution> dists);

enum class MarginRegime { Low, Average, High };

std::string to_string(MarginRegime regime);
MarginRegime parse_margin_regime(const std::string& text);

/// Mark-ups of the 25 benchmark items.
std::span<const double> benchmark_markups(MarginRegime regime);

/// Benchmark demand law for case 1..9.
GroundTruthDistribution benchmark_case(int case_id);

struct ExperimentConfig {
    std::size_t n = 25;
    MarginRegime margin = MarginRegime::Low;
    int case_id = 1;
    std::size_t grid_points = 101;
    std::uint64_t seed = 0;
};

/// Items with known demand, the input to a sweep.
struct SweepInput {
    std::vector<ItemEconomics> econ;
    std::vector<GroundTruthDistribution> dists;
    /// Partial information the robust policies see; derived from the ground
    /// truths when empty.
    std::vector<MomentSpec> specs;
    std::size_t grid_points = 101;
    std::uint64_t seed = 0;
};

/// n items with c = d = 1, the regime's first n mark-ups and the case's law.
SweepInput make_experiment(const ExperimentConfig& config);

/// Instance with the input's moments (budget left at 0).
Instance moment_instance(const SweepInput& input);

struct SweepRow {
    double budget = 0.0;
    PolicyModel policy = PolicyModel::RobustUpper;
    std::vector<double> q;
    double cost_upper = 0.0;
    double cost_lower = 0.0;
    double cost_true = 0.0;
    double evai = 0.0;
};

/// Policies in the order rows are emitted for each budget.
std::span<const PolicyModel> sweep_policies();

/// Budget sum of c_i q_i* for the unconstrained full-information optimum.
double optimal_budget(const SweepInput& input);

/// One row per policy in sweep_policies() order at a single budget.
std::vector<SweepRow> evaluate_policies(const SweepInput& input, double budget);

/**
 * @brief Evaluate every policy on grid_points budgets from 0 to the
 * unconstrained full-information spend.
 *
 * Budgets are processed concurrently (at most ROBUST_NV_THREADS workers);
 * rows are ordered by budget, then by sweep_policies().
 */
std::vector<SweepRow> budget_sweep(const SweepInput& input);

}  // namespace robust_nv
