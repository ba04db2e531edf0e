/**
 * @file moments.hpp
 * @brief Mean-MAD-range ambiguity data and its extremal distributions.
 */

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace robust_nv {

/// Absolute slack allowed on the moment bound inequalities.
inline constexpr double kMomentTol = 1e-9;

/**
 * @brief Partial information about one demand (or yield) variable: support
 *        [a, b], mean mu, mean absolute deviation delta, and optionally
 *        beta = P(D >= mu) and the standard deviation.
 */
struct MomentSpec {
    double a = 0.0;
    double mu = 0.0;
    double b = 0.0;
    double delta = 0.0;
    std::optional<double> beta;
    std::optional<double> sigma;

    /// Largest MAD any law on [a, b] with mean mu can have.
    double max_delta() const;

    bool operator==(const MomentSpec&) const = default;
};

struct ValidationReport {
    std::vector<std::string> violations;
    /// Accepted but noteworthy conditions (e.g. delta on its upper bound).
    std::vector<std::string> notes;

    bool ok() const { return violations.empty(); }
};

ValidationReport validate_moment_spec(const MomentSpec& spec);

/// Throws std::invalid_argument("infeasible moments: ...") listing violations.
void require_valid(const MomentSpec& spec);

/**
 * @brief Finite law with strictly increasing support.
 *
 * Construction drops points with probability below 1e-14, merges equal
 * points and renormalizes.
 */
class DiscreteDistribution {
public:
    DiscreteDistribution(std::vector<double> points, std::vector<double> probs);

    static DiscreteDistribution point_mass(double x) { return DiscreteDistribution({x}, {1.0}); }

    std::span<const double> points() const { return points_; }
    std::span<const double> probs() const { return probs_; }
    std::size_t size() const { return points_.size(); }

    double mean() const;
    double mad() const;
    double variance() const;
    /// E (D - q)^+
    double expected_shortfall(double q) const;
    double prob_at_least(double x) const;

private:
    std::vector<double> points_;
    std::vector<double> probs_;
};

/// Worst case of E (D - q)^+ for every q: mass on {a, mu, b}.
DiscreteDistribution worst_case_three_point(const MomentSpec& spec);

/// Best case when beta is known: mass beta at mu + delta/(2 beta) and
/// 1 - beta at mu - delta/(2 (1 - beta)).
DiscreteDistribution best_case_two_point(const MomentSpec& spec);

/// Mean-range worst case (Edmundson-Madansky): mass on {a, b}.
DiscreteDistribution em_two_point(const MomentSpec& spec);

namespace family {
struct Uniform {
    double a, b;
};
/// Beta(k, lambda) rescaled linearly to [a, b].
struct Beta {
    double k, lambda, a, b;
};
struct Triangular {
    double a, b, mode;
};
struct Normal {
    double mu, sigma;
};
/// Shape k and rate lambda, so the mean is k / lambda.
struct Gamma {
    double k, lambda;
};
}  // namespace family

using NamedDistribution =
    std::variant<family::Uniform, family::Beta, family::Triangular, family::Normal, family::Gamma>;

/// Closed-form MAD of a named family.
double mad_of_named_distribution(const NamedDistribution& dist);

/**
 * @brief Name-based overload. Parameter order: uniform(a, b),
 *        beta(k, lambda, a, b), triangular(a, b, mode), normal(mu, sigma),
 *        gamma(k, lambda). Throws on unknown names or wrong arity.
 */
double mad_of_named_distribution(std::string_view family, std::span<const double> params);

}  // namespace robust_nv
