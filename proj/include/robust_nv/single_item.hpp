/**
 * @file single_item.hpp
 * @brief Classical and distribution-free single-item newsvendor.
 *
 * Costs are expressed relative to selling at cost: ordering q against demand
 * D costs c * (d (q - D) + (m + d) (D - q)^+), where the mark-up m gives the
 * selling price p = c (1 + m) and the discount d the salvage value
 * s = (1 - d) c.
 */

#pragma once

#include <array>
#include <functional>

#include "robust_nv/lp.hpp"
#include "robust_nv/moments.hpp"

namespace robust_nv {

struct ItemEconomics {
    double c = 1.0;
    double m = 1.0;
    double d = 1.0;

    double price() const { return c * (1.0 + m); }
    double salvage() const { return (1.0 - d) * c; }
    double critical_ratio() const { return m / (m + d); }

    bool operator==(const ItemEconomics&) const = default;
};

/// Throws std::invalid_argument unless c, m, d are all positive and finite.
void require_valid(const ItemEconomics& econ);

/// c (d (q - mu) + (m + d) E (D - q)^+) for a discrete demand law.
double expected_cost(const ItemEconomics& econ, const DiscreteDistribution& demand, double q);

struct ClassicalQuantity {
    double q = 0.0;
    /// False when F(hi) never reaches m / (m + d); q is then hi.
    bool ratio_reached = true;
};

/// Smallest q in [lo, hi] with cdf(q) >= m / (m + d), by bisection to 1e-10.
ClassicalQuantity classical_optimal_quantity(const ItemEconomics& econ,
                                             const std::function<double(double)>& cdf, double lo,
                                             double hi);

/// Worst-case expected cost over all demand laws matching (a, mu, b, delta).
/// Beyond b the cost grows with slope c d.
double worst_case_cost(const ItemEconomics& econ, const MomentSpec& spec, double q);

struct AffinePiece {
    double slope = 0.0;
    double intercept = 0.0;

    double operator()(double q) const { return slope * q + intercept; }
};

/**
 * @brief worst_case_cost on [0, b] as max of three affine pieces.
 *
 * Piece 0 is active on [0, a], piece 1 on [a, mu] and piece 2 on [mu, b].
 * Slopes are nondecreasing and the first one is always -c m.
 */
struct PwlCost {
    std::array<AffinePiece, 3> pieces{};
    double a = 0.0;
    double mu = 0.0;
    double b = 0.0;

    double operator()(double q) const;
    PwlFunction as_function() const;
};

PwlCost pwl_pieces(const ItemEconomics& econ, const MomentSpec& spec);

/// Minimizer of worst_case_cost. When a piece is flat the minimizers form
/// [interval_lo, interval_hi] and q is its left end.
struct RobustQuantity {
    double q = 0.0;
    double interval_lo = 0.0;
    double interval_hi = 0.0;

    bool tie() const { return interval_hi > interval_lo; }
};

RobustQuantity robust_quantity_thm1(const ItemEconomics& econ, const MomentSpec& spec);

struct ScarfQuantity {
    double q = 0.0;
    /// The unconstrained minimizer was negative and has been raised to 0.
    bool clamped = false;
};

/// Minimizer of the mean-variance worst-case cost:
/// mu + (sigma / 2) (sqrt(m / d) - sqrt(d / m)).
ScarfQuantity scarf_quantity(const ItemEconomics& econ, double mu, double sigma);

/// c (d (q - mu) + (m + d) (sqrt(sigma^2 + (mu - q)^2) + (mu - q)) / 2).
double scarf_cost(const ItemEconomics& econ, double mu, double sigma, double q);

}  // namespace robust_nv
