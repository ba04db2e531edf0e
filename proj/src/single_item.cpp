#include "robust_nv/single_item.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace robust_nv {

namespace {

// Flat-slope tolerance per unit of purchase cost.
constexpr double kFlatSlope = 1e-12;

// delta / (2 * gap), zero when there is no dispersion or no room on that side.
double side_mass(double delta, double gap) {
    if (delta == 0.0 || gap <= kMomentTol) return 0.0;
    return delta / (2.0 * gap);
}

}  // namespace

void require_valid(const ItemEconomics& e) {
    if (!(std::isfinite(e.c) && e.c > 0.0)) throw std::invalid_argument("purchase cost c must be positive");
    if (!(std::isfinite(e.m) && e.m > 0.0)) throw std::invalid_argument("mark-up m must be positive");
    if (!(std::isfinite(e.d) && e.d > 0.0)) throw std::invalid_argument("discount d must be positive");
}

double expected_cost(const ItemEconomics& e, const DiscreteDistribution& demand, double q) {
    return e.c * (e.d * (q - demand.mean()) + (e.m + e.d) * demand.expected_shortfall(q));
}

ClassicalQuantity classical_optimal_quantity(const ItemEconomics& econ,
                                             const std::function<double(double)>& cdf, double lo,
                                             double hi) {
    require_valid(econ);
    const double ratio = econ.critical_ratio();
    if (cdf(hi) < ratio) return {hi, false};
    if (cdf(lo) >= ratio) return {lo, true};
    // invariant: cdf(lo) < ratio <= cdf(hi)
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (cdf(mid) >= ratio) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {hi, true};
}

double worst_case_cost(const ItemEconomics& e, const MomentSpec& s, double q) {
    require_valid(s);
    const double pa = side_mass(s.delta, s.mu - s.a);
    const double pb = side_mass(s.delta, s.b - s.mu);
    const double pm = 1.0 - pa - pb;
    const double shortfall =
        pa * std::max(0.0, s.a - q) + pm * std::max(0.0, s.mu - q) + pb * std::max(0.0, s.b - q);
    return e.c * (e.d * (q - s.mu) + (e.m + e.d) * shortfall);
}

double PwlCost::operator()(double q) const {
    return std::max({pieces[0](q), pieces[1](q), pieces[2](q)});
}

PwlFunction PwlCost::as_function() const {
    PwlFunction f;
    for (const auto& p : pieces) {
        f.slopes.push_back(p.slope);
        f.intercepts.push_back(p.intercept);
    }
    return f;
}

PwlCost pwl_pieces(const ItemEconomics& e, const MomentSpec& s) {
    require_valid(e);
    require_valid(s);
    const double pa = side_mass(s.delta, s.mu - s.a);
    const double pb = side_mass(s.delta, s.b - s.mu);
    const double md = e.m + e.d;
    PwlCost out;
    out.a = s.a;
    out.mu = s.mu;
    out.b = s.b;
    out.pieces[0] = {-e.c * e.m, e.c * e.m * s.mu};
    out.pieces[1] = {e.c * (pa * md - e.m), e.c * md * (s.mu - pa * s.a) - e.c * e.d * s.mu};
    out.pieces[2] = {e.c * (e.d - pb * md), e.c * pb * md * s.b - e.c * e.d * s.mu};
    return out;
}

RobustQuantity robust_quantity_thm1(const ItemEconomics& e, const MomentSpec& s) {
    const PwlCost cost = pwl_pieces(e, s);
    const double tol = kFlatSlope * e.c;
    const double slope1 = cost.pieces[1].slope;
    const double slope2 = cost.pieces[2].slope;

    // Piece 0 always descends (m > 0). Walk right while the next piece
    // keeps descending.
    if (slope1 > tol) return {s.a, s.a, s.a};
    if (std::abs(slope1) <= tol) {
        // Flat on [a, mu]; if piece 2 is flat as well the whole [a, b] ties.
        const double hi = std::abs(slope2) <= tol ? s.b : s.mu;
        return {s.a, s.a, hi};
    }
    if (slope2 > tol) return {s.mu, s.mu, s.mu};
    if (std::abs(slope2) <= tol) return {s.mu, s.mu, s.b};
    return {s.b, s.b, s.b};
}

ScarfQuantity scarf_quantity(const ItemEconomics& e, double mu, double sigma) {
    require_valid(e);
    if (sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
    const double q = mu + 0.5 * sigma * (std::sqrt(e.m / e.d) - std::sqrt(e.d / e.m));
    if (q < 0.0) return {0.0, true};
    return {q, false};
}

double scarf_cost(const ItemEconomics& e, double mu, double sigma, double q) {
    const double gap = mu - q;
    return e.c * (e.d * (q - mu) + (e.m + e.d) * 0.5 * (std::hypot(sigma, gap) + gap));
}

}  // namespace robust_nv
