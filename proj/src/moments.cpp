#include "robust_nv/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace robust_nv {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

constexpr double kDropProb = 1e-14;

bool degenerate_support(const MomentSpec& s) {
    return s.mu - s.a <= kMomentTol || s.b - s.mu <= kMomentTol;
}

}  // namespace

double MomentSpec::max_delta() const {
    if (b - a <= 0.0) return 0.0;
    return 2.0 * (b - mu) * (mu - a) / (b - a);
}

ValidationReport validate_moment_spec(const MomentSpec& s) {
    ValidationReport r;
    for (double v : {s.a, s.mu, s.b, s.delta}) {
        if (!std::isfinite(v)) {
            r.violations.push_back("moments must be finite numbers");
            return r;
        }
    }
    if (s.a < -kMomentTol) r.violations.push_back("support lower bound a=" + fmt(s.a) + " is negative");
    if (s.mu < s.a - kMomentTol) r.violations.push_back("mean mu=" + fmt(s.mu) + " is below a=" + fmt(s.a));
    if (s.mu > s.b + kMomentTol) r.violations.push_back("mean mu=" + fmt(s.mu) + " is above b=" + fmt(s.b));
    if (s.delta < -kMomentTol) r.violations.push_back("delta=" + fmt(s.delta) + " is negative");

    if (r.ok()) {
        if (degenerate_support(s)) {
            if (s.delta > kMomentTol) {
                r.violations.push_back("delta must be 0 when mu coincides with a support endpoint (delta=" +
                                       fmt(s.delta) + ")");
            }
        } else {
            const double bound = s.max_delta();
            if (s.delta > bound + kMomentTol) {
                r.violations.push_back("delta exceeds 2(b-mu)(mu-a)/(b-a)=" + fmt(bound) +
                                       " (delta=" + fmt(s.delta) + ")");
            } else if (s.delta >= bound - kMomentTol) {
                r.notes.push_back("delta equals its upper bound " + fmt(bound) +
                                  "; the worst case puts no mass on mu");
            }
        }
    }

    if (s.beta) {
        const double beta = *s.beta;
        if (!std::isfinite(beta) || beta < -kMomentTol || beta > 1.0 + kMomentTol) {
            r.violations.push_back("beta=" + fmt(beta) + " is not a probability");
        } else if (r.ok() && s.delta > 0.0) {
            // With delta = 0 any beta is attainable (point mass at mu gives 1,
            // but the bounds collapse to [0, 1]); otherwise both sides of mu
            // have room since the support is not degenerate.
            const double lo = s.b > s.mu ? s.delta / (2.0 * (s.b - s.mu)) : 0.0;
            const double hi = s.mu > s.a ? 1.0 - s.delta / (2.0 * (s.mu - s.a)) : 1.0;
            if (beta < lo - kMomentTol || beta > hi + kMomentTol) {
                r.violations.push_back("beta=" + fmt(beta) + " outside [delta/(2(b-mu)), 1-delta/(2(mu-a))]=[" +
                                       fmt(lo) + ", " + fmt(hi) + "]");
            }
        }
    }
    if (s.sigma) {
        const double sigma = *s.sigma;
        if (!std::isfinite(sigma) || sigma < 0.0) {
            r.violations.push_back("sigma=" + fmt(sigma) + " must be nonnegative");
        } else if (s.delta > sigma + kMomentTol) {
            r.violations.push_back("delta=" + fmt(s.delta) + " exceeds sigma=" + fmt(sigma));
        }
    }
    return r;
}

void require_valid(const MomentSpec& spec) {
    const auto report = validate_moment_spec(spec);
    if (report.ok()) return;
    std::string msg = "infeasible moments:";
    for (const auto& v : report.violations) msg += " " + v + ";";
    msg.pop_back();
    throw std::invalid_argument(msg);
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> points, std::vector<double> probs) {
    if (points.size() != probs.size() || points.empty()) {
        throw std::invalid_argument("discrete distribution: need equally many points and probabilities");
    }
    std::vector<std::pair<double, double>> pairs;
    double total = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (!std::isfinite(points[k]) || !std::isfinite(probs[k]) || probs[k] < -1e-12) {
            throw std::invalid_argument("discrete distribution: invalid point or probability");
        }
        total += probs[k];
        if (probs[k] >= kDropProb) pairs.emplace_back(points[k], probs[k]);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("discrete distribution: probabilities sum to " + fmt(total));
    }
    if (pairs.empty()) throw std::invalid_argument("discrete distribution: no positive mass");
    std::sort(pairs.begin(), pairs.end());
    double kept = 0.0;
    for (const auto& [x, p] : pairs) {
        if (!points_.empty() && points_.back() == x) {
            probs_.back() += p;
        } else {
            points_.push_back(x);
            probs_.push_back(p);
        }
        kept += p;
    }
    for (double& p : probs_) p /= kept;
}

double DiscreteDistribution::mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < size(); ++k) m += probs_[k] * points_[k];
    return m;
}

double DiscreteDistribution::mad() const {
    const double m = mean();
    double v = 0.0;
    for (std::size_t k = 0; k < size(); ++k) v += probs_[k] * std::abs(points_[k] - m);
    return v;
}

double DiscreteDistribution::variance() const {
    const double m = mean();
    double v = 0.0;
    for (std::size_t k = 0; k < size(); ++k) v += probs_[k] * (points_[k] - m) * (points_[k] - m);
    return v;
}

double DiscreteDistribution::expected_shortfall(double q) const {
    double v = 0.0;
    for (std::size_t k = 0; k < size(); ++k) v += probs_[k] * std::max(0.0, points_[k] - q);
    return v;
}

double DiscreteDistribution::prob_at_least(double x) const {
    double v = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
        if (points_[k] >= x) v += probs_[k];
    }
    return v;
}

DiscreteDistribution worst_case_three_point(const MomentSpec& s) {
    require_valid(s);
    if (s.delta == 0.0 || degenerate_support(s)) return DiscreteDistribution::point_mass(s.mu);
    const double pa = s.delta / (2.0 * (s.mu - s.a));
    const double pb = s.delta / (2.0 * (s.b - s.mu));
    const double pm = std::max(0.0, 1.0 - pa - pb);
    return DiscreteDistribution({s.a, s.mu, s.b}, {pa, pm, pb});
}

DiscreteDistribution best_case_two_point(const MomentSpec& s) {
    if (!s.beta) throw std::invalid_argument("beta required for the best-case two-point law");
    require_valid(s);
    const double beta = *s.beta;
    if (s.delta == 0.0 || beta <= 0.0 || beta >= 1.0) return DiscreteDistribution::point_mass(s.mu);
    const double hi = std::min(s.b, s.mu + s.delta / (2.0 * beta));
    const double lo = std::max(s.a, s.mu - s.delta / (2.0 * (1.0 - beta)));
    return DiscreteDistribution({lo, hi}, {1.0 - beta, beta});
}

DiscreteDistribution em_two_point(const MomentSpec& s) {
    if (!(s.a <= s.mu && s.mu <= s.b)) {
        throw std::invalid_argument("infeasible moments: mean outside [a, b]");
    }
    if (s.b == s.a) return DiscreteDistribution::point_mass(s.a);
    const double width = s.b - s.a;
    return DiscreteDistribution({s.a, s.b}, {(s.b - s.mu) / width, (s.mu - s.a) / width});
}

namespace {

struct MadVisitor {
    double operator()(const family::Uniform& u) const {
        if (u.b < u.a) throw std::invalid_argument("uniform: b < a");
        return (u.b - u.a) / 4.0;
    }
    double operator()(const family::Beta& f) const {
        if (f.k <= 0.0 || f.lambda <= 0.0 || f.b < f.a) throw std::invalid_argument("beta: invalid parameters");
        const double s = f.k + f.lambda;
        const double log_mad = std::log(2.0) + f.k * std::log(f.k) + f.lambda * std::log(f.lambda) +
                               std::lgamma(s) - (s + 1.0) * std::log(s) - std::lgamma(f.k) -
                               std::lgamma(f.lambda);
        return std::exp(log_mad) * (f.b - f.a);
    }
    double operator()(const family::Triangular& t) const {
        const double a = t.a, b = t.b, c = t.mode;
        if (!(a <= c && c <= b)) throw std::invalid_argument("triangular: mode outside [a, b]");
        if (a == b) return 0.0;
        // The two branches coincide at a + b = 2c.
        if (a + b <= 2.0 * c) return 2.0 * std::pow(b + c - 2.0 * a, 3) / (81.0 * (a - b) * (a - c));
        return 2.0 * std::pow(a + c - 2.0 * b, 3) / (81.0 * (a - b) * (b - c));
    }
    double operator()(const family::Normal& n) const {
        if (n.sigma < 0.0) throw std::invalid_argument("normal: negative sigma");
        return std::sqrt(2.0 / M_PI) * n.sigma;
    }
    double operator()(const family::Gamma& g) const {
        if (g.k <= 0.0 || g.lambda <= 0.0) throw std::invalid_argument("gamma: invalid parameters");
        return std::exp(std::log(2.0) + g.k * std::log(g.k) - std::lgamma(g.k) - g.k) / g.lambda;
    }
};

}  // namespace

double mad_of_named_distribution(const NamedDistribution& dist) { return std::visit(MadVisitor{}, dist); }

double mad_of_named_distribution(std::string_view name, std::span<const double> p) {
    auto need = [&](std::size_t n) {
        if (p.size() != n) {
            throw std::invalid_argument(std::string(name) + ": expected " + std::to_string(n) + " parameters");
        }
    };
    if (name == "uniform") {
        need(2);
        return mad_of_named_distribution(family::Uniform{p[0], p[1]});
    }
    if (name == "beta") {
        need(4);
        return mad_of_named_distribution(family::Beta{p[0], p[1], p[2], p[3]});
    }
    if (name == "triangular") {
        need(3);
        return mad_of_named_distribution(family::Triangular{p[0], p[1], p[2]});
    }
    if (name == "normal") {
        need(2);
        return mad_of_named_distribution(family::Normal{p[0], p[1]});
    }
    if (name == "gamma") {
        need(2);
        return mad_of_named_distribution(family::Gamma{p[0], p[1]});
    }
    throw std::invalid_argument("unknown distribution family '" + std::string(name) + "'");
}

}  // namespace robust_nv
