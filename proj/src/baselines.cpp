#include "robust_nv/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

namespace robust_nv {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double triangular_shortfall(const family::Triangular& t, double q) {
    const double a = t.a, b = t.b, c = t.mode;
    if (q >= b) return 0.0;
    if (q <= a) return (a + b + c) / 3.0 - q;
    if (q >= c) return std::pow(b - q, 3) / (3.0 * (b - a) * (b - c));
    // integral of the survival function over [q, c] plus the tail beyond c
    return (c - q) - (std::pow(c - a, 3) - std::pow(q - a, 3)) / (3.0 * (b - a) * (c - a)) +
           (b - c) * (b - c) / (3.0 * (b - a));
}

double triangular_cdf(const family::Triangular& t, double x) {
    if (x <= t.a) return 0.0;
    if (x >= t.b) return 1.0;
    if (x <= t.mode) return (x - t.a) * (x - t.a) / ((t.b - t.a) * (t.mode - t.a));
    return 1.0 - (t.b - x) * (t.b - x) / ((t.b - t.a) * (t.b - t.mode));
}

double triangular_quantile(const family::Triangular& t, double p) {
    const double split = (t.mode - t.a) / (t.b - t.a);
    if (p <= split) return t.a + std::sqrt(p * (t.b - t.a) * (t.mode - t.a));
    return t.b - std::sqrt((1.0 - p) * (t.b - t.a) * (t.b - t.mode));
}

std::size_t worker_count(std::size_t jobs) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ROBUST_NV_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("length mismatch between items and distributions");
}

}  // namespace

GroundTruthDistribution::GroundTruthDistribution(Family f) : family_(std::move(f)) {
    std::visit(Overloaded{
                   [this](const family::Uniform& u) {
                       if (!(u.a < u.b)) throw std::invalid_argument("uniform requires a < b");
                       lo_ = u.a;
                       hi_ = u.b;
                       mean_ = 0.5 * (u.a + u.b);
                       mad_ = mad_of_named_distribution(u);
                       sigma_ = (u.b - u.a) / std::sqrt(12.0);
                       beta_ = 0.5;
                   },
                   [this](const family::Beta& be) {
                       if (!(be.k > 0 && be.lambda > 0 && be.a < be.b))
                           throw std::invalid_argument("beta requires k, lambda > 0 and a < b");
                       const double s = be.k + be.lambda;
                       const double w = be.b - be.a;
                       lo_ = be.a;
                       hi_ = be.b;
                       mean_ = be.a + w * be.k / s;
                       mad_ = mad_of_named_distribution(be);
                       sigma_ = w * std::sqrt(be.k * be.lambda / (s * s * (s + 1.0)));
                       beta_ = boost::math::ibetac(be.k, be.lambda, be.k / s);
                   },
                   [this](const family::Triangular& t) {
                       if (!(t.a < t.b && t.a <= t.mode && t.mode <= t.b))
                           throw std::invalid_argument("triangular requires a <= mode <= b and a < b");
                       lo_ = t.a;
                       hi_ = t.b;
                       mean_ = (t.a + t.b + t.mode) / 3.0;
                       mad_ = mad_of_named_distribution(t);
                       sigma_ = std::sqrt((t.a * t.a + t.b * t.b + t.mode * t.mode - t.a * t.b - t.a * t.mode -
                                           t.b * t.mode) /
                                          18.0);
                       beta_ = 1.0 - triangular_cdf(t, mean_);
                   },
                   [this](const DiscreteDistribution& d) {
                       lo_ = d.points().front();
                       hi_ = d.points().back();
                       mean_ = d.mean();
                       mad_ = d.mad();
                       sigma_ = std::sqrt(d.variance());
                       beta_ = d.prob_at_least(mean_);
                   },
               },
               family_);
    if (lo_ < 0.0) throw std::invalid_argument("demand support must be nonnegative");
}

GroundTruthDistribution GroundTruthDistribution::uniform(double a, double b) {
    return GroundTruthDistribution(family::Uniform{a, b});
}
GroundTruthDistribution GroundTruthDistribution::beta(double k, double lambda, double a, double b) {
    return GroundTruthDistribution(family::Beta{k, lambda, a, b});
}
GroundTruthDistribution GroundTruthDistribution::triangular(double a, double b, double mode) {
    return GroundTruthDistribution(family::Triangular{a, b, mode});
}
GroundTruthDistribution GroundTruthDistribution::discrete(std::vector<double> points, std::vector<double> probs) {
    return GroundTruthDistribution(DiscreteDistribution(std::move(points), std::move(probs)));
}

std::string GroundTruthDistribution::name() const {
    return std::visit(Overloaded{
                          [](const family::Uniform&) { return std::string("uniform"); },
                          [](const family::Beta&) { return std::string("beta"); },
                          [](const family::Triangular&) { return std::string("triangular"); },
                          [](const DiscreteDistribution&) { return std::string("discrete"); },
                      },
                      family_);
}

double GroundTruthDistribution::cdf(double x) const {
    return std::visit(Overloaded{
                          [x](const family::Uniform& u) { return std::clamp((x - u.a) / (u.b - u.a), 0.0, 1.0); },
                          [x](const family::Beta& be) {
                              if (x <= be.a) return 0.0;
                              if (x >= be.b) return 1.0;
                              return boost::math::ibeta(be.k, be.lambda, (x - be.a) / (be.b - be.a));
                          },
                          [x](const family::Triangular& t) { return triangular_cdf(t, x); },
                          [x](const DiscreteDistribution& d) {
                              double p = 0.0;
                              for (std::size_t k = 0; k < d.size() && d.points()[k] <= x; ++k) p += d.probs()[k];
                              return std::min(p, 1.0);
                          },
                      },
                      family_);
}

double GroundTruthDistribution::quantile(double p) const {
    if (p <= 0.0) return lo_;
    if (p >= 1.0) return hi_;
    return std::visit(Overloaded{
                          [p](const family::Uniform& u) { return u.a + p * (u.b - u.a); },
                          [p](const family::Beta& be) {
                              return be.a + (be.b - be.a) * boost::math::ibeta_inv(be.k, be.lambda, p);
                          },
                          [p](const family::Triangular& t) { return triangular_quantile(t, p); },
                          [p](const DiscreteDistribution& d) {
                              double acc = 0.0;
                              for (std::size_t k = 0; k < d.size(); ++k) {
                                  acc += d.probs()[k];
                                  if (acc >= p - 1e-15) return d.points()[k];
                              }
                              return d.points().back();
                          },
                      },
                      family_);
}

double GroundTruthDistribution::expected_shortfall(double q) const {
    if (q >= hi_) return 0.0;
    if (q <= lo_) return mean_ - q;
    return std::visit(Overloaded{
                          [q](const family::Uniform& u) { return (u.b - q) * (u.b - q) / (2.0 * (u.b - u.a)); },
                          [q](const family::Beta& be) {
                              const double w = be.b - be.a;
                              const double t = (q - be.a) / w;
                              const double s = be.k + be.lambda;
                              // E (Y - t)^+ = E[Y; Y > t] - t P(Y > t)
                              const double part = be.k / s * boost::math::ibetac(be.k + 1.0, be.lambda, t) -
                                                  t * boost::math::ibetac(be.k, be.lambda, t);
                              return w * std::max(0.0, part);
                          },
                          [q](const family::Triangular& t) { return triangular_shortfall(t, q); },
                          [q](const DiscreteDistribution& d) { return d.expected_shortfall(q); },
                      },
                      family_);
}

MomentSpec GroundTruthDistribution::moments() const {
    return MomentSpec{lo_, mean_, hi_, mad_, beta_, sigma_};
}

double true_cost(const ItemEconomics& e, const GroundTruthDistribution& dist, double q) {
    return e.c * (e.d * (q - dist.mean()) + (e.m + e.d) * dist.expected_shortfall(q));
}

double true_cost(std::span<const ItemEconomics> econ, std::span<const GroundTruthDistribution> dists,
                 std::span<const double> q) {
    check_lengths(econ.size(), dists.size());
    check_lengths(econ.size(), q.size());
    double total = 0.0;
    for (std::size_t i = 0; i < econ.size(); ++i) total += true_cost(econ[i], dists[i], q[i]);
    return total;
}

FullInfoPolicy full_info_optimal(std::span<const ItemEconomics> econ, std::span<const GroundTruthDistribution> dists,
                                 double budget) {
    check_lengths(econ.size(), dists.size());
    if (!(budget >= 0.0)) throw std::invalid_argument("budget must be nonnegative");
    const std::size_t n = econ.size();

    auto quantities = [&](double lambda) {
        std::vector<double> q(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& e = econ[i];
            if (lambda < e.m) q[i] = dists[i].quantile((e.m - lambda) / (e.m + e.d));
        }
        return q;
    };
    auto spend = [&](const std::vector<double>& q) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += econ[i].c * q[i];
        return s;
    };

    FullInfoPolicy out;
    out.policy.provenance = PolicyModel::FullInfo;
    auto q0 = quantities(0.0);
    if (spend(q0) <= budget) {
        out.policy.q = std::move(q0);
    } else {
        // spend(lambda) is nonincreasing; bracket the crossing.
        double lo = 0.0, hi = 0.0;
        for (const auto& e : econ) hi = std::max(hi, e.m);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (spend(quantities(mid)) > budget) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Items whose quantity jumps inside [lo, hi] share the residual
        // proportionally; they are indifferent at the multiplier.
        const auto q_hi = quantities(hi);
        const auto q_lo = quantities(lo);
        const double residual = budget - spend(q_hi);
        const double span = spend(q_lo) - spend(q_hi);
        const double t = span > 0.0 ? std::clamp(residual / span, 0.0, 1.0) : 0.0;
        out.policy.q.resize(n);
        for (std::size_t i = 0; i < n; ++i) out.policy.q[i] = q_hi[i] + t * (q_lo[i] - q_hi[i]);
        out.multiplier = hi;
    }
    out.policy.spent = spend(out.policy.q);
    out.policy.objective = true_cost(econ, dists, out.policy.q);
    return out;
}

double gallego_moon_objective(std::span<const ItemEconomics> econ, std::span<const MeanSigma> ms,
                              std::span<const double> q) {
    check_lengths(econ.size(), ms.size());
    check_lengths(econ.size(), q.size());
    double total = 0.0;
    for (std::size_t i = 0; i < econ.size(); ++i) total += scarf_cost(econ[i], ms[i].mu, ms[i].sigma, q[i]);
    return total;
}

double gallego_moon_quantity(const ItemEconomics& e, const MeanSigma& ms, double lambda) {
    // d/dq [C^S(q) + lambda c q] = 0 gives (q - mu) / sqrt(sigma^2 + (q - mu)^2) = r
    const double r = (e.m - e.d - 2.0 * lambda) / (e.m + e.d);
    if (r <= -1.0) return 0.0;
    if (ms.sigma == 0.0) return std::max(0.0, ms.mu);
    return std::max(0.0, ms.mu + ms.sigma * r / std::sqrt(1.0 - r * r));
}

OrderingPolicy gallego_moon_policy(std::span<const ItemEconomics> econ, std::span<const MeanSigma> ms,
                                   double budget) {
    check_lengths(econ.size(), ms.size());
    if (!(budget >= 0.0)) throw std::invalid_argument("budget must be nonnegative");
    const std::size_t n = econ.size();
    for (const auto& x : ms) {
        if (!(x.sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    }
    auto quantities = [&](double lambda) {
        std::vector<double> q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = gallego_moon_quantity(econ[i], ms[i], lambda);
        return q;
    };
    auto spend = [&](const std::vector<double>& q) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += econ[i].c * q[i];
        return s;
    };

    OrderingPolicy pol;
    pol.provenance = PolicyModel::MeanVariance;
    pol.q = quantities(0.0);
    if (spend(pol.q) > budget) {
        double lo = 0.0, hi = 0.0;
        for (const auto& e : econ) hi = std::max(hi, e.m);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (spend(quantities(mid)) > budget) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const auto q_hi = quantities(hi);
        const auto q_lo = quantities(lo);
        const double residual = budget - spend(q_hi);
        const double span = spend(q_lo) - spend(q_hi);
        const double t = span > 0.0 ? std::clamp(residual / span, 0.0, 1.0) : 0.0;
        for (std::size_t i = 0; i < n; ++i) pol.q[i] = q_hi[i] + t * (q_lo[i] - q_hi[i]);
    }
    pol.spent = spend(pol.q);
    pol.objective = gallego_moon_objective(econ, ms, pol.q);
    return pol;
}

RankedList build_em_ranked_list(const Instance& inst) {
    std::vector<SegmentedCost> segs;
    segs.reserve(inst.size());
    for (const auto& it : inst.items) segs.push_back(segments_from_distribution(it.econ, em_two_point(it.spec)));
    return rank_segments(segs);
}

double evaluate_em(const Instance& inst, std::span<const double> q) {
    check_lengths(inst.size(), q.size());
    double total = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        total += expected_cost(inst.items[i].econ, em_two_point(inst.items[i].spec), q[i]);
    }
    return total;
}

OrderingPolicy em_policy(const Instance& inst, const RankedList& list, double budget) {
    auto pol = greedy_fill(list, budget, PolicyModel::MeanRange);
    pol.objective = evaluate_em(inst, pol.q);
    return pol;
}

OrderingPolicy em_policy(const Instance& inst) {
    require_valid(inst);
    return em_policy(inst, build_em_ranked_list(inst), inst.budget);
}

double evai(std::span<const double> q, std::span<const double> q_star, std::span<const ItemEconomics> econ,
            std::span<const GroundTruthDistribution> dists) {
    const double best = true_cost(econ, dists, q_star);
    if (!(std::abs(best) > 1e-12)) throw std::domain_error("EVAI undefined at zero optimal cost");
    return (true_cost(econ, dists, q) - best) / best;
}

std::string to_string(MarginRegime regime) {
    switch (regime) {
        case MarginRegime::Low: return "low";
        case MarginRegime::Average: return "average";
        case MarginRegime::High: return "high";
    }
    return "unknown";
}

MarginRegime parse_margin_regime(const std::string& text) {
    if (text == "low") return MarginRegime::Low;
    if (text == "average") return MarginRegime::Average;
    if (text == "high") return MarginRegime::High;
    throw std::invalid_argument("unknown margin regime '" + text + "' (expected low, average or high)");
}

std::span<const double> benchmark_markups(MarginRegime regime) {
    static constexpr double low[] = {0.1,  0.14, 0.18, 0.21, 0.25, 0.29, 0.33, 0.36, 0.4,  0.44, 0.48, 0.51, 0.55,
                                     0.59, 0.63, 0.66, 0.7,  0.74, 0.78, 0.81, 0.85, 0.89, 0.93, 0.96, 1.0};
    static constexpr double average[] = {1.0,  1.13, 1.25, 1.38, 1.5,  1.63, 1.75, 1.88, 2.0,
                                         2.13, 2.25, 2.38, 2.5,  2.63, 2.75, 2.88, 3.0,  3.13,
                                         3.25, 3.38, 3.5,  3.63, 3.75, 3.88, 4.0};
    static constexpr double high[] = {4.0,  4.21, 4.42, 4.63, 4.83, 5.04, 5.25, 5.46, 5.67,
                                      5.88, 6.08, 6.29, 6.5,  6.71, 6.92, 7.12, 7.33, 7.54,
                                      7.75, 7.96, 8.17, 8.37, 8.58, 8.79, 9.0};
    switch (regime) {
        case MarginRegime::Low: return low;
        case MarginRegime::Average: return average;
        case MarginRegime::High: return high;
    }
    return low;
}

GroundTruthDistribution benchmark_case(int case_id) {
    switch (case_id) {
        case 1: return GroundTruthDistribution::uniform(10, 50);
        case 2: return GroundTruthDistribution::uniform(10, 100);
        case 3: return GroundTruthDistribution::uniform(10, 200);
        case 4: return GroundTruthDistribution::beta(1, 3, 0, 50);
        case 5: return GroundTruthDistribution::beta(2, 2, 0, 50);
        case 6: return GroundTruthDistribution::beta(3, 1, 0, 50);
        case 7: return GroundTruthDistribution::triangular(10, 50, 18);
        case 8: return GroundTruthDistribution::triangular(10, 50, 30);
        case 9: return GroundTruthDistribution::triangular(10, 50, 42);
        default: throw std::invalid_argument("case id must be in 1..9");
    }
}

SweepInput make_experiment(const ExperimentConfig& config) {
    const auto markups = benchmark_markups(config.margin);
    if (config.n < 1 || config.n > markups.size()) throw std::invalid_argument("n must be in 1..25");
    if (config.grid_points < 2) throw std::invalid_argument("grid needs at least 2 points");
    SweepInput input;
    const auto dist = benchmark_case(config.case_id);
    for (std::size_t i = 0; i < config.n; ++i) {
        input.econ.push_back({1.0, markups[i], 1.0});
        input.dists.push_back(dist);
    }
    input.grid_points = config.grid_points;
    input.seed = config.seed;
    return input;
}

Instance moment_instance(const SweepInput& input) {
    check_lengths(input.econ.size(), input.dists.size());
    Instance inst;
    if (!input.specs.empty()) check_lengths(input.econ.size(), input.specs.size());
    for (std::size_t i = 0; i < input.econ.size(); ++i) {
        inst.items.push_back({input.econ[i], input.specs.empty() ? input.dists[i].moments() : input.specs[i]});
    }
    return inst;
}

std::span<const PolicyModel> sweep_policies() {
    static constexpr PolicyModel order[] = {PolicyModel::RobustUpper, PolicyModel::RobustLower,
                                            PolicyModel::MeanRange, PolicyModel::MeanVariance,
                                            PolicyModel::FullInfo};
    return order;
}

double optimal_budget(const SweepInput& input) {
    return full_info_optimal(input.econ, input.dists, std::numeric_limits<double>::max()).policy.spent;
}

namespace {

class PolicyEvaluator {
public:
    explicit PolicyEvaluator(const SweepInput& input)
        : input_(input),
          inst_(moment_instance(input)),
          upper_list_((require_valid(inst_), build_ranked_list(inst_))),
          lower_list_(build_lower_ranked_list(inst_)),
          em_list_(build_em_ranked_list(inst_)) {
        for (std::size_t i = 0; i < inst_.size(); ++i) {
            const auto& spec = inst_.items[i].spec;
            ms_.push_back({spec.mu, spec.sigma.value_or(input.dists[i].sigma())});
        }
    }

    void run(double budget, std::span<SweepRow> out) const {
        const auto star = full_info_optimal(input_.econ, input_.dists, budget).policy;
        const auto policies = sweep_policies();
        for (std::size_t k = 0; k < policies.size(); ++k) {
            OrderingPolicy pol;
            switch (policies[k]) {
                case PolicyModel::RobustUpper: pol = knapsack_allocate(inst_, upper_list_, budget); break;
                case PolicyModel::RobustLower: pol = lower_bound_policy(inst_, lower_list_, budget); break;
                case PolicyModel::MeanRange: pol = em_policy(inst_, em_list_, budget); break;
                case PolicyModel::MeanVariance: pol = gallego_moon_policy(input_.econ, ms_, budget); break;
                case PolicyModel::FullInfo: pol = star; break;
            }
            SweepRow& row = out[k];
            row.budget = budget;
            row.policy = policies[k];
            row.q = pol.q;
            row.cost_upper = evaluate_upper(inst_, pol.q);
            row.cost_lower = evaluate_lower(inst_, pol.q);
            row.cost_true = true_cost(input_.econ, input_.dists, pol.q);
            row.evai = evai(pol.q, star.q, input_.econ, input_.dists);
        }
    }

private:
    const SweepInput& input_;
    Instance inst_;
    RankedList upper_list_;
    RankedList lower_list_;
    RankedList em_list_;
    std::vector<MeanSigma> ms_;
};

}  // namespace

std::vector<SweepRow> evaluate_policies(const SweepInput& input, double budget) {
    if (!(budget >= 0.0)) throw std::invalid_argument("budget must be nonnegative");
    const PolicyEvaluator evaluator(input);
    std::vector<SweepRow> rows(sweep_policies().size());
    evaluator.run(budget, rows);
    return rows;
}

std::vector<SweepRow> budget_sweep(const SweepInput& input) {
    if (input.grid_points < 2) throw std::invalid_argument("grid needs at least 2 points");
    const PolicyEvaluator evaluator(input);
    const double b_opt = optimal_budget(input);
    const std::size_t grid = input.grid_points;
    const std::size_t per = sweep_policies().size();
    std::vector<SweepRow> rows(grid * per);

    auto run_point = [&](std::size_t g) {
        const double budget = g == grid - 1 ? b_opt : b_opt * static_cast<double>(g) / static_cast<double>(grid - 1);
        evaluator.run(budget, std::span<SweepRow>(rows).subspan(g * per, per));
    };

    const std::size_t workers = worker_count(grid);
    if (workers == 1) {
        for (std::size_t g = 0; g < grid; ++g) run_point(g);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t g = next++; g < grid && !failed; g = next++) {
                try {
                    run_point(g);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

}  // namespace robust_nv
