#include "robust_nv/extensions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace robust_nv {

namespace {

void require_items(std::span<const Item> items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        try {
            require_valid(items[i].econ);
            require_valid(items[i].spec);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("item " + std::to_string(i) + ": " + e.what());
        }
    }
}

std::vector<double> quantities(const LpSolution& sol, std::span<const std::size_t> index) {
    std::vector<double> q;
    for (auto k : index) q.push_back(sol.x[k]);
    return q;
}

double spend(std::span<const Item> items, std::span<const double> q) {
    double s = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) s += items[i].econ.c * q[i];
    return s;
}

struct YieldLp {
    LinearProgram lp;
    std::vector<std::size_t> q_index;
    double constant = 0.0;
};

// q columns are fixed to `fixed_q` when it is non-empty; otherwise the budget
// row is added.
YieldLp build_yield_lp(std::span<const Item> items, std::span<const YieldSpec> yields, double budget,
                       std::span<const double> fixed_q) {
    if (yields.size() != items.size()) throw std::invalid_argument("one yield spec per item required");
    require_items(items);
    for (std::size_t i = 0; i < yields.size(); ++i) {
        try {
            require_valid_yield(yields[i]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("yield " + std::to_string(i) + ": " + e.what());
        }
    }
    YieldLp out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& e = items[i].econ;
        const double lo = fixed_q.empty() ? 0.0 : fixed_q[i];
        const double hi = fixed_q.empty() ? kInf : fixed_q[i];
        out.q_index.push_back(out.lp.add_variable(e.c * e.d * yields[i].mu, lo, hi));
        out.constant -= e.c * e.d * items[i].spec.mu;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& e = items[i].econ;
        const auto demand = worst_case_three_point(items[i].spec);
        const auto yield = worst_case_three_point(yields[i]);
        for (std::size_t k1 = 0; k1 < demand.size(); ++k1) {
            for (std::size_t k2 = 0; k2 < yield.size(); ++k2) {
                const double w = e.c * (e.m + e.d) * demand.probs()[k1] * yield.probs()[k2];
                const auto tau = out.lp.add_variable(w);
                std::vector<double> row(tau + 1, 0.0);
                row[tau] = 1.0;
                row[out.q_index[i]] = yield.points()[k2];
                out.lp.add_row(std::move(row), Sense::GreaterEqual, demand.points()[k1]);
            }
        }
    }
    if (fixed_q.empty()) {
        std::vector<double> row(out.lp.objective.size(), 0.0);
        for (std::size_t i = 0; i < items.size(); ++i) row[out.q_index[i]] = items[i].econ.c;
        out.lp.add_row(std::move(row), Sense::LessEqual, budget);
    }
    return out;
}

struct CvarLp {
    LinearProgram lp;
    std::vector<std::size_t> q_index;
    std::size_t theta = 0;
};

CvarLp build_cvar_lp(std::span<const Item> items, double budget, double gamma, std::span<const double> fixed_q) {
    if (items.size() > kMaxCvarItems) throw std::invalid_argument("scenario explosion; use smaller n");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
    require_items(items);
    const std::size_t n = items.size();

    std::vector<DiscreteDistribution> laws;
    for (const auto& it : items) laws.push_back(worst_case_three_point(it.spec));

    CvarLp out;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = fixed_q.empty() ? 0.0 : fixed_q[i];
        const double hi = fixed_q.empty() ? kInf : fixed_q[i];
        out.q_index.push_back(out.lp.add_variable(0.0, lo, hi));
    }
    out.theta = out.lp.add_variable(1.0, -kInf, kInf);

    // tau[i][k] >= xi_k - q_i, shared by every scenario with outcome k for item i
    std::vector<std::vector<std::size_t>> tau(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < laws[i].size(); ++k) {
            const auto t = out.lp.add_variable(0.0);
            tau[i].push_back(t);
            std::vector<double> row(t + 1, 0.0);
            row[t] = 1.0;
            row[out.q_index[i]] = 1.0;
            out.lp.add_row(std::move(row), Sense::GreaterEqual, laws[i].points()[k]);
        }
    }

    const double scale = 1.0 / (1.0 - gamma);
    std::vector<std::size_t> outcome(n, 0);
    while (true) {
        double prob = 1.0;
        double rhs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            prob *= laws[i].probs()[outcome[i]];
            rhs -= items[i].econ.c * items[i].econ.d * laws[i].points()[outcome[i]];
        }
        const auto eta = out.lp.add_variable(scale * prob);
        std::vector<double> row(eta + 1, 0.0);
        row[eta] = 1.0;
        row[out.theta] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& e = items[i].econ;
            row[out.q_index[i]] = -e.c * e.d;
            row[tau[i][outcome[i]]] = -e.c * (e.m + e.d);
        }
        out.lp.add_row(std::move(row), Sense::GreaterEqual, rhs);

        std::size_t pos = 0;
        while (pos < n && ++outcome[pos] == laws[pos].size()) outcome[pos++] = 0;
        if (pos == n) break;
    }

    if (fixed_q.empty()) {
        std::vector<double> row(out.lp.objective.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) row[out.q_index[i]] = items[i].econ.c;
        out.lp.add_row(std::move(row), Sense::LessEqual, budget);
    }
    return out;
}

}  // namespace

MultiConstraintResult multi_constraint_policy(std::span<const Item> items, std::span<const BudgetRow> rows) {
    require_items(items);
    std::vector<HingeSum> costs;
    for (const auto& it : items) {
        const auto& e = it.econ;
        const auto law = worst_case_three_point(it.spec);
        HingeSum h;
        h.linear_coef = e.c * e.d;
        h.constant = -e.c * e.d * it.spec.mu;
        for (std::size_t k = 0; k < law.size(); ++k) {
            h.points.push_back(law.points()[k]);
            h.weights.push_back(e.c * (e.m + e.d) * law.probs()[k]);
        }
        costs.push_back(std::move(h));
    }
    std::vector<LinearConstraint> constraints;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].coeffs.size() != items.size()) {
            throw std::invalid_argument("constraint " + std::to_string(j) + " needs one coefficient per item");
        }
        for (double v : rows[j].coeffs) {
            if (!(v >= 0.0)) throw std::invalid_argument("constraint coefficients must be nonnegative");
        }
        constraints.push_back({rows[j].coeffs, Sense::LessEqual, rows[j].budget});
    }

    const auto epi = hinge_epigraph(costs, constraints);
    const auto sol = solve_lp(epi.lp);
    MultiConstraintResult out;
    out.status = sol.status;
    out.policy.provenance = PolicyModel::RobustUpper;
    if (!sol.optimal()) return out;
    out.policy.q = quantities(sol, epi.q_index);
    out.policy.objective = sol.objective + epi.constant;
    out.policy.spent = spend(items, out.policy.q);
    for (auto r : epi.constraint_rows) out.shadow_prices.push_back(-sol.duals[r]);
    return out;
}

void require_valid_yield(const YieldSpec& y) {
    require_valid(y);
    if (y.b > 1.0) throw std::invalid_argument("yield support must lie in [0, 1]");
}

OrderingPolicy yield_robust_policy(std::span<const Item> items, std::span<const YieldSpec> yields, double budget) {
    if (!(budget >= 0.0)) throw std::invalid_argument("budget must be nonnegative");
    const auto model = build_yield_lp(items, yields, budget, {});
    const auto sol = solve_lp(model.lp);
    if (!sol.optimal()) throw std::runtime_error("yield LP: " + to_string(sol.status));
    OrderingPolicy pol;
    pol.q = quantities(sol, model.q_index);
    pol.objective = sol.objective + model.constant;
    pol.spent = spend(items, pol.q);
    return pol;
}

double yield_lp_value(std::span<const Item> items, std::span<const YieldSpec> yields, std::span<const double> q) {
    if (q.size() != items.size()) throw std::invalid_argument("q has wrong length");
    const auto model = build_yield_lp(items, yields, 0.0, q);
    const auto sol = solve_lp(model.lp);
    if (!sol.optimal()) throw std::runtime_error("yield LP: " + to_string(sol.status));
    return sol.objective + model.constant;
}

CvarResult cvar_robust_policy(std::span<const Item> items, double budget, double gamma) {
    if (!(budget >= 0.0)) throw std::invalid_argument("budget must be nonnegative");
    const auto model = build_cvar_lp(items, budget, gamma, {});
    const auto sol = solve_lp(model.lp);
    if (!sol.optimal()) throw std::runtime_error("CVaR LP: " + to_string(sol.status));
    CvarResult out;
    out.policy.q = quantities(sol, model.q_index);
    out.policy.objective = sol.objective;
    out.policy.spent = spend(items, out.policy.q);
    out.theta = sol.x[model.theta];
    return out;
}

double cvar_lp_value(std::span<const Item> items, std::span<const double> q, double gamma) {
    if (q.size() != items.size()) throw std::invalid_argument("q has wrong length");
    const auto model = build_cvar_lp(items, 0.0, gamma, q);
    const auto sol = solve_lp(model.lp);
    if (!sol.optimal()) throw std::runtime_error("CVaR LP: " + to_string(sol.status));
    return sol.objective;
}

}  // namespace robust_nv
