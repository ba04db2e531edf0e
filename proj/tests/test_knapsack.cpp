#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "robust_nv/knapsack.hpp"
#include "robust_nv/lp.hpp"
#include "test_support.hpp"

using namespace robust_nv;
using doctest::Approx;

namespace {

std::vector<double> unit_costs(const Instance& inst) {
    std::vector<double> c;
    for (const auto& it : inst.items) c.push_back(it.econ.c);
    return c;
}

// min sum_i max_j (alpha_ij q_i + nu_ij) s.t. sum c_i q_i <= B, 0 <= q_i <= b_i
double upper_lp_oracle(const Instance& inst, std::vector<double>* q_out = nullptr) {
    std::vector<PwlFunction> fs;
    std::vector<double> ub;
    for (const auto& it : inst.items) {
        fs.push_back(pwl_pieces(it.econ, it.spec).as_function());
        ub.push_back(it.spec.b);
    }
    const std::vector<LinearConstraint> budget{{unit_costs(inst), Sense::LessEqual, inst.budget}};
    const auto epi = pwl_epigraph(fs, budget, ub);
    const auto sol = solve_lp(epi.lp);
    REQUIRE(sol.optimal());
    if (q_out) {
        q_out->clear();
        for (auto idx : epi.q_index) q_out->push_back(sol.x[idx]);
    }
    return sol.objective + epi.constant;
}

// Same problem for the best-case two-point laws, via the hinge form.
double lower_lp_oracle(const Instance& inst) {
    std::vector<HingeSum> hs;
    double constant = 0.0;
    for (const auto& it : inst.items) {
        const auto law = best_case_two_point(it.spec);
        HingeSum h;
        h.linear_coef = it.econ.c * it.econ.d;
        constant -= it.econ.c * it.econ.d * it.spec.mu;
        for (std::size_t k = 0; k < law.size(); ++k) {
            h.points.push_back(law.points()[k]);
            h.weights.push_back(it.econ.c * (it.econ.m + it.econ.d) * law.probs()[k]);
        }
        hs.push_back(h);
    }
    const std::vector<LinearConstraint> budget{{unit_costs(inst), Sense::LessEqual, inst.budget}};
    const auto epi = hinge_epigraph(hs, budget);
    const auto sol = solve_lp(epi.lp);
    REQUIRE(sol.optimal());
    return sol.objective + epi.constant + constant;
}

double spend(const Instance& inst, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += inst.items[i].econ.c * q[i];
    return s;
}

Instance two_item_example(double budget) {
    const auto s = testing::standard_spec();
    return Instance{{Item{{1, 1, 1}, s}, Item{{1, 2, 1}, s}}, budget};
}

}  // namespace

TEST_CASE("two-item example") {
    const auto inst = two_item_example(45);
    const auto list = build_ranked_list(inst);
    // ratios: -2, -1.25, -1, -0.5 (the rising pieces are dropped)
    REQUIRE(list.entries.size() == 4);
    CHECK(list.entries[0].ratio == Approx(-2));
    CHECK(list.entries[1].ratio == Approx(-1.25));
    CHECK(list.entries[2].ratio == Approx(-1));
    CHECK(list.entries[3].ratio == Approx(-0.5));
    const auto pol = knapsack_allocate(inst);
    CHECK(pol.q[0] == Approx(15));
    CHECK(pol.q[1] == Approx(30));
    CHECK(pol.spent == Approx(45));
    CHECK(pol.partial_item == 0);
    CHECK(pol.objective == Approx(upper_lp_oracle(inst)).epsilon(1e-10));
}

TEST_CASE("knapsack matches the epigraph LP on random instances") {
    Rng rng(21);
    int checked = 0;
    for (int t = 0; t < 240; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.integer(0, 5));
        const auto inst = testing::random_instance(rng, n);
        const auto pol = knapsack_allocate(inst);
        const double lp = upper_lp_oracle(inst);
        CHECK(std::abs(pol.objective - lp) <= 1e-8 * std::max(1.0, std::abs(lp)));
        CHECK(spend(inst, pol.q) <= inst.budget + 1e-9);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(pol.q[i] >= 0.0);
            CHECK(pol.q[i] <= inst.items[i].spec.b + 1e-12);
        }
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("knapsack budget behavior") {
    Rng rng(22);
    for (int t = 0; t < 60; ++t) {
        auto inst = testing::random_instance(rng, 4);
        const auto list = build_ranked_list(inst);
        const double full = std::accumulate(list.entries.begin(), list.entries.end(), 0.0,
                                            [](double s, const RankedEntry& e) { return s + e.unit_cost * e.capacity; });
        std::vector<double> values;
        std::vector<double> prev_q(inst.size(), 0.0);
        const int grid = 21;
        for (int g = 0; g < grid; ++g) {
            const double budget = 1.2 * full * g / (grid - 1);
            const auto pol = knapsack_allocate(inst, list, budget);
            // Budget consistency: spend min(B, full), allocation only grows.
            CHECK(pol.spent == Approx(std::min(budget, full)).epsilon(1e-10));
            for (std::size_t i = 0; i < inst.size(); ++i) CHECK(pol.q[i] >= prev_q[i] - 1e-12);
            prev_q = pol.q;
            values.push_back(pol.objective);
        }
        for (std::size_t g = 1; g < values.size(); ++g) CHECK(values[g] <= values[g - 1] + 1e-9);
        for (std::size_t g = 1; g + 1 < values.size(); ++g) {
            CHECK(values[g - 1] + values[g + 1] - 2 * values[g] >= -1e-7 * std::max(1.0, std::abs(values[g])));
        }
    }
}

TEST_CASE("pieces of one item are used in order") {
    Rng rng(23);
    for (int t = 0; t < 100; ++t) {
        const auto inst = testing::random_instance(rng, 5);
        const auto list = build_ranked_list(inst);
        std::vector<int> last(inst.size(), -1);
        for (const auto& e : list.entries) {
            CHECK(e.piece > last[e.item]);
            last[e.item] = e.piece;
        }
    }
}

TEST_CASE("slack budget reproduces the single-item optimum") {
    Rng rng(24);
    for (int t = 0; t < 200; ++t) {
        auto inst = testing::random_instance(rng, 3);
        double full = 0.0;
        for (const auto& it : inst.items) full += it.econ.c * it.spec.b;
        inst.budget = full + 1.0;
        const auto pol = knapsack_allocate(inst);
        for (std::size_t i = 0; i < inst.size(); ++i) {
            const auto r = robust_quantity_thm1(inst.items[i].econ, inst.items[i].spec);
            CHECK(pol.q[i] >= r.interval_lo - 1e-9);
            CHECK(pol.q[i] <= r.interval_hi + 1e-9);
        }
    }
}

TEST_CASE("zero budget") {
    Rng rng(25);
    for (int t = 0; t < 50; ++t) {
        auto inst = testing::random_instance(rng, 4);
        inst.budget = 0;
        const auto pol = knapsack_allocate(inst);
        double expected = 0.0;
        for (const auto& it : inst.items) expected += it.econ.c * it.econ.m * it.spec.mu;
        CHECK(pol.objective == Approx(expected).epsilon(1e-12));
        for (double q : pol.q) CHECK(q == 0.0);
    }
}

TEST_CASE("lower-bound policy") {
    Rng rng(26);
    for (int t = 0; t < 200; ++t) {
        const auto inst = testing::random_instance(rng, 1 + static_cast<std::size_t>(rng.integer(0, 4)), true);
        const auto lower = lower_bound_policy(inst);
        const double lp = lower_lp_oracle(inst);
        CHECK(std::abs(lower.objective - lp) <= 1e-8 * std::max(1.0, std::abs(lp)));
        CHECK(spend(inst, lower.q) <= inst.budget + 1e-9);

        const auto upper = knapsack_allocate(inst);
        CHECK(lower.objective <= upper.objective + 1e-9);
        // best case <= worst case pointwise
        CHECK(evaluate_lower(inst, upper.q) <= evaluate_upper(inst, upper.q) + 1e-9);
        const auto iv = performance_interval(inst);
        CHECK(iv.lower == Approx(lower.objective));
        CHECK(iv.upper == Approx(upper.objective));
    }

    auto inst = two_item_example(45);
    CHECK_THROWS_WITH_AS(lower_bound_policy(inst), "beta required for lower bound (item 0)", std::invalid_argument);
}

TEST_CASE("segments_from_distribution") {
    const DiscreteDistribution law({10, 30, 50}, {0.25, 0.5, 0.25});
    const auto seg = segments_from_distribution({2, 1, 1}, law);
    REQUIRE(seg.slopes.size() == 3);
    CHECK(seg.slopes[0] == Approx(-2));
    CHECK(seg.slopes[1] == Approx(-1));
    CHECK(seg.slopes[2] == Approx(1));
    CHECK(seg.lengths == std::vector<double>{10, 20, 20});
}

TEST_CASE("instance validation") {
    auto inst = two_item_example(-1);
    CHECK_THROWS_AS(knapsack_allocate(inst), std::invalid_argument);
    inst.budget = 10;
    inst.items[1].spec.delta = 30;
    CHECK_THROWS_WITH_AS(knapsack_allocate(inst), doctest::Contains("item 1"), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_upper(two_item_example(1), std::vector<double>{1}), std::invalid_argument);
}
