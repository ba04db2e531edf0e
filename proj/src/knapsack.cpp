#include "robust_nv/knapsack.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace robust_nv {

bool Instance::has_betas() const {
    return std::all_of(items.begin(), items.end(), [](const Item& it) { return it.spec.beta.has_value(); });
}

void require_valid(const Instance& inst) {
    if (!(inst.budget >= 0.0)) throw std::invalid_argument("budget must be nonnegative");
    for (std::size_t i = 0; i < inst.items.size(); ++i) {
        try {
            require_valid(inst.items[i].econ);
            require_valid(inst.items[i].spec);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("item " + std::to_string(i) + ": " + e.what());
        }
    }
}

std::vector<PwlCost> build_coefficients(const Instance& inst) {
    std::vector<PwlCost> out;
    out.reserve(inst.size());
    for (const auto& it : inst.items) out.push_back(pwl_pieces(it.econ, it.spec));
    return out;
}

SegmentedCost segments_from_distribution(const ItemEconomics& e, const DiscreteDistribution& demand) {
    SegmentedCost seg;
    seg.unit_cost = e.c;
    const auto xs = demand.points();
    const auto ps = demand.probs();
    double above = 1.0;  // P(D >= x_k)
    double prev = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        seg.slopes.push_back(e.c * (e.d - (e.m + e.d) * above));
        seg.lengths.push_back(std::max(0.0, xs[k] - prev));
        prev = std::max(prev, xs[k]);
        above -= ps[k];
    }
    return seg;
}

RankedList rank_segments(std::span<const SegmentedCost> items) {
    RankedList list;
    list.num_items = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& s = items[i];
        for (std::size_t k = 0; k < s.slopes.size(); ++k) {
            if (s.slopes[k] < 0.0) {
                list.entries.push_back({i, static_cast<int>(k), s.slopes[k] / s.unit_cost, s.lengths[k], s.unit_cost});
            }
        }
    }
    std::sort(list.entries.begin(), list.entries.end(), [](const RankedEntry& x, const RankedEntry& y) {
        return std::tie(x.ratio, x.item, x.piece) < std::tie(y.ratio, y.item, y.piece);
    });
    return list;
}

RankedList build_ranked_list(const Instance& inst) {
    std::vector<SegmentedCost> segs;
    segs.reserve(inst.size());
    for (const auto& it : inst.items) {
        const PwlCost cost = pwl_pieces(it.econ, it.spec);
        SegmentedCost s;
        s.unit_cost = it.econ.c;
        s.slopes = {cost.pieces[0].slope, cost.pieces[1].slope, cost.pieces[2].slope};
        s.lengths = {it.spec.a, it.spec.mu - it.spec.a, it.spec.b - it.spec.mu};
        segs.push_back(std::move(s));
    }
    return rank_segments(segs);
}

RankedList build_lower_ranked_list(const Instance& inst) {
    std::vector<SegmentedCost> segs;
    segs.reserve(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const auto& it = inst.items[i];
        if (!it.spec.beta) throw std::invalid_argument("beta required for lower bound (item " + std::to_string(i) + ")");
        segs.push_back(segments_from_distribution(it.econ, best_case_two_point(it.spec)));
    }
    return rank_segments(segs);
}

std::string to_string(PolicyModel model) {
    switch (model) {
        case PolicyModel::RobustUpper: return "robust-upper";
        case PolicyModel::RobustLower: return "robust-lower";
        case PolicyModel::MeanRange: return "mean-range";
        case PolicyModel::MeanVariance: return "mean-variance";
        case PolicyModel::FullInfo: return "full-info";
    }
    return "unknown";
}

OrderingPolicy greedy_fill(const RankedList& list, double budget, PolicyModel model) {
    if (!(budget >= 0.0)) throw std::invalid_argument("budget must be nonnegative");
    OrderingPolicy pol;
    pol.provenance = model;
    pol.q.assign(list.num_items, 0.0);
    pol.piece_reached.assign(list.num_items, -1);
    double spent = 0.0;
    for (const auto& e : list.entries) {
        const double cost = e.unit_cost * e.capacity;
        if (spent + cost <= budget) {
            pol.q[e.item] += e.capacity;
            pol.piece_reached[e.item] = e.piece;
            spent += cost;
            continue;
        }
        const double residual = std::max(0.0, budget - spent);
        if (residual > 1e-12 * std::max(1.0, budget)) {
            pol.q[e.item] += residual / e.unit_cost;
            pol.piece_reached[e.item] = e.piece;
            pol.partial_item = static_cast<std::ptrdiff_t>(e.item);
            spent += residual;
        }
        break;
    }
    pol.spent = spent;
    return pol;
}

OrderingPolicy knapsack_allocate(const Instance& inst, const RankedList& list, double budget) {
    auto pol = greedy_fill(list, budget, PolicyModel::RobustUpper);
    pol.objective = evaluate_upper(inst, pol.q);
    return pol;
}

OrderingPolicy knapsack_allocate(const Instance& inst) {
    require_valid(inst);
    return knapsack_allocate(inst, build_ranked_list(inst), inst.budget);
}

OrderingPolicy lower_bound_policy(const Instance& inst, const RankedList& list, double budget) {
    auto pol = greedy_fill(list, budget, PolicyModel::RobustLower);
    pol.objective = evaluate_lower(inst, pol.q);
    return pol;
}

OrderingPolicy lower_bound_policy(const Instance& inst) {
    require_valid(inst);
    return lower_bound_policy(inst, build_lower_ranked_list(inst), inst.budget);
}

double evaluate_upper(const Instance& inst, std::span<const double> q) {
    if (q.size() != inst.size()) throw std::invalid_argument("evaluate_upper: q has wrong length");
    double total = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) total += worst_case_cost(inst.items[i].econ, inst.items[i].spec, q[i]);
    return total;
}

double evaluate_lower(const Instance& inst, std::span<const double> q) {
    if (q.size() != inst.size()) throw std::invalid_argument("evaluate_lower: q has wrong length");
    double total = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const auto& it = inst.items[i];
        if (!it.spec.beta) throw std::invalid_argument("beta required for lower bound (item " + std::to_string(i) + ")");
        total += expected_cost(it.econ, best_case_two_point(it.spec), q[i]);
    }
    return total;
}

PerformanceInterval performance_interval(const Instance& inst) {
    return {lower_bound_policy(inst).objective, knapsack_allocate(inst).objective};
}

}  // namespace robust_nv
