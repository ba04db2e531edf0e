#include "robust_nv/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace robust_nv {

std::size_t LinearProgram::add_variable(double cost, double lo, double hi) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    return objective.size() - 1;
}

std::size_t LinearProgram::add_row(std::vector<double> coeffs, Sense sense, double b) {
    rows.push_back(std::move(coeffs));
    senses.push_back(sense);
    rhs.push_back(b);
    return rows.size() - 1;
}

void LinearProgram::check() const {
    const std::size_t n = num_vars();
    if (lower.size() != n || upper.size() != n) {
        throw std::invalid_argument("linear program: bound vectors do not match objective");
    }
    if (senses.size() != rows.size() || rhs.size() != rows.size()) {
        throw std::invalid_argument("linear program: row data sizes disagree");
    }
    for (const auto& r : rows) {
        if (r.size() > n) {
            throw std::invalid_argument("linear program: row longer than variable count");
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] ||
            lower[j] == kInf || upper[j] == -kInf) {
            throw std::invalid_argument("linear program: invalid bounds on variable " +
                                        std::to_string(j));
        }
    }
}

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

enum class ColumnMap : std::uint8_t { Shifted, Mirrored, Split };
enum class VarState : std::uint8_t { Basic, AtLower, AtUpper };

// Standard-form image of the caller's LP. Every internal column has lower
// bound zero; original variable j maps to column col[j] (and col[j] + 1 when
// split into positive and negative parts).
class Tableau {
public:
    Tableau(const LinearProgram& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
        build();
    }

    LpSolution solve() {
        LpSolution sol;
        // Phase 1: drive artificials to zero.
        std::vector<double> phase1(cols_, 0.0);
        for (std::size_t j = first_artificial_; j < cols_; ++j) phase1[j] = 1.0;
        reset_costs(phase1);
        const LpStatus p1 = iterate();
        if (p1 != LpStatus::Optimal) {
            throw std::logic_error("simplex: phase 1 cannot be unbounded");
        }
        double infeas = 0.0;
        for (std::size_t j = first_artificial_; j < cols_; ++j) infeas += value(j);
        double scale = 1.0;
        for (double b : rhs_) scale = std::max(scale, std::abs(b));
        if (infeas > opt_.feasibility_tol * scale) {
            sol.status = LpStatus::Infeasible;
            sol.iterations = iterations_;
            return sol;
        }
        retire_artificials();

        // Phase 2 on the true costs.
        reset_costs(cost_);
        const LpStatus p2 = iterate();
        sol.iterations = iterations_;
        sol.used_bland = bland_;
        if (p2 == LpStatus::Unbounded) {
            sol.status = LpStatus::Unbounded;
            return sol;
        }
        sol.status = LpStatus::Optimal;
        recover(sol);
        return sol;
    }

private:
    double& at(std::size_t r, std::size_t c) { return tab_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return tab_[r * cols_ + c]; }

    double value(std::size_t j) const {
        switch (state_[j]) {
            case VarState::Basic: return xb_[basic_row_[j]];
            case VarState::AtLower: return 0.0;
            case VarState::AtUpper: return upper_[j];
        }
        return 0.0;
    }

    void build() {
        lp_.check();
        const std::size_t n = lp_.num_vars();
        rows_ = lp_.num_rows();

        map_.resize(n);
        col_.resize(n);
        std::size_t structural = 0;
        for (std::size_t j = 0; j < n; ++j) {
            col_[j] = structural;
            if (std::isfinite(lp_.lower[j])) {
                map_[j] = ColumnMap::Shifted;
                structural += 1;
            } else if (std::isfinite(lp_.upper[j])) {
                map_[j] = ColumnMap::Mirrored;
                structural += 1;
            } else {
                map_[j] = ColumnMap::Split;
                structural += 2;
            }
        }

        // Row transformation: substitute the column maps, then make rhs >= 0.
        std::vector<std::vector<double>> a(rows_, std::vector<double>(structural, 0.0));
        rhs_.assign(rows_, 0.0);
        flipped_.assign(rows_, false);
        std::vector<Sense> sense(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            double b = lp_.rhs[i];
            for (std::size_t j = 0; j < lp_.rows[i].size(); ++j) {
                const double v = lp_.rows[i][j];
                if (v == 0.0) continue;
                switch (map_[j]) {
                    case ColumnMap::Shifted:
                        a[i][col_[j]] = v;
                        b -= v * lp_.lower[j];
                        break;
                    case ColumnMap::Mirrored:
                        a[i][col_[j]] = -v;
                        b -= v * lp_.upper[j];
                        break;
                    case ColumnMap::Split:
                        a[i][col_[j]] = v;
                        a[i][col_[j] + 1] = -v;
                        break;
                }
            }
            sense[i] = lp_.senses[i];
            if (b < 0.0) {
                b = -b;
                for (double& v : a[i]) v = -v;
                flipped_[i] = true;
                if (sense[i] == Sense::LessEqual) {
                    sense[i] = Sense::GreaterEqual;
                } else if (sense[i] == Sense::GreaterEqual) {
                    sense[i] = Sense::LessEqual;
                }
            }
            rhs_[i] = b;
        }

        std::size_t slacks = 0;
        std::size_t artificials = 0;
        for (Sense s : sense) {
            if (s != Sense::Equal) ++slacks;
            if (s != Sense::LessEqual) ++artificials;
        }
        first_slack_ = structural;
        first_artificial_ = structural + slacks;
        cols_ = structural + slacks + artificials;

        tab_.assign(rows_ * cols_, 0.0);
        upper_.assign(cols_, kInf);
        cost_.assign(cols_, 0.0);
        state_.assign(cols_, VarState::AtLower);
        basic_row_.assign(cols_, 0);
        basis_.assign(rows_, 0);
        identity_col_.assign(rows_, 0);
        xb_ = rhs_;

        for (std::size_t j = 0; j < n; ++j) {
            switch (map_[j]) {
                case ColumnMap::Shifted:
                    upper_[col_[j]] = lp_.upper[j] - lp_.lower[j];
                    cost_[col_[j]] = lp_.objective[j];
                    break;
                case ColumnMap::Mirrored:
                    cost_[col_[j]] = -lp_.objective[j];
                    break;
                case ColumnMap::Split:
                    cost_[col_[j]] = lp_.objective[j];
                    cost_[col_[j] + 1] = -lp_.objective[j];
                    break;
            }
        }

        std::size_t s = first_slack_;
        std::size_t art = first_artificial_;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < structural; ++j) at(i, j) = a[i][j];
            std::size_t basic = 0;
            switch (sense[i]) {
                case Sense::LessEqual:
                    at(i, s) = 1.0;
                    basic = s++;
                    break;
                case Sense::GreaterEqual:
                    at(i, s++) = -1.0;
                    at(i, art) = 1.0;
                    basic = art++;
                    break;
                case Sense::Equal:
                    at(i, art) = 1.0;
                    basic = art++;
                    break;
            }
            basis_[i] = basic;
            identity_col_[i] = basic;
            state_[basic] = VarState::Basic;
            basic_row_[basic] = i;
        }
        // Nonbasic structurals start at their lower bound (internal zero).
        degenerate_limit_ = 2 * (rows_ + cols_);
    }

    void reset_costs(const std::vector<double>& c) {
        phase_cost_ = c;
        d_ = c;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double cb = c[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * at(i, j);
        }
        for (std::size_t i = 0; i < rows_; ++i) d_[basis_[i]] = 0.0;
    }

    bool movable(std::size_t j) const { return state_[j] != VarState::Basic && upper_[j] > 0.0; }

    // Entering column or cols_ if optimal.
    std::size_t price() const {
        std::size_t best = cols_;
        double best_score = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            if (!movable(j)) continue;
            double score = 0.0;
            if (state_[j] == VarState::AtLower && d_[j] < -opt_.optimality_tol) {
                score = -d_[j];
            } else if (state_[j] == VarState::AtUpper && d_[j] > opt_.optimality_tol) {
                score = d_[j];
            } else {
                continue;
            }
            if (bland_) return j;
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    LpStatus iterate() {
        while (true) {
            if (iterations_ >= opt_.max_iterations) {
                throw std::runtime_error("simplex: iteration limit reached");
            }
            const std::size_t j = price();
            if (j == cols_) return LpStatus::Optimal;
            ++iterations_;

            const double dir = state_[j] == VarState::AtLower ? 1.0 : -1.0;
            double step = upper_[j];  // bound flip
            std::size_t leave_row = rows_;
            bool leave_at_upper = false;
            double leave_pivot = 0.0;

            for (std::size_t i = 0; i < rows_; ++i) {
                const double alpha = at(i, j) * dir;
                double limit;
                bool to_upper;
                if (alpha > opt_.pivot_tol) {
                    limit = std::max(0.0, xb_[i]) / alpha;
                    to_upper = false;
                } else if (alpha < -opt_.pivot_tol && std::isfinite(upper_[basis_[i]])) {
                    limit = std::max(0.0, upper_[basis_[i]] - xb_[i]) / -alpha;
                    to_upper = true;
                } else {
                    continue;
                }
                bool take;
                if (leave_row == rows_) {
                    take = limit <= step;
                } else if (limit < step - 1e-12) {
                    take = true;
                } else if (limit <= step + 1e-12) {
                    take = bland_ ? basis_[i] < basis_[leave_row]
                                  : std::abs(alpha) > std::abs(leave_pivot);
                } else {
                    take = false;
                }
                if (take) {
                    step = limit;
                    leave_row = i;
                    leave_at_upper = to_upper;
                    leave_pivot = alpha;
                }
            }

            if (!std::isfinite(step)) return LpStatus::Unbounded;

            if (step <= 1e-12) {
                ++degenerate_pivots_;
                if (degenerate_pivots_ > degenerate_limit_) bland_ = true;
            }

            for (std::size_t i = 0; i < rows_; ++i) xb_[i] -= at(i, j) * dir * step;

            if (leave_row == rows_) {
                state_[j] = state_[j] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
                continue;
            }

            const double entering_value = (state_[j] == VarState::AtLower ? 0.0 : upper_[j]) + dir * step;
            const std::size_t leaving = basis_[leave_row];
            state_[leaving] = leave_at_upper ? VarState::AtUpper : VarState::AtLower;
            pivot(leave_row, j);
            xb_[leave_row] = entering_value;
        }
    }

    void pivot(std::size_t r, std::size_t j) {
        const double p = at(r, j);
        double* row_r = &tab_[r * cols_];
        for (std::size_t c = 0; c < cols_; ++c) row_r[c] /= p;
        row_r[j] = 1.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            const double f = at(i, j);
            if (f == 0.0) continue;
            double* row_i = &tab_[i * cols_];
            for (std::size_t c = 0; c < cols_; ++c) row_i[c] -= f * row_r[c];
            row_i[j] = 0.0;
        }
        const double f = d_[j];
        if (f != 0.0) {
            for (std::size_t c = 0; c < cols_; ++c) d_[c] -= f * row_r[c];
            d_[j] = 0.0;
        }
        basis_[r] = j;
        state_[j] = VarState::Basic;
        basic_row_[j] = r;
    }

    void retire_artificials() {
        for (std::size_t r = 0; r < rows_; ++r) {
            const std::size_t b = basis_[r];
            if (b < first_artificial_) continue;
            // Basic artificial at (numerically) zero: swap in any structural or
            // slack column with a usable pivot. If none exists the row is
            // redundant and the artificial stays basic, pinned at zero.
            std::size_t best = cols_;
            double best_abs = 1e-9;
            for (std::size_t j = 0; j < first_artificial_; ++j) {
                if (state_[j] == VarState::Basic || upper_[j] <= 0.0) continue;
                if (std::abs(at(r, j)) > best_abs) {
                    best_abs = std::abs(at(r, j));
                    best = j;
                }
            }
            if (best == cols_) {
                xb_[r] = 0.0;
                continue;
            }
            const double entering_value =
                (state_[best] == VarState::AtUpper ? upper_[best] : 0.0) + xb_[r] / at(r, best);
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i != r) xb_[i] -= at(i, best) * (xb_[r] / at(r, best));
            }
            state_[b] = VarState::AtLower;
            pivot(r, best);
            xb_[r] = entering_value;
        }
        for (std::size_t j = first_artificial_; j < cols_; ++j) {
            upper_[j] = 0.0;
            if (state_[j] != VarState::Basic) state_[j] = VarState::AtLower;
        }
    }

    void recover(LpSolution& sol) const {
        const std::size_t n = lp_.num_vars();
        sol.x.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            switch (map_[j]) {
                case ColumnMap::Shifted: {
                    double v = lp_.lower[j] + value(col_[j]);
                    sol.x[j] = std::clamp(v, lp_.lower[j], lp_.upper[j]);
                    break;
                }
                case ColumnMap::Mirrored:
                    sol.x[j] = std::min(lp_.upper[j], lp_.upper[j] - value(col_[j]));
                    break;
                case ColumnMap::Split:
                    sol.x[j] = value(col_[j]) - value(col_[j] + 1);
                    break;
            }
        }
        sol.objective = 0.0;
        for (std::size_t j = 0; j < n; ++j) sol.objective += lp_.objective[j] * sol.x[j];

        sol.duals.assign(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            const double y = phase_cost_[identity_col_[i]] - d_[identity_col_[i]];
            sol.duals[i] = flipped_[i] ? -y : y;
        }
        sol.reduced_costs = lp_.objective;
        for (std::size_t i = 0; i < rows_; ++i) {
            const auto& r = lp_.rows[i];
            for (std::size_t j = 0; j < r.size(); ++j) sol.reduced_costs[j] -= r[j] * sol.duals[i];
        }
    }

    const LinearProgram& lp_;
    const SimplexOptions& opt_;

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t first_slack_ = 0;
    std::size_t first_artificial_ = 0;

    std::vector<ColumnMap> map_;
    std::vector<std::size_t> col_;
    std::vector<bool> flipped_;
    std::vector<double> rhs_;

    std::vector<double> tab_;
    std::vector<double> xb_;
    std::vector<double> upper_;
    std::vector<double> cost_;
    std::vector<double> phase_cost_;
    std::vector<double> d_;
    std::vector<VarState> state_;
    std::vector<std::size_t> basic_row_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> identity_col_;

    std::size_t iterations_ = 0;
    std::size_t degenerate_pivots_ = 0;
    std::size_t degenerate_limit_ = 0;
    bool bland_ = false;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
    Tableau tableau(lp, options);
    return tableau.solve();
}

double PwlFunction::operator()(double x) const {
    double v = -kInf;
    for (std::size_t k = 0; k < slopes.size(); ++k) v = std::max(v, slopes[k] * x + intercepts[k]);
    return v;
}

double HingeSum::operator()(double x) const {
    double v = linear_coef * x + constant;
    for (std::size_t k = 0; k < points.size(); ++k) v += weights[k] * std::max(0.0, points[k] - x);
    return v;
}

namespace {

void add_constraints(EpigraphLp& out, std::span<const LinearConstraint> constraints) {
    const std::size_t n = out.q_index.size();
    for (const auto& con : constraints) {
        if (con.coeffs.size() != n) {
            throw std::invalid_argument("epigraph: constraint width does not match item count");
        }
        std::vector<double> row(out.lp.num_vars(), 0.0);
        for (std::size_t i = 0; i < n; ++i) row[out.q_index[i]] = con.coeffs[i];
        out.constraint_rows.push_back(out.lp.add_row(std::move(row), con.sense, con.rhs));
    }
}

}  // namespace

EpigraphLp pwl_epigraph(std::span<const PwlFunction> items,
                        std::span<const LinearConstraint> constraints,
                        std::span<const double> q_upper) {
    if (!q_upper.empty() && q_upper.size() != items.size()) {
        throw std::invalid_argument("epigraph: q_upper size does not match item count");
    }
    EpigraphLp out;
    std::vector<std::size_t> t_index;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& f = items[i];
        if (f.slopes.size() != f.intercepts.size() || f.slopes.empty()) {
            throw std::invalid_argument("epigraph: malformed piecewise-linear function");
        }
        for (std::size_t k = 1; k < f.slopes.size(); ++k) {
            if (f.slopes[k] < f.slopes[k - 1]) {
                throw std::invalid_argument("epigraph: pieces of item " + std::to_string(i) +
                                            " are not convex (slopes decrease)");
            }
        }
        out.q_index.push_back(out.lp.add_variable(0.0, 0.0, q_upper.empty() ? kInf : q_upper[i]));
        t_index.push_back(out.lp.add_variable(1.0, -kInf, kInf));
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& f = items[i];
        for (std::size_t k = 0; k < f.slopes.size(); ++k) {
            // t_i - slope * q_i >= intercept
            std::vector<double> row(out.lp.num_vars(), 0.0);
            row[t_index[i]] = 1.0;
            row[out.q_index[i]] = -f.slopes[k];
            out.lp.add_row(std::move(row), Sense::GreaterEqual, f.intercepts[k]);
        }
    }
    add_constraints(out, constraints);
    return out;
}

EpigraphLp hinge_epigraph(std::span<const HingeSum> items,
                          std::span<const LinearConstraint> constraints) {
    EpigraphLp out;
    for (const auto& h : items) {
        if (h.points.size() != h.weights.size()) {
            throw std::invalid_argument("epigraph: hinge points and weights differ in size");
        }
        for (double w : h.weights) {
            if (w < 0.0) throw std::invalid_argument("epigraph: negative hinge weight");
        }
        out.q_index.push_back(out.lp.add_variable(h.linear_coef, 0.0, kInf));
        out.constant += h.constant;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& h = items[i];
        for (std::size_t k = 0; k < h.points.size(); ++k) {
            const std::size_t tau = out.lp.add_variable(h.weights[k], 0.0, kInf);
            // tau + q_i >= point
            std::vector<double> row(out.lp.num_vars(), 0.0);
            row[tau] = 1.0;
            row[out.q_index[i]] = 1.0;
            out.lp.add_row(std::move(row), Sense::GreaterEqual, h.points[k]);
        }
    }
    add_constraints(out, constraints);
    return out;
}

}  // namespace robust_nv
