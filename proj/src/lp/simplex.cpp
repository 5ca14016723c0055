// Two-phase dense tableau simplex, Dantzig pricing with a Bland fallback on
// degenerate stalls. Intended for small problems where exact status
// classification matters more than speed.

#include <algorithm>
#include <cmath>
#include <limits>

#include "solvers.hpp"

namespace vlc::detail {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;

enum class VarKind { shifted_lower, reflected_upper, split_free };

struct VarMap {
    VarKind kind;
    double offset;
    std::size_t col;
    std::size_t col_neg;  // split_free only
};

struct StdRow {
    std::vector<double> coeffs;  // over structural columns
    double rhs;
    Sense sense;
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double& cost(std::size_t c) { return at(rows_, c); }
    double& objective() { return at(rows_, cols_); }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> t_;
};

enum class PhaseResult { optimal, unbounded, iteration_limit };

// Consecutive degenerate pivots tolerated before switching to Bland's rule.
constexpr std::size_t kDegenerateLimit = 50;

// Minimizes the cost row over columns [0, allowed_cols). Entering columns
// follow Dantzig's rule; after a run of degenerate pivots the phase falls
// back to Bland's rule until the objective moves again.
PhaseResult run_phase(Tableau& tab, std::vector<std::size_t>& basis, std::size_t allowed_cols,
                      std::size_t max_iter, std::size_t& iterations) {
    std::size_t degenerate = 0;
    while (iterations < max_iter) {
        const bool bland = degenerate >= kDegenerateLimit;
        double cost_scale = 1.0;
        for (std::size_t c = 0; c < allowed_cols; ++c) cost_scale = std::max(cost_scale, std::abs(tab.cost(c)));
        const double cost_tol = kCostTol * cost_scale;

        std::size_t enter = allowed_cols;
        double most_negative = -cost_tol;
        for (std::size_t c = 0; c < allowed_cols; ++c) {
            const double rc = tab.cost(c);
            if (rc >= -cost_tol) continue;
            if (bland) {
                enter = c;
                break;
            }
            if (rc < most_negative) {
                most_negative = rc;
                enter = c;
            }
        }
        if (enter == allowed_cols) return PhaseResult::optimal;

        std::size_t leave = tab.rows();
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < tab.rows(); ++r) {
            const double a = tab.at(r, enter);
            if (a <= kPivotTol) continue;
            const double ratio = std::max(0.0, tab.rhs(r)) / a;
            if (leave == tab.rows()) {
                best_ratio = ratio;
                leave = r;
                continue;
            }
            const double tie = 1e-12 * std::max(1.0, best_ratio);
            bool take = ratio < best_ratio - tie;
            if (!take && std::abs(ratio - best_ratio) <= tie) {
                take = bland ? basis[r] < basis[leave] : a > tab.at(leave, enter);
            }
            if (take) {
                best_ratio = ratio;
                leave = r;
            }
        }
        if (leave == tab.rows()) return PhaseResult::unbounded;
        degenerate = best_ratio <= 1e-12 ? degenerate + 1 : 0;
        tab.pivot(leave, enter);
        basis[leave] = enter;
        ++iterations;
    }
    return PhaseResult::iteration_limit;
}

}  // namespace

LpSolution solve_simplex(const LpProblem& problem, const LpOptions& options) {
    const std::size_t n = problem.num_vars;
    const std::size_t max_iter = options.max_iterations > 0 ? options.max_iterations : 200000;

    std::vector<VarMap> vars(n);
    std::size_t nstruct = 0;
    std::vector<StdRow> rows;
    for (std::size_t j = 0; j < n; ++j) {
        const VariableBound b = problem.bounds.empty() ? VariableBound{} : problem.bounds[j];
        if (std::isfinite(b.lower)) {
            vars[j] = {VarKind::shifted_lower, b.lower, nstruct++, 0};
        } else if (std::isfinite(b.upper)) {
            vars[j] = {VarKind::reflected_upper, b.upper, nstruct++, 0};
        } else {
            vars[j] = {VarKind::split_free, 0.0, nstruct, nstruct + 1};
            nstruct += 2;
        }
    }

    auto map_row = [&](const std::vector<std::uint32_t>& idx, const std::vector<double>& val,
                       double rhs, Sense sense) {
        StdRow row{std::vector<double>(nstruct, 0.0), rhs, sense};
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const VarMap& m = vars[idx[k]];
            const double a = val[k];
            switch (m.kind) {
                case VarKind::shifted_lower:
                    row.coeffs[m.col] += a;
                    row.rhs -= a * m.offset;
                    break;
                case VarKind::reflected_upper:
                    row.coeffs[m.col] -= a;
                    row.rhs -= a * m.offset;
                    break;
                case VarKind::split_free:
                    row.coeffs[m.col] += a;
                    row.coeffs[m.col_neg] -= a;
                    break;
            }
        }
        rows.push_back(std::move(row));
    };

    for (const auto& r : problem.rows) map_row(r.index, r.value, r.rhs, r.sense);
    for (std::size_t j = 0; j < n && !problem.bounds.empty(); ++j) {
        const VariableBound b = problem.bounds[j];
        if (std::isfinite(b.lower) && std::isfinite(b.upper)) {
            map_row({static_cast<std::uint32_t>(j)}, {1.0}, b.upper, Sense::less_equal);
        }
    }

    const std::size_t m = rows.size();
    std::size_t nslack = 0;
    for (const auto& r : rows)
        if (r.sense != Sense::equal) ++nslack;
    const std::size_t art0 = nstruct + nslack;
    const std::size_t ncols = art0 + m;

    Tableau tab(m, ncols);
    std::vector<std::size_t> basis(m);
    std::size_t slack = nstruct;
    for (std::size_t r = 0; r < m; ++r) {
        const StdRow& row = rows[r];
        const double sign = row.rhs < 0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < nstruct; ++c) tab.at(r, c) = sign * row.coeffs[c];
        if (row.sense == Sense::less_equal) tab.at(r, slack++) = sign;
        if (row.sense == Sense::greater_equal) tab.at(r, slack++) = -sign;
        tab.at(r, art0 + r) = 1.0;
        tab.rhs(r) = sign * row.rhs;
        basis[r] = art0 + r;
    }

    // Phase I: minimize the sum of artificials.
    for (std::size_t c = 0; c <= ncols; ++c) {
        double s = 0.0;
        if (c < art0 || c == ncols) {
            for (std::size_t r = 0; r < m; ++r) s += c == ncols ? tab.rhs(r) : tab.at(r, c);
        }
        if (c == ncols) {
            tab.objective() = -s;
        } else {
            tab.cost(c) = c < art0 ? -s : 0.0;
        }
    }

    LpSolution sol;
    std::size_t iterations = 0;
    auto phase1 = run_phase(tab, basis, art0, max_iter, iterations);
    if (phase1 != PhaseResult::optimal) {
        sol.iterations = iterations;
        return sol;
    }
    double rhs_scale = 1.0;
    for (const auto& r : rows) rhs_scale = std::max(rhs_scale, std::abs(r.rhs));
    if (-tab.objective() > options.feas_tol * rhs_scale) {
        sol.status = LpStatus::infeasible;
        sol.iterations = iterations;
        return sol;
    }

    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
        if (basis[r] < art0) continue;
        for (std::size_t c = 0; c < art0; ++c) {
            if (std::abs(tab.at(r, c)) > kPivotTol) {
                tab.pivot(r, c);
                basis[r] = c;
                break;
            }
        }
    }

    // Phase II: minimize -objective over structural and slack columns.
    std::vector<double> cost(ncols, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double c = problem.objective[j];
        const VarMap& vm = vars[j];
        switch (vm.kind) {
            case VarKind::shifted_lower:
                cost[vm.col] -= c;
                break;
            case VarKind::reflected_upper:
                cost[vm.col] += c;
                break;
            case VarKind::split_free:
                cost[vm.col] -= c;
                cost[vm.col_neg] += c;
                break;
        }
    }
    for (std::size_t c = 0; c <= ncols; ++c) {
        double reduced = c < ncols ? cost[c] : 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const double cb = cost[basis[r]];
            if (cb != 0.0) reduced -= cb * (c < ncols ? tab.at(r, c) : tab.rhs(r));
        }
        if (c < ncols) {
            tab.cost(c) = reduced;
        } else {
            tab.objective() = reduced;
        }
    }

    auto phase2 = run_phase(tab, basis, art0, max_iter, iterations);
    sol.iterations = iterations;
    if (phase2 == PhaseResult::iteration_limit) return sol;
    if (phase2 == PhaseResult::unbounded) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    std::vector<double> zval(ncols, 0.0);
    for (std::size_t r = 0; r < m; ++r) zval[basis[r]] = tab.rhs(r);
    sol.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const VarMap& vm = vars[j];
        switch (vm.kind) {
            case VarKind::shifted_lower:
                sol.x[j] = vm.offset + zval[vm.col];
                break;
            case VarKind::reflected_upper:
                sol.x[j] = vm.offset - zval[vm.col];
                break;
            case VarKind::split_free:
                sol.x[j] = zval[vm.col] - zval[vm.col_neg];
                break;
        }
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += problem.objective[j] * sol.x[j];
    sol.objective_value = obj;
    sol.status = LpStatus::optimal;
    return sol;
}

}  // namespace vlc::detail
