#include "vlc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "solvers.hpp"

namespace vlc {

double AffineRow::lhs(std::span<const double> x) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) acc += value[k] * x[index[k]];
    return acc;
}

double AffineRow::violation(std::span<const double> x) const {
    const double v = lhs(x);
    switch (sense) {
        case Sense::less_equal:
            return std::max(0.0, v - rhs);
        case Sense::greater_equal:
            return std::max(0.0, rhs - v);
        case Sense::equal:
            return std::abs(v - rhs);
    }
    return 0.0;
}

std::vector<double> AffineRow::dense(std::size_t num_vars) const {
    std::vector<double> out(num_vars, 0.0);
    for (std::size_t k = 0; k < index.size(); ++k) out[index[k]] += value[k];
    return out;
}

std::string_view to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal:
            return "optimal";
        case LpStatus::infeasible:
            return "infeasible";
        case LpStatus::unbounded:
            return "unbounded";
        case LpStatus::numerical_failure:
            return "numerical_failure";
    }
    return "unknown";
}

double max_violation(const LpProblem& problem, std::span<const double> x) {
    double worst = 0.0;
    for (const auto& row : problem.rows) worst = std::max(worst, row.violation(x));
    for (std::size_t j = 0; j < problem.bounds.size(); ++j) {
        worst = std::max(worst, problem.bounds[j].lower - x[j]);
        worst = std::max(worst, x[j] - problem.bounds[j].upper);
    }
    return worst;
}

namespace {

void validate(const LpProblem& problem) {
    if (problem.objective.size() != problem.num_vars)
        throw std::invalid_argument("lp: objective length does not match num_vars");
    if (!problem.bounds.empty() && problem.bounds.size() != problem.num_vars)
        throw std::invalid_argument("lp: bounds length does not match num_vars");
    for (const auto& row : problem.rows) {
        if (row.index.size() != row.value.size())
            throw std::invalid_argument("lp: row index/value length mismatch");
        if (!std::isfinite(row.rhs)) throw std::invalid_argument("lp: non-finite row rhs");
        for (std::size_t k = 0; k < row.index.size(); ++k) {
            if (row.index[k] >= problem.num_vars)
                throw std::invalid_argument("lp: row references unknown variable");
            if (!std::isfinite(row.value[k]))
                throw std::invalid_argument("lp: non-finite row coefficient");
        }
    }
    for (double c : problem.objective)
        if (!std::isfinite(c)) throw std::invalid_argument("lp: non-finite objective");
}

// Dense tableau simplex is exact in its classification and fast below this size.
bool small_enough_for_simplex(const LpProblem& problem) {
    const std::size_t vars = problem.num_vars;
    const std::size_t rows = problem.rows.size();
    return vars <= 64 && rows <= 400;
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
    validate(problem);
    LpMethod method = options.method;
    if (method == LpMethod::automatic) {
        method = small_enough_for_simplex(problem) ? LpMethod::simplex : LpMethod::interior_point;
    }
    return method == LpMethod::simplex ? detail::solve_simplex(problem, options)
                                       : detail::solve_interior_point(problem, options);
}

void write_cplex_lp(const LpProblem& problem, std::ostream& out) {
    out.precision(17);
    auto write_terms = [&out](const std::vector<std::uint32_t>& idx,
                              const std::vector<double>& val) {
        if (idx.empty()) {
            out << " 0 x0";
            return;
        }
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (k > 0 && k % 6 == 0) out << "\n  ";
            out << (val[k] < 0 ? " - " : " + ") << std::abs(val[k]) << " x" << idx[k];
        }
    };

    out << "\\ exported by vlcdesign\n";
    out << "Maximize\n obj:";
    std::vector<std::uint32_t> oidx;
    std::vector<double> oval;
    for (std::size_t j = 0; j < problem.num_vars; ++j) {
        if (problem.objective[j] != 0.0) {
            oidx.push_back(static_cast<std::uint32_t>(j));
            oval.push_back(problem.objective[j]);
        }
    }
    write_terms(oidx, oval);
    out << "\nSubject To\n";
    for (std::size_t r = 0; r < problem.rows.size(); ++r) {
        const auto& row = problem.rows[r];
        out << " c" << r << ":";
        write_terms(row.index, row.value);
        switch (row.sense) {
            case Sense::less_equal:
                out << " <= ";
                break;
            case Sense::greater_equal:
                out << " >= ";
                break;
            case Sense::equal:
                out << " = ";
                break;
        }
        out << row.rhs << "\n";
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < problem.num_vars; ++j) {
        const VariableBound b = problem.bounds.empty() ? VariableBound{} : problem.bounds[j];
        const bool lo = std::isfinite(b.lower);
        const bool hi = std::isfinite(b.upper);
        if (!lo && !hi) {
            out << " x" << j << " free\n";
        } else if (lo && hi) {
            out << " " << b.lower << " <= x" << j << " <= " << b.upper << "\n";
        } else if (lo) {
            out << " x" << j << " >= " << b.lower << "\n";
        } else {
            out << " -inf <= x" << j << " <= " << b.upper << "\n";
        }
    }
    out << "End\n";
}

}  // namespace vlc
