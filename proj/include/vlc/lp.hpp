#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace vlc {

enum class Sense { less_equal, greater_equal, equal };

// Linear row `coeffs . x  (sense)  rhs` over the full LP variable vector.
// Coefficients are stored sparsely; absent indices are zero.
struct AffineRow {
    std::vector<std::uint32_t> index;
    std::vector<double> value;
    double rhs = 0.0;
    Sense sense = Sense::less_equal;

    void add(std::uint32_t i, double v) {
        index.push_back(i);
        value.push_back(v);
    }

    double lhs(std::span<const double> x) const;

    // Amount by which x violates the row (0 when satisfied).
    double violation(std::span<const double> x) const;

    std::vector<double> dense(std::size_t num_vars) const;
};

struct VariableBound {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

// maximize objective . x subject to rows and bounds.
struct LpProblem {
    std::size_t num_vars = 0;
    std::vector<double> objective;
    std::vector<AffineRow> rows;
    std::vector<VariableBound> bounds;  // empty means every variable is free
};

enum class LpStatus { optimal, infeasible, unbounded, numerical_failure };

std::string_view to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::numerical_failure;
    std::vector<double> x;
    double objective_value = 0.0;
    std::size_t iterations = 0;
};

enum class LpMethod { automatic, simplex, interior_point };

struct LpOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-8;
    LpMethod method = LpMethod::automatic;
    std::size_t max_iterations = 0;  // 0 selects a per-method default
};

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

// Largest row or bound violation of x.
double max_violation(const LpProblem& problem, std::span<const double> x);

// Writes the instance in CPLEX LP text format, variables named x0, x1, ...
void write_cplex_lp(const LpProblem& problem, std::ostream& out);

}  // namespace vlc
