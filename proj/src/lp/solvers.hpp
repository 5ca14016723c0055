#pragma once

#include "vlc/lp.hpp"

namespace vlc::detail {

LpSolution solve_simplex(const LpProblem& problem, const LpOptions& options);

LpSolution solve_interior_point(const LpProblem& problem, const LpOptions& options);

}  // namespace vlc::detail
