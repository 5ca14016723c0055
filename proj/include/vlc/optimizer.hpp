#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlc/basis.hpp"
#include "vlc/channel.hpp"
#include "vlc/constraints.hpp"
#include "vlc/lp.hpp"
#include "vlc/model.hpp"

namespace vlc {

// An SCA step whose LP was not solved to optimality.
class ScaError : public std::runtime_error {
public:
    ScaError(const std::string& what, ScaTrace trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const ScaTrace& trace() const { return trace_; }

private:
    ScaTrace trace_;
};

// Every restart of a design failed.
class DesignFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScaSettings {
    ConstraintMode mode = ConstraintMode::dynamic_range;
    Vec3 beta{4.0, 4.0, 4.0};
    double tol = 1e-5;
    int max_iter = 100;
    LpOptions lp{};
    std::string lp_dump_path;  // first LP written in CPLEX LP format when set
};

ScaSettings sca_settings(const DesignSpec& spec);

struct ScaOutcome {
    std::vector<double> stacked;
    double d_min = 0.0;
    int iterations = 0;
    bool converged = false;
    ScaTrace trace;
};

// Deterministic stream for restart `index` of a run seeded with `seed`.
std::mt19937_64 restart_rng(std::uint64_t seed, std::uint64_t index);

// Random start satisfying the power rows exactly and every sampled waveform
// constraint of the active mode. Points are drawn in transmit space and
// mapped back through the inverse precoder. Throws std::runtime_error after
// 100 failed attempts.
std::vector<double> random_feasible_init(const Geometry& geom, const SampleGrid& grid,
                                         const ScaSettings& settings, std::mt19937_64& rng);

// Successive linearization of the pair distances from s0.
ScaOutcome sca_optimize(const Geometry& geom, const SampleGrid& grid, const ScaSettings& settings,
                        std::vector<double> s0);

// Uniform DC shift per color slot lifting the fine-grid minimum of every
// transmitted waveform to zero. Returns the bias added to each transmit DC
// coefficient.
Vec3 post_dc_compensation(const Geometry& geom, const SampleGrid& fine_grid,
                          std::vector<double>& stacked);

// Multi-start joint design (precoded when epsilon > 0).
DesignResult design_joint(const DesignSpec& spec);

// Multi-start design of one color with Nc points in dimension 2K+1, with
// power Po*s_avg[color] and bound I_U.
DesignResult design_single_color(const DesignSpec& spec, Color color, int Nc);

// Three independent per-color designs of 2^(Nb/3) points each.
std::array<DesignResult, 3> design_decoupled(const DesignSpec& spec);

}  // namespace vlc
