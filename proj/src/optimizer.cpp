#include "vlc/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "vlc/simd.hpp"

namespace vlc {

namespace {

constexpr int kInitAttempts = 100;
constexpr int kFineFactor = 20;
constexpr int kBackoffRounds = 5;
constexpr double kBackoffFactor = 0.95;

double min_distance_sq(std::span<const double> stacked, int D, int Nc) {
    const auto& k = simd::kernels();
    double best = std::numeric_limits<double>::infinity();
    const auto d = static_cast<std::size_t>(D);
    for (int p = 0; p < Nc; ++p)
        for (int q = p + 1; q < Nc; ++q)
            best = std::min(best, k.squared_distance(stacked.data() + p * d, stacked.data() + q * d, d));
    return Nc < 2 ? 0.0 : best;
}

bool papr_within(const PaprReport& papr, const Geometry& geom, ConstraintMode mode,
                 const Vec3& beta, double slack) {
    for (int x = 0; x < geom.colors; ++x) {
        if (mode == ConstraintMode::l_papr && papr.long_term[x] > beta[x] * (1.0 + slack)) return false;
        if (mode == ConstraintMode::i_papr) {
            for (const auto& pt : papr.individual)
                if (pt[x] > beta[x] * (1.0 + slack)) return false;
        }
    }
    return true;
}

template <class Fn>
void parallel_for(int count, Fn&& fn) {
    const int workers = std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

struct RestartOutcome {
    std::optional<ScaOutcome> result;
    std::string error;
};

DesignResult run_design(const DesignSpec& spec, const Geometry& geom, ConstellationMode cmode,
                        Color color) {
    const SampleGrid grid = build_grid(spec.K, spec.Ts, spec.No);
    const SampleGrid fine = build_grid(spec.K, spec.Ts, kFineFactor * spec.No);
    ScaSettings settings = sca_settings(spec);
    const bool papr_mode = settings.mode != ConstraintMode::dynamic_range;

    DesignResult result;
    PaprReport first_papr;
    for (int round = 0;; ++round) {
        std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(spec.restarts));
        parallel_for(spec.restarts, [&](int r) {
            auto rng = restart_rng(spec.rng_seed, static_cast<std::uint64_t>(r));
            try {
                ScaSettings local = settings;
                if (r == 0) local.lp_dump_path = spec.lp_dump_path;
                auto s0 = random_feasible_init(geom, grid, local, rng);
                outcomes[r].result = sca_optimize(geom, grid, local, std::move(s0));
            } catch (const std::exception& e) {
                outcomes[r].error = "restart " + std::to_string(r) + ": " + e.what();
            }
        });

        result = DesignResult{};
        int best = -1;
        for (int r = 0; r < spec.restarts; ++r) {
            const auto& o = outcomes[r];
            if (!o.result) {
                result.failures.push_back(o.error);
                continue;
            }
            result.iterations.push_back(o.result->iterations);
            result.restart_scores.push_back(o.result->d_min);
            result.traces.push_back(o.result->trace);
            if (best < 0 || o.result->d_min > outcomes[best].result->d_min) best = r;
        }
        if (best < 0) {
            throw DesignFailure("all " + std::to_string(spec.restarts) + " restarts failed; first: " +
                                result.failures.front());
        }

        std::vector<double> stacked = outcomes[best].result->stacked;
        const Vec3 bias = post_dc_compensation(geom, fine, stacked);
        const PaprReport papr = measure_papr(geom, grid, stacked);
        if (round == 0) first_papr = papr;
        const Vec3 target = sca_settings(spec).beta;
        if (papr_mode && round < kBackoffRounds && !papr_within(papr, geom, settings.mode, target, 1e-9)) {
            for (double& b : settings.beta) b *= kBackoffFactor;
            continue;
        }

        result.constellation = Constellation::from_stacked(cmode, color, spec.K, geom.Nc, std::move(stacked));
        result.d_min = outcomes[best].result->d_min;
        result.post_dc_bias = bias;
        for (int x = 0; x < 3; ++x) result.power_deviation[x] = bias[x] * std::sqrt(1.0 / spec.Ts);
        result.papr = papr;
        result.papr_first_round = first_papr;
        result.beta_used = papr_mode ? settings.beta : Vec3{0.0, 0.0, 0.0};
        result.backoff_rounds = round;
        result.status = outcomes[best].result->converged ? DesignStatus::converged : DesignStatus::iteration_cap;
        return result;
    }
}

}  // namespace

ScaSettings sca_settings(const DesignSpec& spec) {
    ScaSettings s;
    s.mode = spec.constraint_mode;
    s.beta = spec.beta;
    s.tol = spec.sca_tol;
    s.max_iter = spec.sca_max_iter;
    return s;
}

std::mt19937_64 restart_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

std::vector<double> random_feasible_init(const Geometry& geom, const SampleGrid& grid,
                                         const ScaSettings& settings, std::mt19937_64& rng) {
    const int B = geom.block();
    const int D = geom.dimension();
    const int Nc = geom.Nc;
    const Mat3 unmix = geom.colors == 1 ? identity3() : inverse(geom.precoder);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    double dc_jitter = 0.2;
    double ac_scale = geom.K > 0 ? 0.2 * geom.I_U / std::sqrt(2.0 * geom.K) : 0.0;
    std::vector<double> tx(geom.num_coeffs());
    std::vector<double> s(geom.num_coeffs());
    for (int attempt = 0; attempt < kInitAttempts; ++attempt) {
        std::fill(tx.begin(), tx.end(), 0.0);
        for (int x = 0; x < geom.colors; ++x) {
            const double mean_dc = geom.power[x] * std::sqrt(geom.Ts);
            double sum = 0.0;
            for (int i = 0; i < Nc; ++i) {
                double& dc = tx[static_cast<std::size_t>(i) * D + x * B];
                dc = mean_dc * (1.0 + dc_jitter * unit(rng));
                sum += dc;
            }
            const double shift = sum / Nc - mean_dc;
            for (int i = 0; i < Nc; ++i) tx[static_cast<std::size_t>(i) * D + x * B] -= shift;
            if (geom.power[x] <= 0.0) continue;
            for (int i = 0; i < Nc; ++i)
                for (int j = 1; j < B; ++j) tx[static_cast<std::size_t>(i) * D + x * B + j] = ac_scale * unit(rng);
        }
        // back to design space, point by point
        for (int i = 0; i < Nc; ++i) {
            const std::size_t base = static_cast<std::size_t>(i) * D;
            for (int c = 0; c < geom.colors; ++c) {
                for (int j = 0; j < B; ++j) {
                    double v = 0.0;
                    for (int x = 0; x < geom.colors; ++x) v += unmix[c][x] * tx[base + x * B + j];
                    s[base + c * B + j] = v;
                }
            }
        }

        bool ok = true;
        for (int i = 0; i < Nc && ok; ++i) {
            for (int x = 0; x < geom.colors && ok; ++x) {
                const double lo = std::min(0.02 * geom.I_U, 0.5 * geom.power[x]);
                const auto wave = transmit_waveform(geom, grid, s, i, x);
                const auto [mn, mx] = std::minmax_element(wave.begin(), wave.end());
                ok = *mn >= lo && *mx <= 0.98 * geom.I_U;
            }
        }
        if (ok && settings.mode != ConstraintMode::dynamic_range)
            ok = papr_within(measure_papr(geom, grid, s), geom, settings.mode, settings.beta, 0.0);
        if (ok) return s;
        dc_jitter *= 0.5;
        ac_scale *= 0.5;
    }
    throw std::runtime_error("random_feasible_init: no feasible start after " +
                             std::to_string(kInitAttempts) + " attempts");
}

ScaOutcome sca_optimize(const Geometry& geom, const SampleGrid& grid, const ScaSettings& settings,
                        std::vector<double> s0) {
    const int D = geom.dimension();
    const int Nc = geom.Nc;
    const std::size_t n_s = geom.num_coeffs();
    if (s0.size() != n_s) throw std::invalid_argument("sca_optimize: s0 has wrong length");
    const auto t_index = static_cast<std::uint32_t>(n_s);
    const auto aux_index = static_cast<std::uint32_t>(n_s + 1);
    const bool lpapr = settings.mode == ConstraintMode::l_papr;
    const bool ipapr = settings.mode == ConstraintMode::i_papr;

    std::vector<AffineRow> fixed = power_color_rows(geom);
    {
        auto range = dynamic_range_rows(geom, grid, settings.mode == ConstraintMode::dynamic_range);
        fixed.insert(fixed.end(), std::make_move_iterator(range.begin()), std::make_move_iterator(range.end()));
    }

    ScaOutcome out;
    out.stacked = std::move(s0);
    double d2 = min_distance_sq(out.stacked, D, Nc);
    out.trace.d_min.push_back(std::sqrt(d2));

    const std::vector<Vec3> beta_all{settings.beta};
    for (int iter = 1; iter <= settings.max_iter; ++iter) {
        LpProblem lp;
        lp.num_vars = n_s + 1 + (lpapr ? 1 : 0);
        lp.objective.assign(lp.num_vars, 0.0);
        lp.objective[t_index] = 1.0;
        lp.rows.reserve(fixed.size() + static_cast<std::size_t>(Nc) * (Nc - 1) / 2 +
                        (lpapr || ipapr ? static_cast<std::size_t>(Nc) * geom.colors * grid.samples() + 1 : 0));
        lp.rows = fixed;
        for (int p = 0; p < Nc; ++p)
            for (int q = p + 1; q < Nc; ++q) lp.rows.push_back(linearize_distance(out.stacked, D, p, q, t_index));
        if (lpapr) {
            auto rows = lpapr_rows(geom, grid, out.stacked, settings.beta, aux_index);
            lp.rows.insert(lp.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
        } else if (ipapr) {
            auto rows = ipapr_rows(geom, grid, out.stacked, beta_all);
            lp.rows.insert(lp.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
        }

        if (iter == 1 && !settings.lp_dump_path.empty()) {
            std::ofstream dump(settings.lp_dump_path);
            if (!dump) throw std::runtime_error("cannot write LP dump " + settings.lp_dump_path);
            write_cplex_lp(lp, dump);
        }
        const LpSolution sol = solve_lp(lp, settings.lp);
        if (sol.status != LpStatus::optimal) {
            out.trace.lp_status.emplace_back(to_string(sol.status));
            throw ScaError("sca_optimize: LP " + std::string(to_string(sol.status)) + " at iteration " +
                               std::to_string(iter),
                           std::move(out.trace));
        }
        std::vector<double> next(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n_s));
        const double d2_next = min_distance_sq(next, D, Nc);
        out.iterations = iter;
        // A solve that loses distance only reflects solver tolerance; keep
        // the previous iterate.
        if (d2_next < d2) {
            out.converged = true;
            break;
        }
        double step = 0.0;
        for (std::size_t k = 0; k < n_s; ++k) step += (next[k] - out.stacked[k]) * (next[k] - out.stacked[k]);
        out.trace.d_min.push_back(std::sqrt(d2_next));
        out.trace.lp_status.emplace_back(to_string(sol.status));
        out.trace.step_norm.push_back(std::sqrt(step));
        out.trace.lp_iterations.push_back(sol.iterations);
        const double rel = d2 > 0.0 ? (d2_next - d2) / d2 : (d2_next > 0.0 ? 1.0 : 0.0);
        out.stacked = std::move(next);
        d2 = d2_next;
        if (rel < settings.tol) {
            out.converged = true;
            break;
        }
    }
    out.d_min = std::sqrt(d2);
    return out;
}

Vec3 post_dc_compensation(const Geometry& geom, const SampleGrid& fine_grid,
                          std::vector<double>& stacked) {
    const int B = geom.block();
    const int D = geom.dimension();
    const Mat3 unmix = geom.colors == 1 ? identity3() : inverse(geom.precoder);
    Vec3 bias{0.0, 0.0, 0.0};
    for (int x = 0; x < geom.colors; ++x) {
        double lowest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < geom.Nc; ++i) {
            const auto wave = transmit_waveform(geom, fine_grid, stacked, i, x);
            lowest = std::min(lowest, *std::min_element(wave.begin(), wave.end()));
        }
        if (lowest < 0.0) bias[x] = -lowest * std::sqrt(geom.Ts);
    }
    for (int i = 0; i < geom.Nc; ++i) {
        const std::size_t base = static_cast<std::size_t>(i) * D;
        for (int c = 0; c < geom.colors; ++c) {
            double shift = 0.0;
            for (int x = 0; x < geom.colors; ++x) shift += unmix[c][x] * bias[x];
            stacked[base + c * B] += shift;
        }
    }
    return bias;
}

DesignResult design_joint(const DesignSpec& raw) {
    const DesignSpec spec = validate_spec(raw);
    const Mat3 precoder = spec.epsilon > 0.0 ? build_channel(spec.epsilon, spec.K).precoder : identity3();
    return run_design(spec, joint_geometry(spec, precoder), ConstellationMode::joint, Color::red);
}

DesignResult design_single_color(const DesignSpec& raw, Color color, int Nc) {
    const DesignSpec spec = validate_spec(raw);
    if (Nc < 2 || !is_power_of_two(Nc)) throw SpecError("Nc", "per-color size must be a power of two >= 2");
    return run_design(spec, color_geometry(spec, color, Nc), ConstellationMode::per_color, color);
}

std::array<DesignResult, 3> design_decoupled(const DesignSpec& raw) {
    const DesignSpec spec = validate_spec(raw);
    if (spec.Nb % 3 != 0)
        throw SpecError("Nb", "decoupled design needs Nb divisible by 3, got " + std::to_string(spec.Nb));
    if (spec.epsilon != 0.0) throw SpecError("epsilon", "decoupled design assumes no cross-talk");
    const int Nc = 1 << (spec.Nb / 3);
    return {design_single_color(spec, Color::red, Nc), design_single_color(spec, Color::green, Nc),
            design_single_color(spec, Color::blue, Nc)};
}

}  // namespace vlc
