#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vlc/dense.hpp"

namespace vlc {

enum class Color : int { red = 0, green = 1, blue = 2 };

inline constexpr std::array<Color, 3> kColors{Color::red, Color::green, Color::blue};

std::string_view to_string(Color c);

enum class ConstraintMode { dynamic_range, l_papr, i_papr };

std::string_view to_string(ConstraintMode m);
ConstraintMode constraint_mode_from_string(std::string_view name);

using Vec3 = std::array<double, 3>;

// Raised by validate_spec; `field()` names the violated invariant.
class SpecError : public std::invalid_argument {
public:
    SpecError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Scenario parameters for one design run. Electrical/optical conversion
// factors are taken as unity.
struct DesignSpec {
    int K = 2;                      // subcarriers per LED
    int Nc = 64;                    // constellation size
    double Po = 20.0;               // average optical power
    Vec3 s_avg{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    double I_U = 80.0;              // upper amplitude bound
    double Ts = 1.0;                // symbol interval
    int No = 4;                     // oversampling rate of the constraint grid
    double epsilon = 0.0;           // green/blue cross-talk index
    ConstraintMode constraint_mode = ConstraintMode::dynamic_range;
    Vec3 beta{4.0, 4.0, 4.0};       // PAPR bounds, PAPR modes only
    int restarts = 20;              // multi-start count N_M
    std::uint64_t rng_seed = 1;
    double sca_tol = 1e-5;          // relative improvement of d_min^2
    int sca_max_iter = 100;
    std::string lp_dump_path;       // when set, the first LP of restart 0 is written here

    // Populated by validate_spec.
    int Nb = 0;         // log2(Nc)
    int D = 0;          // 6K+3
    int N = 0;          // 2K*No, the grid has N+1 samples

    int block() const { return 2 * K + 1; }
};

// Returns a copy with derived quantities filled in, or throws SpecError for
// the first violated invariant.
DesignSpec validate_spec(DesignSpec spec);

// True when n is a positive power of two.
bool is_power_of_two(long long n);

enum class ConstellationMode { joint, per_color };

// Nc points of dimension D, stored point-major: point i occupies
// stacked[i*D, (i+1)*D). Joint points hold three color blocks of 2K+1
// coefficients [dc, cos_1, sin_1, ..., cos_K, sin_K].
class Constellation {
public:
    Constellation() = default;

    static Constellation joint(int K, int Nc);
    static Constellation per_color(int K, int Nc, Color color);
    static Constellation from_stacked(ConstellationMode mode, Color color, int K, int Nc,
                                      std::vector<double> stacked);
    // Columns of `points` (D x Nc) are the points.
    static Constellation from_points(ConstellationMode mode, Color color, int K,
                                     const DenseMatrix& points);

    ConstellationMode mode() const { return mode_; }
    Color color() const { return color_; }  // meaningful for per_color
    int K() const { return K_; }
    int size() const { return Nc_; }
    int dimension() const { return D_; }
    int colors() const { return mode_ == ConstellationMode::joint ? 3 : 1; }

    std::span<const double> stacked() const { return stacked_; }
    std::span<double> stacked() { return stacked_; }

    std::span<const double> point(int i) const;
    std::span<double> point(int i);

    // Coefficient block of color slot p (0 for per_color) within point i.
    std::span<const double> color_block(int i, int p) const;

    // Stacked offset of coefficient `local` of color slot p in point i.
    std::size_t offset(int i, int p, int local) const;

    DenseMatrix points() const;

private:
    ConstellationMode mode_ = ConstellationMode::joint;
    Color color_ = Color::red;
    int K_ = 0;
    int Nc_ = 0;
    int D_ = 0;
    std::vector<double> stacked_;
};

// Exact minimum pairwise Euclidean distance (0 for fewer than two points).
double min_distance(const Constellation& c);

struct PaprReport {
    Vec3 long_term{0.0, 0.0, 0.0};                  // per color slot
    std::vector<std::array<double, 3>> individual;  // [point][color slot]
};

enum class DesignStatus { converged, iteration_cap, infeasible };

std::string_view to_string(DesignStatus s);

struct ScaTrace {
    std::vector<double> d_min;          // exact, index 0 is the start point
    std::vector<std::string> lp_status;
    std::vector<double> step_norm;
    std::vector<std::size_t> lp_iterations;
};

struct DesignResult {
    Constellation constellation;
    double d_min = 0.0;
    std::vector<int> iterations;           // per restart
    std::vector<double> restart_scores;    // d_min of every local optimum
    std::vector<ScaTrace> traces;          // per restart
    std::vector<std::string> failures;     // restarts that did not finish
    Vec3 post_dc_bias{0.0, 0.0, 0.0};      // DC coefficient added per color slot
    Vec3 power_deviation{0.0, 0.0, 0.0};   // resulting mean intensity shift
    PaprReport papr;
    PaprReport papr_first_round;           // measured before any backoff
    Vec3 beta_used{0.0, 0.0, 0.0};         // PAPR bound after backoff
    int backoff_rounds = 0;
    DesignStatus status = DesignStatus::converged;
};

}  // namespace vlc
