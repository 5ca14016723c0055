#include "vlc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vlc/simd.hpp"

namespace vlc {

std::string_view to_string(Color c) {
    switch (c) {
        case Color::red:
            return "red";
        case Color::green:
            return "green";
        case Color::blue:
            return "blue";
    }
    return "unknown";
}

std::string_view to_string(ConstraintMode m) {
    switch (m) {
        case ConstraintMode::dynamic_range:
            return "dynamic_range";
        case ConstraintMode::l_papr:
            return "l_papr";
        case ConstraintMode::i_papr:
            return "i_papr";
    }
    return "unknown";
}

ConstraintMode constraint_mode_from_string(std::string_view name) {
    if (name == "dynamic_range") return ConstraintMode::dynamic_range;
    if (name == "l_papr") return ConstraintMode::l_papr;
    if (name == "i_papr") return ConstraintMode::i_papr;
    throw SpecError("constraint_mode", "unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(DesignStatus s) {
    switch (s) {
        case DesignStatus::converged:
            return "converged";
        case DesignStatus::iteration_cap:
            return "iteration_cap";
        case DesignStatus::infeasible:
            return "infeasible";
    }
    return "unknown";
}

bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

DesignSpec validate_spec(DesignSpec spec) {
    auto fail = [](const char* field, const std::string& msg) { throw SpecError(field, msg); };
    if (spec.K < 0) fail("K", "must be >= 0");
    if (!is_power_of_two(spec.Nc) || spec.Nc < 2) {
        std::ostringstream os;
        os << "Nc=" << spec.Nc << " is not a power of two >= 2";
        fail("Nc", os.str());
    }
    if (!(spec.Ts > 0.0) || !std::isfinite(spec.Ts)) fail("Ts", "must be positive");
    if (spec.No < 1) fail("No", "must be >= 1");
    double sum = 0.0;
    for (double s : spec.s_avg) {
        if (!(s >= 0.0) || !std::isfinite(s)) fail("s_avg", "entries must be nonnegative");
        sum += s;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "ratios sum to " << sum << " != 1";
        fail("s_avg", os.str());
    }
    const double smax = std::max({spec.s_avg[0], spec.s_avg[1], spec.s_avg[2]});
    if (!(spec.Po > 0.0) || !(spec.Po * smax > 0.0)) fail("Po", "must be positive");
    if (!(spec.Po < spec.I_U)) fail("I_U", "average power must lie below I_U");
    if (!(spec.epsilon >= 0.0) || !(spec.epsilon < 1.0 / 3.0))
        fail("epsilon", "cross-talk index must satisfy 0 <= epsilon < 1/3");
    if (spec.constraint_mode != ConstraintMode::dynamic_range) {
        for (double b : spec.beta)
            if (!(b > 0.0)) fail("beta", "PAPR bounds must be positive");
    }
    if (spec.restarts < 1) fail("restarts", "must be >= 1");
    if (!(spec.sca_tol > 0.0)) fail("sca_tol", "must be positive");
    if (spec.sca_max_iter < 1) fail("sca_max_iter", "must be >= 1");

    int bits = 0;
    while ((1 << bits) < spec.Nc) ++bits;
    spec.Nb = bits;
    spec.D = 3 * spec.block();
    spec.N = 2 * spec.K * spec.No;
    return spec;
}

Constellation Constellation::joint(int K, int Nc) {
    return from_stacked(ConstellationMode::joint, Color::red, K, Nc,
                        std::vector<double>(static_cast<std::size_t>(3 * (2 * K + 1) * Nc), 0.0));
}

Constellation Constellation::per_color(int K, int Nc, Color color) {
    return from_stacked(ConstellationMode::per_color, color, K, Nc,
                        std::vector<double>(static_cast<std::size_t>((2 * K + 1) * Nc), 0.0));
}

Constellation Constellation::from_stacked(ConstellationMode mode, Color color, int K, int Nc,
                                          std::vector<double> stacked) {
    Constellation c;
    c.mode_ = mode;
    c.color_ = color;
    c.K_ = K;
    c.Nc_ = Nc;
    c.D_ = (mode == ConstellationMode::joint ? 3 : 1) * (2 * K + 1);
    if (stacked.size() != static_cast<std::size_t>(c.D_) * static_cast<std::size_t>(Nc))
        throw std::invalid_argument("constellation: stacked length does not match D*Nc");
    c.stacked_ = std::move(stacked);
    return c;
}

Constellation Constellation::from_points(ConstellationMode mode, Color color, int K,
                                         const DenseMatrix& points) {
    const int Nc = static_cast<int>(points.cols());
    const std::size_t D = points.rows();
    std::vector<double> stacked(D * static_cast<std::size_t>(Nc));
    for (int i = 0; i < Nc; ++i)
        for (std::size_t r = 0; r < D; ++r) stacked[static_cast<std::size_t>(i) * D + r] = points(r, i);
    return from_stacked(mode, color, K, Nc, std::move(stacked));
}

std::span<const double> Constellation::point(int i) const {
    return std::span<const double>(stacked_).subspan(static_cast<std::size_t>(i) * D_, D_);
}

std::span<double> Constellation::point(int i) {
    return std::span<double>(stacked_).subspan(static_cast<std::size_t>(i) * D_, D_);
}

std::span<const double> Constellation::color_block(int i, int p) const {
    return point(i).subspan(static_cast<std::size_t>(p) * (2 * K_ + 1), 2 * K_ + 1);
}

std::size_t Constellation::offset(int i, int p, int local) const {
    return static_cast<std::size_t>(i) * D_ + static_cast<std::size_t>(p) * (2 * K_ + 1) + local;
}

DenseMatrix Constellation::points() const {
    DenseMatrix m(D_, Nc_);
    for (int i = 0; i < Nc_; ++i)
        for (int r = 0; r < D_; ++r) m(r, i) = stacked_[static_cast<std::size_t>(i) * D_ + r];
    return m;
}

double min_distance(const Constellation& c) {
    if (c.size() < 2) return 0.0;
    const auto& k = simd::kernels();
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p < c.size(); ++p)
        for (int q = p + 1; q < c.size(); ++q)
            best = std::min(best, k.squared_distance(c.point(p).data(), c.point(q).data(),
                                                     static_cast<std::size_t>(c.dimension())));
    return std::sqrt(best);
}

}  // namespace vlc
