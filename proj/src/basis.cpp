#include "vlc/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vlc/simd.hpp"

namespace vlc {

double basis_value(int j, double t, double Ts) {
    if (j == 0) return std::sqrt(1.0 / Ts);
    const int k = (j + 1) / 2;
    const double arg = 2.0 * std::numbers::pi * k * t / Ts;
    return std::sqrt(2.0 / Ts) * ((j % 2 == 1) ? std::cos(arg) : std::sin(arg));
}

SampleGrid build_grid(int K, double Ts, int No) {
    if (K < 0) throw std::invalid_argument("build_grid: K must be >= 0");
    if (No < 1) throw std::invalid_argument("build_grid: No must be >= 1");
    if (!(Ts > 0.0)) throw std::invalid_argument("build_grid: Ts must be positive");
    SampleGrid grid;
    grid.K = K;
    grid.Ts = Ts;
    grid.No = No;
    const int N = 2 * K * No;
    const int B = 2 * K + 1;
    grid.times.resize(static_cast<std::size_t>(N) + 1);
    grid.eval = DenseMatrix(static_cast<std::size_t>(N) + 1, static_cast<std::size_t>(B));
    for (int n = 0; n <= N; ++n) {
        const double t = N == 0 ? 0.0 : n * Ts / N;
        grid.times[n] = t;
        for (int j = 0; j < B; ++j) grid.eval(n, j) = basis_value(j, t, Ts);
    }
    return grid;
}

std::vector<double> synthesize_waveform(std::span<const double> point, Color color,
                                        const SampleGrid& grid) {
    const std::size_t B = grid.block();
    std::span<const double> block;
    if (point.size() == B) {
        block = point;
    } else if (point.size() == 3 * B) {
        block = point.subspan(static_cast<std::size_t>(color) * B, B);
    } else {
        throw std::invalid_argument("synthesize_waveform: point dimension does not match grid");
    }
    std::vector<double> out(grid.samples());
    simd::kernels().gemv(grid.eval.row(0), grid.samples(), B, block.data(), out.data());
    return out;
}

Vec3 dc_expectation(std::span<const double> point, double Ts) {
    if (point.size() % 3 != 0 || point.empty())
        throw std::invalid_argument("dc_expectation: expects a joint point");
    const std::size_t B = point.size() / 3;
    const double g = std::sqrt(1.0 / Ts);
    return {point[0] * g, point[B] * g, point[2 * B] * g};
}

}  // namespace vlc
