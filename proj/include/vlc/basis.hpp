#pragma once

#include <span>
#include <vector>

#include "vlc/dense.hpp"
#include "vlc/model.hpp"

namespace vlc {

// Sample instants t_n = n*Ts/(2K*No), n = 0..N, and the basis evaluation rows
// u_n = [sqrt(1/Ts), sqrt(2/Ts)cos(2 pi k t_n/Ts), sqrt(2/Ts)sin(2 pi k t_n/Ts)]_k.
// K = 0 gives a single sample at t = 0 with u_0 = [sqrt(1/Ts)].
struct SampleGrid {
    int K = 0;
    double Ts = 1.0;
    int No = 1;
    std::vector<double> times;
    DenseMatrix eval;  // (N+1) x (2K+1)

    std::size_t samples() const { return times.size(); }
    std::size_t block() const { return eval.cols(); }
    const double* row(std::size_t n) const { return eval.row(n); }
};

SampleGrid build_grid(int K, double Ts, int No);

// Value of basis function j (0 = DC, 2k-1 = cos_k, 2k = sin_k) at time t.
double basis_value(int j, double t, double Ts);

// Amplitudes of one color waveform at the grid samples. `point` is either a
// joint point (3 color blocks) or a single color block; `color` selects the
// block for joint points and is ignored otherwise.
std::vector<double> synthesize_waveform(std::span<const double> point, Color color,
                                        const SampleGrid& grid);

// Time-averaged intensity per color of a joint point: dc * sqrt(1/Ts).
Vec3 dc_expectation(std::span<const double> point, double Ts);

}  // namespace vlc
