#pragma once

#include <array>
#include <span>
#include <vector>

#include "vlc/dense.hpp"
#include "vlc/model.hpp"

namespace vlc {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 identity3();
Mat3 multiply(const Mat3& a, const Mat3& b);
Mat3 transpose(const Mat3& a);
// Throws std::invalid_argument for a singular matrix.
Mat3 inverse(const Mat3& a);

// Green/blue cross-talk channel. The 3x3 color matrix acts identically on
// every basis coefficient, so the full (6K+3)-square H is I_{2K+1} lifted by
// color blocks and all factorizations are done on the 3x3 matrix.
struct CrosstalkChannel {
    double epsilon = 0.0;
    int K = 0;
    Mat3 color_matrix{};
    Mat3 u{};             // left singular vectors (columns)
    Vec3 singular{};      // descending
    Mat3 v{};             // right singular vectors, first nonzero entry of each column > 0
    Mat3 precoder{};      // V S^-1
    Mat3 post{};          // U^T

    // Dense (6K+3)-square form of H, for inspection and tests.
    DenseMatrix full_matrix() const;
};

CrosstalkChannel build_channel(double epsilon, int K);

// Applies a color mixing matrix to every point of a joint stacked vector:
// out[(i, c, j)] = sum_c' m[c][c'] in[(i, c', j)].
std::vector<double> apply_color_mix(const Mat3& m, std::span<const double> stacked, int K);

std::vector<double> apply_precoder(const CrosstalkChannel& ch, std::span<const double> stacked);
std::vector<double> apply_channel(const CrosstalkChannel& ch, std::span<const double> stacked);
std::vector<double> apply_post(const CrosstalkChannel& ch, std::span<const double> received);

}  // namespace vlc
