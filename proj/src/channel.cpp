#include "vlc/channel.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace vlc {

Mat3 identity3() {
    Mat3 m{};
    for (int i = 0; i < 3; ++i) m[i][i] = 1.0;
    return m;
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
    return out;
}

Mat3 transpose(const Mat3& a) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = a[j][i];
    return out;
}

Mat3 inverse(const Mat3& a) {
    Mat3 c{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            c[j][i] = a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1];
        }
    }
    const double det = a[0][0] * c[0][0] + a[0][1] * c[1][0] + a[0][2] * c[2][0];
    if (det == 0.0 || !std::isfinite(det)) throw std::invalid_argument("inverse: singular matrix");
    for (auto& row : c)
        for (double& v : row) v /= det;
    return c;
}

CrosstalkChannel build_channel(double epsilon, int K) {
    if (!(epsilon >= 0.0) || !(epsilon < 1.0 / 3.0))
        throw std::invalid_argument("build_channel: epsilon must satisfy 0 <= epsilon < 1/3");
    if (K < 0) throw std::invalid_argument("build_channel: K must be >= 0");

    CrosstalkChannel ch;
    ch.epsilon = epsilon;
    ch.K = K;
    const double a = 1.0 - 2.0 * epsilon;
    ch.color_matrix = {{{1.0, 0.0, 0.0}, {0.0, a, epsilon}, {0.0, epsilon, a}}};

    Eigen::Matrix3d h;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h(i, j) = ch.color_matrix[i][j];
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = svd.matrixU();
    Eigen::Matrix3d v = svd.matrixV();
    const Eigen::Vector3d s = svd.singularValues();

    for (int c = 0; c < 3; ++c) {
        int first = 0;
        while (first < 2 && std::abs(v(first, c)) < 1e-12) ++first;
        if (v(first, c) < 0.0) {
            v.col(c) *= -1.0;
            u.col(c) *= -1.0;
        }
    }
    for (int i = 0; i < 3; ++i) {
        ch.singular[i] = s(i);
        for (int j = 0; j < 3; ++j) {
            ch.u[i][j] = u(i, j);
            ch.v[i][j] = v(i, j);
            ch.precoder[i][j] = v(i, j) / s(j);
            ch.post[i][j] = u(j, i);
        }
    }
    return ch;
}

DenseMatrix CrosstalkChannel::full_matrix() const {
    const std::size_t B = static_cast<std::size_t>(2 * K + 1);
    DenseMatrix h(3 * B, 3 * B);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t c2 = 0; c2 < 3; ++c2)
            for (std::size_t j = 0; j < B; ++j) h(c * B + j, c2 * B + j) = color_matrix[c][c2];
    return h;
}

std::vector<double> apply_color_mix(const Mat3& m, std::span<const double> stacked, int K) {
    const std::size_t B = static_cast<std::size_t>(2 * K + 1);
    const std::size_t D = 3 * B;
    if (stacked.size() % D != 0)
        throw std::invalid_argument("apply_color_mix: length is not a multiple of 6K+3");
    std::vector<double> out(stacked.size(), 0.0);
    for (std::size_t base = 0; base < stacked.size(); base += D) {
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t c2 = 0; c2 < 3; ++c2) {
                const double f = m[c][c2];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j < B; ++j) out[base + c * B + j] += f * stacked[base + c2 * B + j];
            }
        }
    }
    return out;
}

std::vector<double> apply_precoder(const CrosstalkChannel& ch, std::span<const double> stacked) {
    return apply_color_mix(ch.precoder, stacked, ch.K);
}

std::vector<double> apply_channel(const CrosstalkChannel& ch, std::span<const double> stacked) {
    return apply_color_mix(ch.color_matrix, stacked, ch.K);
}

std::vector<double> apply_post(const CrosstalkChannel& ch, std::span<const double> received) {
    return apply_color_mix(ch.post, received, ch.K);
}

}  // namespace vlc
