#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "vlc/channel.hpp"

using namespace vlc;

namespace {

DenseMatrix lift(const Mat3& m, int K) {
    CrosstalkChannel tmp;
    tmp.K = K;
    tmp.color_matrix = m;
    return tmp.full_matrix();
}

DenseMatrix product(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
}

double max_identity_error(const DenseMatrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

}  // namespace

TEST_CASE("no cross-talk is the identity") {
    const auto ch = build_channel(0.0, 2);
    const DenseMatrix h = ch.full_matrix();
    CHECK(max_identity_error(h) == 0.0);
    CHECK(max_identity_error(lift(ch.precoder, 2)) < 1e-15);
    CHECK(max_identity_error(lift(ch.post, 2)) < 1e-15);
    std::vector<double> s(30);
    std::iota(s.begin(), s.end(), 1.0);
    CHECK(apply_post(ch, apply_channel(ch, apply_precoder(ch, s))) == s);
}

TEST_CASE("color matrix at epsilon 0.1") {
    const auto ch = build_channel(0.1, 1);
    CHECK(ch.color_matrix[0] == std::array<double, 3>{1.0, 0.0, 0.0});
    CHECK(ch.color_matrix[1][1] == doctest::Approx(0.8));
    CHECK(ch.color_matrix[1][2] == doctest::Approx(0.1));
    CHECK(ch.color_matrix[2][1] == doctest::Approx(0.1));
    CHECK(ch.color_matrix[2][2] == doctest::Approx(0.8));
    // Green/blue block eigenvalues (1-2e) +- e.
    Vec3 sv = ch.singular;
    std::sort(sv.begin(), sv.end());
    CHECK(sv[0] == doctest::Approx(0.7));
    CHECK(sv[1] == doctest::Approx(0.9));
    CHECK(sv[2] == doctest::Approx(1.0));
}

TEST_CASE("equalizer identity and closed-form singular values") {
    for (double eps : {0.05, 0.1, 0.2, 0.3}) {
        for (int K : {0, 2, 3}) {
            const auto ch = build_channel(eps, K);
            const DenseMatrix ut = lift(ch.post, K);
            const DenseMatrix h = ch.full_matrix();
            const DenseMatrix p = lift(ch.precoder, K);
            CHECK(max_identity_error(product(product(ut, h), p)) < 1e-10);
            // U^T has orthonormal rows, so white noise stays white.
            DenseMatrix u = lift(ch.u, K);
            CHECK(max_identity_error(product(ut, u)) < 1e-12);
        }
        const auto ch = build_channel(eps, 1);
        Vec3 got = ch.singular;
        Vec3 want{1.0, 1.0 - eps, 1.0 - 3.0 * eps};
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        for (int k = 0; k < 3; ++k) CHECK(std::abs(got[k] - want[k]) < 1e-10);
    }
}

TEST_CASE("right singular vectors follow the sign convention") {
    for (double eps : {0.0, 0.05, 0.2}) {
        const auto ch = build_channel(eps, 1);
        for (int c = 0; c < 3; ++c) {
            int first = 0;
            while (first < 2 && std::abs(ch.v[first][c]) < 1e-12) ++first;
            CHECK(ch.v[first][c] > 0.0);
        }
    }
}

TEST_CASE("precode, mix and post-equalize round trip") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0.0, 10.0);
    const int K = 2;
    const auto ch = build_channel(0.2, K);
    std::vector<double> s(static_cast<std::size_t>(15 * 8));
    for (double& v : s) v = g(rng);
    const auto back = apply_post(ch, apply_channel(ch, apply_precoder(ch, s)));
    double worst = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) worst = std::max(worst, std::abs(back[k] - s[k]));
    CHECK(worst < 1e-9);
}

TEST_CASE("red passes the channel unchanged") {
    const auto ch = build_channel(0.25, 1);
    std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const auto y = apply_channel(ch, s);
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 2.0);
    CHECK(y[2] == 3.0);
}

TEST_CASE("channel argument checks") {
    CHECK_THROWS(build_channel(1.0 / 3.0, 2));
    CHECK_THROWS(build_channel(-0.1, 2));
    const auto ch = build_channel(0.1, 1);
    CHECK_THROWS(apply_precoder(ch, std::vector<double>(10, 0.0)));
    Mat3 singular{};
    CHECK_THROWS(inverse(singular));
}
