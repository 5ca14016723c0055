#include <cmath>
#include <random>

#include "doctest.h"
#include "vlc/basis.hpp"

using namespace vlc;

TEST_CASE("grid times and first row") {
    const SampleGrid g = build_grid(2, 1.0, 2);
    REQUIRE(g.samples() == 9);
    for (std::size_t n = 0; n < 9; ++n) CHECK(g.times[n] == doctest::Approx(n / 8.0));
    const double r2 = std::sqrt(2.0);
    const double expect[] = {1.0, r2, 0.0, r2, 0.0};
    for (int j = 0; j < 5; ++j) CHECK(g.eval(0, j) == doctest::Approx(expect[j]));
}

TEST_CASE("K=1 row at half period") {
    const SampleGrid g = build_grid(1, 1.0, 1);
    REQUIRE(g.samples() == 3);
    CHECK(g.times[1] == doctest::Approx(0.5));
    CHECK(g.eval(1, 0) == doctest::Approx(1.0));
    CHECK(g.eval(1, 1) == doctest::Approx(-std::sqrt(2.0)));
    CHECK(g.eval(1, 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("K=0 grid is a single DC sample") {
    const SampleGrid g = build_grid(0, 4.0, 3);
    REQUIRE(g.samples() == 1);
    REQUIRE(g.block() == 1);
    CHECK(g.eval(0, 0) == doctest::Approx(0.5));
    CHECK_THROWS(build_grid(1, 1.0, 0));
}

TEST_CASE("synthesis of simple points") {
    const SampleGrid g = build_grid(1, 1.0, 4);
    const double pt[] = {10.0, 1.0, 0.0};
    const auto w = synthesize_waveform(pt, Color::red, g);
    CHECK(w[0] == doctest::Approx(10.0 + std::sqrt(2.0)));
    const double dc_only[] = {3.0, 0.0, 0.0};
    for (double v : synthesize_waveform(dc_only, Color::red, g)) CHECK(v == doctest::Approx(3.0));
    const double zero[9] = {};
    for (double v : synthesize_waveform(zero, Color::blue, g)) CHECK(v == 0.0);
    const double bad[4] = {};
    CHECK_THROWS(synthesize_waveform(bad, Color::red, g));
}

TEST_CASE("joint synthesis picks the requested color block") {
    const SampleGrid g = build_grid(1, 1.0, 2);
    const double pt[] = {1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0};
    CHECK(synthesize_waveform(pt, Color::green, g)[2] == doctest::Approx(2.0));
    CHECK(synthesize_waveform(pt, Color::blue, g)[2] == doctest::Approx(3.0));
}

TEST_CASE("dc_expectation") {
    const double a[] = {6.67, 1.0, -2.0, 6.67, 0.5, 0.5, 6.67, 3.0, 1.0};
    const Vec3 e = dc_expectation(a, 1.0);
    for (double v : e) CHECK(v == doctest::Approx(6.67));
    const double b[] = {2.0, 0.0, 0.0};
    const Vec3 f = dc_expectation(b, 4.0);
    CHECK(f[0] == doctest::Approx(1.0));
    CHECK(f[1] == 0.0);
    const double z[9] = {};
    for (double v : dc_expectation(z, 1.0)) CHECK(v == 0.0);
}

namespace {

// Composite trapezoid over [0, Ts] with `nodes` intervals.
template <class F>
double trapezoid(F f, double Ts, int nodes) {
    double s = 0.5 * (f(0.0) + f(Ts));
    for (int k = 1; k < nodes; ++k) s += f(Ts * k / nodes);
    return s * Ts / nodes;
}

}  // namespace

TEST_CASE("basis is orthonormal under dense quadrature") {
    for (double Ts : {1.0, 2.5}) {
        const int K = 3;
        for (int a = 0; a <= 2 * K; ++a) {
            for (int b = 0; b <= 2 * K; ++b) {
                const double ip = trapezoid([&](double t) { return basis_value(a, t, Ts) * basis_value(b, t, Ts); }, Ts, 20000);
                CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-6).scale(1.0));
            }
        }
    }
}

TEST_CASE("Parseval and time average on random color blocks") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const double Ts = 1.7;
    const int K = 2;
    const SampleGrid dense = build_grid(K, Ts, 5000);
    for (int trial = 0; trial < 5; ++trial) {
        double c[5];
        double energy = 0.0;
        for (double& v : c) {
            v = u(rng);
            energy += v * v;
        }
        const auto w = synthesize_waveform(c, Color::red, dense);
        const std::size_t N = w.size() - 1;
        double sq = 0.0;
        double mean = 0.0;
        for (std::size_t n = 0; n < N; ++n) {  // periodic: drop the duplicate endpoint
            sq += w[n] * w[n];
            mean += w[n];
        }
        sq /= static_cast<double>(N);
        mean /= static_cast<double>(N);
        CHECK(sq == doctest::Approx(energy / Ts).epsilon(1e-6));
        const double pt[15] = {c[0], c[1], c[2], c[3], c[4]};
        CHECK(mean == doctest::Approx(dc_expectation(pt, Ts)[0]).epsilon(1e-6));
    }
}
