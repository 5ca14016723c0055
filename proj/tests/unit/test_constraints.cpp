#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "vlc/constraints.hpp"

using namespace vlc;

namespace {

Geometry small_joint(int K, int Nc, const Mat3& precoder = identity3()) {
    DesignSpec s;
    s.K = K;
    s.Nc = Nc;
    return joint_geometry(validate_spec(s), precoder);
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -5.0, double hi = 5.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

// Value of the row's affine part with the extra variable at `extra`.
double row_value(const AffineRow& row, std::span<const double> s, std::size_t extra_index, double extra) {
    std::vector<double> x(s.begin(), s.end());
    x.resize(std::max(x.size(), extra_index + 1), 0.0);
    x[extra_index] = extra;
    return row.lhs(x);
}

}  // namespace

TEST_CASE("pair_index examples and bijection") {
    CHECK(pair_index(1, 2, 4) == 1);
    CHECK(pair_index(3, 4, 4) == 6);
    std::set<std::size_t> seen;
    for (int p = 1; p <= 8; ++p)
        for (int q = p + 1; q <= 8; ++q) {
            const std::size_t l = pair_index(p, q, 8);
            seen.insert(l);
            CHECK(pair_from_index(l, 8) == std::pair<int, int>{p, q});
        }
    CHECK(seen.size() == 28);
    CHECK(*seen.begin() == 1);
    CHECK(*seen.rbegin() == 28);
    CHECK_THROWS(pair_index(2, 2, 4));
    CHECK_THROWS(pair_index(3, 2, 4));
}

TEST_CASE("pair_distance_sq") {
    const double same[] = {1.0, 2.0, 1.0, 2.0};
    CHECK(pair_distance_sq(same, 2, 0, 1) == 0.0);
    const double tri[] = {0.0, 0.0, 3.0, 4.0};
    CHECK(pair_distance_sq(tri, 2, 0, 1) == doctest::Approx(25.0));
    std::mt19937_64 rng(1);
    const int D = 7;
    const int Nc = 9;
    const auto s = random_vector(static_cast<std::size_t>(D * Nc), rng);
    for (int p = 0; p < Nc; ++p)
        for (int q = 0; q < Nc; ++q) {
            double ref = 0.0;
            for (int d = 0; d < D; ++d) ref += (s[p * D + d] - s[q * D + d]) * (s[p * D + d] - s[q * D + d]);
            CHECK(pair_distance_sq(s, D, p, q) == doctest::Approx(ref).epsilon(1e-13));
        }
}

TEST_CASE("distance linearization is tangent and underestimates") {
    std::mt19937_64 rng(2);
    const int D = 5;
    const int Nc = 4;
    const std::size_t n = static_cast<std::size_t>(D * Nc);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto s0 = random_vector(n, rng);
        const auto s = random_vector(n, rng);
        const int p = trial % Nc;
        const int q = (p + 1 + trial / Nc % (Nc - 1)) % Nc;
        if (p == q) continue;
        const AffineRow row = linearize_distance(s0, D, std::min(p, q), std::max(p, q), static_cast<std::uint32_t>(n));
        // Affine value = lhs(s, t=0) - rhs.
        const double at_s0 = row_value(row, s0, n, 0.0) - row.rhs;
        CHECK(at_s0 == doctest::Approx(pair_distance_sq(s0, D, p, q)).epsilon(1e-12));
        const double at_s = row_value(row, s, n, 0.0) - row.rhs;
        CHECK(at_s <= pair_distance_sq(s, D, p, q) + 1e-9);
    }
}

TEST_CASE("coincident points give a row that only bounds t") {
    std::vector<double> s0 = {1.0, 2.0, 1.0, 2.0};
    const AffineRow row = linearize_distance(s0, 2, 0, 1, 4);
    for (std::size_t k = 0; k < row.index.size(); ++k)
        if (row.index[k] < 4) CHECK(row.value[k] == 0.0);
    CHECK(row.rhs == 0.0);
}

TEST_CASE("power rows: two-point average and construction") {
    DesignSpec spec;
    spec.K = 1;
    spec.Nc = 2;
    const Geometry g = joint_geometry(validate_spec(spec), identity3());
    const auto rows = power_color_rows(g);
    REQUIRE(rows.size() == 3);
    // Red row: (dc_{R,1} + dc_{R,2}) / 2 = 20/3.
    const auto dense = rows[0].dense(g.num_coeffs());
    CHECK(dense[0] == doctest::Approx(0.5));
    CHECK(dense[9] == doctest::Approx(0.5));
    CHECK(rows[0].rhs == doctest::Approx(20.0 / 3.0));

    std::mt19937_64 rng(4);
    auto s = random_vector(g.num_coeffs(), rng);
    for (int i = 0; i < 2; ++i)
        for (int x = 0; x < 3; ++x) s[static_cast<std::size_t>(i * 9 + x * 3)] = g.power[x] * std::sqrt(g.Ts);
    for (const auto& r : rows) CHECK(r.violation(s) < 1e-13);

    Mat3 P = identity3();
    P[1][2] = 0.3;
    P[2][1] = -0.2;
    const auto precoded = power_color_rows(small_joint(1, 2, P));
    double worst = 0.0;
    for (const auto& r : precoded) worst = std::max(worst, r.violation(s));
    CHECK(worst > 1e-3);
}

TEST_CASE("dynamic range row count and meaning") {
    const Geometry g = small_joint(2, 64);
    const SampleGrid grid = build_grid(2, 1.0, 4);
    CHECK(dynamic_range_rows(g, grid).size() == 6528);
    CHECK(dynamic_range_rows(g, grid, false).size() == 3264);

    const Geometry g2 = small_joint(1, 2);
    const SampleGrid grid2 = build_grid(1, 1.0, 4);
    const auto rows = dynamic_range_rows(g2, grid2);
    std::mt19937_64 rng(6);
    const auto s = random_vector(g2.num_coeffs(), rng);
    // Row values coincide with direct waveform samples, lower row then upper row.
    std::size_t r = 0;
    for (int i = 0; i < 2; ++i)
        for (int x = 0; x < 3; ++x) {
            const auto w = transmit_waveform(g2, grid2, s, i, x);
            for (std::size_t n = 0; n < grid2.samples(); ++n) {
                CHECK(rows[r].sense == Sense::greater_equal);
                CHECK(rows[r].lhs(s) == doctest::Approx(w[n]));
                CHECK(rows[r + 1].sense == Sense::less_equal);
                CHECK(rows[r + 1].rhs == 80.0);
                r += 2;
            }
        }
}

TEST_CASE("constant waveform rows reduce to the DC bound") {
    const Geometry g = small_joint(1, 2);
    const SampleGrid grid = build_grid(1, 1.0, 3);
    std::vector<double> s(g.num_coeffs(), 0.0);
    for (int i = 0; i < 2; ++i)
        for (int x = 0; x < 3; ++x) s[static_cast<std::size_t>(i * 9 + x * 3)] = 7.0;
    for (const auto& row : dynamic_range_rows(g, grid)) CHECK(row.lhs(s) == doctest::Approx(7.0));
}

TEST_CASE("L-PAPR rows at the tangent point") {
    const Geometry g = small_joint(1, 4);
    const SampleGrid grid = build_grid(1, 1.0, 4);
    std::mt19937_64 rng(7);
    const auto s0 = random_vector(g.num_coeffs(), rng, 0.5, 3.0);
    const Vec3 beta{4.0, 5.0, 6.0};
    const auto aux = static_cast<std::uint32_t>(g.num_coeffs());
    const auto rows = lpapr_rows(g, grid, s0, beta, aux);
    REQUIRE(rows.size() == 1 + 3 * 4 * grid.samples());
    double s0n = 0.0;
    for (double v : s0) s0n += v * v;
    s0n = std::sqrt(s0n);
    // The anchor fixes r = |s0| at s = s0.
    CHECK(row_value(rows[0], s0, aux, s0n) == doctest::Approx(0.0).scale(1.0));
    std::size_t k = 1;
    for (int i = 0; i < 4; ++i)
        for (int x = 0; x < 3; ++x) {
            const auto w = transmit_waveform(g, grid, s0, i, x);
            for (std::size_t n = 0; n < grid.samples(); ++n, ++k)
                CHECK(row_value(rows[k], s0, aux, s0n) == doctest::Approx(w[n] - std::sqrt(beta[x] / 4.0) * s0n));
        }
    CHECK_THROWS(lpapr_rows(g, grid, std::vector<double>(g.num_coeffs(), 0.0), beta, aux));
}

TEST_CASE("L-PAPR linearization is conservative on sampled points") {
    const Geometry g = small_joint(1, 4);
    const SampleGrid grid = build_grid(1, 1.0, 4);
    std::mt19937_64 rng(8);
    const Vec3 beta{4.0, 4.0, 4.0};
    const auto aux = static_cast<std::uint32_t>(g.num_coeffs());
    int feasible = 0;
    for (int draw = 0; draw < 1000; ++draw) {
        const auto s0 = random_vector(g.num_coeffs(), rng, 1.0, 3.0);
        auto s = s0;
        std::normal_distribution<double> step(0.0, 0.3);
        for (double& v : s) v += step(rng);
        const auto rows = lpapr_rows(g, grid, s0, beta, aux);
        std::vector<double> x = s;
        double r = 0.0;
        double s0n = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            r += s0[k] * s[k];
            s0n += s0[k] * s0[k];
        }
        x.push_back(r / std::sqrt(s0n));
        bool ok = true;
        for (const auto& row : rows) ok = ok && row.violation(x) <= 1e-12;
        if (!ok) continue;
        ++feasible;
        const PaprReport m = measure_papr(g, grid, s);
        for (int c = 0; c < 3; ++c) CHECK(m.long_term[c] <= beta[c] * (1.0 + 1e-9));
    }
    CHECK(feasible > 0);
}

TEST_CASE("L-PAPR rows never bind for huge beta") {
    const Geometry g = small_joint(1, 2);
    const SampleGrid grid = build_grid(1, 1.0, 2);
    std::mt19937_64 rng(9);
    const auto s0 = random_vector(g.num_coeffs(), rng, 1.0, 2.0);
    const auto aux = static_cast<std::uint32_t>(g.num_coeffs());
    const auto rows = lpapr_rows(g, grid, s0, Vec3{1e12, 1e12, 1e12}, aux);
    const auto s = random_vector(g.num_coeffs(), rng, 0.0, 10.0);
    std::vector<double> x = s;
    double r = 0.0, n0 = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        r += s0[k] * s[k];
        n0 += s0[k] * s0[k];
    }
    x.push_back(r / std::sqrt(n0));
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].violation(x) == 0.0);
}

TEST_CASE("I-PAPR measurement and rows") {
    DesignSpec spec;
    spec.K = 1;
    spec.Nc = 2;
    const Geometry g = joint_geometry(validate_spec(spec), identity3());
    const SampleGrid grid = build_grid(1, 1.0, 4);
    // DC-only point in one color: Phi = 1.
    std::vector<double> s(g.num_coeffs(), 0.0);
    s[0] = 5.0;
    s[9] = 3.0;
    const PaprReport dc = measure_papr(g, grid, s);
    CHECK(dc.individual[0][0] == doctest::Approx(1.0));
    CHECK(dc.individual[1][0] == doctest::Approx(1.0));

    std::mt19937_64 rng(10);
    const auto s0 = random_vector(g.num_coeffs(), rng, 0.5, 3.0);
    const PaprReport m = measure_papr(g, grid, s0);
    // beta equal to the measured value makes s0 feasible and tight at its peak.
    std::vector<Vec3> beta(2);
    for (int i = 0; i < 2; ++i)
        for (int x = 0; x < 3; ++x) beta[i][x] = m.individual[i][x];
    const auto rows = ipapr_rows(g, grid, s0, beta);
    double worst = -1e300;
    for (const auto& row : rows) worst = std::max(worst, row.lhs(s0));
    CHECK(worst == doctest::Approx(0.0).scale(10.0));
    for (const auto& row : rows) CHECK(row.violation(s0) < 1e-9);

    // Scale invariance of the individual ratio.
    auto scaled = s0;
    for (int k = 0; k < 9; ++k) scaled[static_cast<std::size_t>(k)] *= 3.5;
    const PaprReport ms = measure_papr(g, grid, scaled);
    for (int x = 0; x < 3; ++x) CHECK(ms.individual[0][x] == doctest::Approx(m.individual[0][x]));

    CHECK_THROWS(ipapr_rows(g, grid, std::vector<double>(g.num_coeffs(), 0.0), std::vector<Vec3>{Vec3{4, 4, 4}}));
}

TEST_CASE("PAPR of the two-point interval constellation") {
    DesignSpec spec;
    spec.K = 0;
    spec.Nc = 2;
    spec.s_avg = {1.0, 0.0, 0.0};
    const Geometry g = color_geometry(validate_spec(spec), Color::red, 2);
    const SampleGrid grid = build_grid(0, 1.0, 1);
    const std::vector<double> s{0.0, 40.0};
    CHECK(measure_papr(g, grid, s).long_term[0] == doctest::Approx(2.0));
    CHECK_THROWS(measure_papr(g, grid, std::vector<double>{0.0, 0.0}));
}

TEST_CASE("long-term and individual PAPR are consistent") {
    const Geometry g = small_joint(2, 8);
    const SampleGrid grid = build_grid(2, 1.0, 4);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_vector(g.num_coeffs(), rng, 0.1, 4.0);
        const PaprReport m = measure_papr(g, grid, s);
        double total = 0.0;
        std::vector<double> energy(8, 0.0);
        for (int i = 0; i < 8; ++i)
            for (int d = 0; d < 15; ++d) energy[i] += s[i * 15 + d] * s[i * 15 + d];
        for (double e : energy) total += e;
        for (int x = 0; x < 3; ++x) {
            double peak2 = 0.0;
            for (int i = 0; i < 8; ++i) peak2 = std::max(peak2, m.individual[i][x] * energy[i]);
            CHECK(m.long_term[x] == doctest::Approx(8.0 * peak2 / total).epsilon(1e-10));
        }
    }
}
