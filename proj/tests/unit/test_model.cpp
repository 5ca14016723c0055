#include <random>

#include "doctest.h"
#include "vlc/model.hpp"

using namespace vlc;

TEST_CASE("validate_spec accepts the reference scenario and fills derived sizes") {
    DesignSpec s;
    s.K = 2;
    s.Nc = 64;
    const DesignSpec v = validate_spec(s);
    CHECK(v.D == 15);
    CHECK(v.Nb == 6);
    CHECK(v.N == 16);
}

TEST_CASE("validate_spec names the violated field") {
    DesignSpec s;
    s.s_avg = {0.5, 0.5, 0.5};
    try {
        (void)validate_spec(s);
        FAIL("expected SpecError");
    } catch (const SpecError& e) {
        CHECK(e.field() == "s_avg");
        CHECK(std::string(e.what()).find("1.5") != std::string::npos);
    }
    s = DesignSpec{};
    s.Nc = 48;
    CHECK_THROWS_AS((void)validate_spec(s), SpecError);
    s = DesignSpec{};
    s.Po = 90.0;
    CHECK_THROWS_AS((void)validate_spec(s), SpecError);
    s = DesignSpec{};
    s.epsilon = 0.34;
    CHECK_THROWS_AS((void)validate_spec(s), SpecError);
}

TEST_CASE("points and stacked views round-trip") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int K : {0, 1, 2, 3}) {
        for (int Nc : {2, 4, 16}) {
            const int D = 3 * (2 * K + 1);
            DenseMatrix pts(static_cast<std::size_t>(D), static_cast<std::size_t>(Nc));
            for (auto& v : pts.data()) v = u(rng);
            const auto c = Constellation::from_points(ConstellationMode::joint, Color::red, K, pts);
            const DenseMatrix back = c.points();
            for (std::size_t k = 0; k < pts.data().size(); ++k) CHECK(back.data()[k] == pts.data()[k]);
            // Stacked is column-major over the D x Nc matrix.
            for (int i = 0; i < Nc; ++i)
                for (int d = 0; d < D; ++d) CHECK(c.stacked()[static_cast<std::size_t>(i * D + d)] == pts(d, i));
        }
    }
}

TEST_CASE("color block DC index matches the stacked offset formula") {
    const int K = 2;
    const int Nc = 4;
    auto c = Constellation::joint(K, Nc);
    for (std::size_t k = 0; k < c.stacked().size(); ++k) c.stacked()[k] = static_cast<double>(k);
    const int D = 6 * K + 3;
    for (int i = 0; i < Nc; ++i) {
        for (int p = 0; p < 3; ++p) {
            const std::size_t expect = static_cast<std::size_t>(i * D + p * (2 * K + 1));
            CHECK(c.offset(i, p, 0) == expect);
            CHECK(c.color_block(i, p)[0] == static_cast<double>(expect));
        }
    }
}

TEST_CASE("min_distance is the brute-force minimum") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    auto c = Constellation::joint(1, 8);
    for (double& v : c.stacked()) v = g(rng);
    double best = 1e300;
    for (int p = 0; p < 8; ++p)
        for (int q = p + 1; q < 8; ++q) {
            double s = 0.0;
            for (int d = 0; d < c.dimension(); ++d) s += (c.point(p)[d] - c.point(q)[d]) * (c.point(p)[d] - c.point(q)[d]);
            best = std::min(best, std::sqrt(s));
        }
    CHECK(min_distance(c) == doctest::Approx(best).epsilon(1e-14));
}
