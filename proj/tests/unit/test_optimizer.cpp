#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "vlc/constraints.hpp"
#include "vlc/optimizer.hpp"

using namespace vlc;

namespace {

DesignSpec small_spec(int K, int Nc, int restarts = 4) {
    DesignSpec s;
    s.K = K;
    s.Nc = Nc;
    s.restarts = restarts;
    s.rng_seed = 11;
    return validate_spec(s);
}

double worst_row(const std::vector<AffineRow>& rows, std::span<const double> s) {
    double w = 0.0;
    for (const auto& r : rows) w = std::max(w, r.violation(s));
    return w;
}

}  // namespace

TEST_CASE("restart streams are deterministic and distinct") {
    auto a = restart_rng(5, 0);
    auto b = restart_rng(5, 0);
    auto c = restart_rng(5, 1);
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
}

TEST_CASE("random starts are feasible at the reference parameters") {
    const DesignSpec spec = small_spec(2, 64);
    const SampleGrid grid = build_grid(spec.K, spec.Ts, spec.No);
    for (double eps : {0.0, 0.1}) {
        const Mat3 P = eps > 0.0 ? build_channel(eps, spec.K).precoder : identity3();
        const Geometry g = joint_geometry(spec, P);
        const auto power = power_color_rows(g);
        const auto range = dynamic_range_rows(g, grid);
        const ScaSettings st = sca_settings(spec);
        int ok = 0;
        const int draws = eps > 0.0 ? 200 : 1000;
        for (int r = 0; r < draws; ++r) {
            auto rng = restart_rng(99, static_cast<std::uint64_t>(r));
            const auto s = random_feasible_init(g, grid, st, rng);
            if (worst_row(power, s) < 1e-9 && worst_row(range, s) == 0.0) ++ok;
        }
        CHECK(ok == draws);
    }
}

TEST_CASE("random starts respect PAPR bounds in PAPR modes") {
    DesignSpec spec = small_spec(2, 16);
    const SampleGrid grid = build_grid(spec.K, spec.Ts, spec.No);
    const Geometry g = joint_geometry(spec, identity3());
    for (ConstraintMode mode : {ConstraintMode::l_papr, ConstraintMode::i_papr}) {
        spec.constraint_mode = mode;
        const ScaSettings st = sca_settings(spec);
        for (int r = 0; r < 50; ++r) {
            auto rng = restart_rng(3, static_cast<std::uint64_t>(r));
            const auto s = random_feasible_init(g, grid, st, rng);
            const PaprReport m = measure_papr(g, grid, s);
            for (int x = 0; x < 3; ++x) {
                if (mode == ConstraintMode::l_papr) CHECK(m.long_term[x] <= 4.0);
                if (mode == ConstraintMode::i_papr)
                    for (const auto& p : m.individual) CHECK(p[x] <= 4.0);
            }
        }
    }
}

TEST_CASE("interval packing oracle: two points in [0, 80] around 20") {
    DesignSpec spec;
    spec.K = 0;
    spec.Nc = 2;
    spec.s_avg = {1.0, 0.0, 0.0};
    spec.restarts = 3;
    const DesignResult r = design_single_color(spec, Color::red, 2);
    CHECK(r.d_min == doctest::Approx(40.0).epsilon(1e-8));
    auto pts = std::vector<double>(r.constellation.stacked().begin(), r.constellation.stacked().end());
    std::sort(pts.begin(), pts.end());
    CHECK(pts[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    CHECK(pts[1] == doctest::Approx(40.0).epsilon(1e-8));
}

TEST_CASE("identical starting points separate after one step") {
    const DesignSpec spec = small_spec(1, 4);
    const SampleGrid grid = build_grid(spec.K, spec.Ts, spec.No);
    const Geometry g = joint_geometry(spec, identity3());
    std::vector<double> s0(g.num_coeffs(), 0.0);
    for (int i = 0; i < 4; ++i)
        for (int x = 0; x < 3; ++x) s0[static_cast<std::size_t>(i * 9 + x * 3)] = g.power[x];
    ScaSettings st = sca_settings(spec);
    st.max_iter = 1;
    const ScaOutcome out = sca_optimize(g, grid, st, s0);
    CHECK(out.trace.d_min.front() == 0.0);
    CHECK(out.d_min > 0.0);
}

TEST_CASE("SCA traces are monotone and iterates stay feasible") {
    const DesignSpec spec = small_spec(1, 8);
    const SampleGrid grid = build_grid(spec.K, spec.Ts, spec.No);
    const Geometry g = joint_geometry(spec, identity3());
    const auto power = power_color_rows(g);
    const auto range = dynamic_range_rows(g, grid);
    const ScaSettings st = sca_settings(spec);
    for (int r = 0; r < 5; ++r) {
        auto rng = restart_rng(1, static_cast<std::uint64_t>(r));
        const ScaOutcome out = sca_optimize(g, grid, st, random_feasible_init(g, grid, st, rng));
        for (std::size_t k = 1; k < out.trace.d_min.size(); ++k) CHECK(out.trace.d_min[k] >= out.trace.d_min[k - 1]);
        CHECK(out.d_min == doctest::Approx(out.trace.d_min.back()));
        auto c = Constellation::from_stacked(ConstellationMode::joint, Color::red, 1, 8, out.stacked);
        CHECK(out.d_min == doctest::Approx(min_distance(c)).epsilon(1e-12));
        CHECK(worst_row(power, out.stacked) < 1e-7);
        CHECK(worst_row(range, out.stacked) < 1e-7);
    }
}

TEST_CASE("post DC compensation") {
    DesignSpec spec = small_spec(1, 2);
    const Geometry g = joint_geometry(spec, identity3());
    const SampleGrid fine = build_grid(1, spec.Ts, 80);
    std::vector<double> s(g.num_coeffs(), 0.0);
    for (int i = 0; i < 2; ++i)
        for (int x = 0; x < 3; ++x) s[static_cast<std::size_t>(i * 9 + x * 3)] = 5.0 + i;
    auto same = s;
    const Vec3 none = post_dc_compensation(g, fine, same);
    CHECK(none == Vec3{0.0, 0.0, 0.0});
    CHECK(same == s);

    // Blue of point 1: 1 + sqrt(2)*a*cos(2 pi t) dips to 1 - sqrt(2) a.
    s[2 * 3 + 0] = 1.0;
    s[2 * 3 + 1] = (1.0 + 0.3) / std::sqrt(2.0);
    auto shifted = s;
    const Vec3 bias = post_dc_compensation(g, fine, shifted);
    CHECK(bias[0] == 0.0);
    CHECK(bias[1] == 0.0);
    CHECK(bias[2] == doctest::Approx(0.3));
    CHECK(shifted[6] == doctest::Approx(1.3));
    CHECK(shifted[9 + 6] == doctest::Approx(6.3));
    auto before = Constellation::from_stacked(ConstellationMode::joint, Color::red, 1, 2, s);
    auto after = Constellation::from_stacked(ConstellationMode::joint, Color::red, 1, 2, shifted);
    CHECK(min_distance(before) == doctest::Approx(min_distance(after)).epsilon(1e-14));
}

TEST_CASE("joint design bookkeeping and reproducibility") {
    const DesignSpec spec = small_spec(1, 8);
    const DesignResult a = design_joint(spec);
    const DesignResult b = design_joint(spec);
    CHECK(a.restart_scores.size() == 4);
    CHECK(a.d_min == *std::max_element(a.restart_scores.begin(), a.restart_scores.end()));
    CHECK(a.d_min == doctest::Approx(min_distance(a.constellation)).epsilon(1e-8));
    CHECK(a.restart_scores == b.restart_scores);
    CHECK(std::equal(a.constellation.stacked().begin(), a.constellation.stacked().end(), b.constellation.stacked().begin()));
    CHECK(a.failures.empty());
}

TEST_CASE("precoded design satisfies the precoded rows") {
    DesignSpec spec = small_spec(1, 8);
    spec.epsilon = 0.1;
    const DesignResult r = design_joint(spec);
    const Geometry g = joint_geometry(spec, build_channel(0.1, 1).precoder);
    const SampleGrid fine = build_grid(1, spec.Ts, 20 * spec.No);
    for (int i = 0; i < 8; ++i)
        for (int x = 0; x < 3; ++x) {
            const auto w = transmit_waveform(g, fine, r.constellation.stacked(), i, x);
            CHECK(*std::min_element(w.begin(), w.end()) >= -1e-9);
        }
    // Mean transmitted intensity moves only by the recorded deviation.
    const auto rows = power_color_rows(g);
    for (int x = 0; x < 3; ++x)
        CHECK(rows[x].lhs(r.constellation.stacked()) == doctest::Approx(rows[x].rhs + r.power_deviation[x]).epsilon(1e-9));
}

TEST_CASE("PAPR modes end within the bound") {
    for (ConstraintMode mode : {ConstraintMode::l_papr, ConstraintMode::i_papr}) {
        DesignSpec spec = small_spec(1, 8, 2);
        spec.constraint_mode = mode;
        const DesignResult r = design_joint(spec);
        for (int x = 0; x < 3; ++x) {
            if (mode == ConstraintMode::l_papr) CHECK(r.papr.long_term[x] <= 4.0 * (1.0 + 1e-9));
            if (mode == ConstraintMode::i_papr)
                for (const auto& p : r.papr.individual) CHECK(p[x] <= 4.0 * (1.0 + 1e-9));
        }
        CHECK(r.d_min > 0.0);
    }
}

TEST_CASE("decoupled design: shape, errors and scaling") {
    DesignSpec spec = small_spec(1, 64, 6);
    const auto r = design_decoupled(spec);
    for (const auto& c : r) {
        CHECK(c.constellation.size() == 4);
        CHECK(c.constellation.dimension() == 3);
        CHECK(c.d_min > 0.0);
    }
    CHECK(r[0].d_min == doctest::Approx(r[1].d_min).epsilon(0.02));

    DesignSpec odd = small_spec(1, 32);
    CHECK_THROWS_AS(design_decoupled(odd), SpecError);
    DesignSpec eps = small_spec(1, 64);
    eps.epsilon = 0.1;
    CHECK_THROWS_AS(design_decoupled(eps), SpecError);

    // Without an upper bound the feasible set is a cone: doubling the power
    // doubles the distance.
    DesignSpec a = small_spec(1, 8, 8);
    a.I_U = 1e6;
    DesignSpec b = a;
    b.Po = 40.0;
    const double da = design_single_color(a, Color::red, 8).d_min;
    const double db = design_single_color(b, Color::red, 8).d_min;
    CHECK(db / da == doctest::Approx(2.0).epsilon(0.02));
}
