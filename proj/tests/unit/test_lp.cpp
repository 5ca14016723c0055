#include <random>
#include <sstream>

#include "../support/lp_oracle.hpp"
#include "doctest.h"
#include "vlc/lp.hpp"

using namespace vlc;
using namespace vlc::testing;

namespace {

AffineRow make_row(std::initializer_list<std::pair<std::uint32_t, double>> terms, Sense sense, double rhs) {
    AffineRow r;
    for (auto [i, v] : terms) r.add(i, v);
    r.sense = sense;
    r.rhs = rhs;
    return r;
}

LpProblem max_t_problem() {
    LpProblem p;
    p.num_vars = 1;
    p.objective = {1.0};
    p.rows.push_back(make_row({{0, 1.0}}, Sense::less_equal, 3.0));
    p.rows.push_back(make_row({{0, 1.0}}, Sense::less_equal, 5.0));
    return p;
}

LpProblem two_var_problem() {
    LpProblem p;
    p.num_vars = 2;
    p.objective = {1.0, 1.0};
    p.rows.push_back(make_row({{0, 1.0}, {1, 2.0}}, Sense::less_equal, 4.0));
    p.bounds = {{0.0, 3.0}, {0.0, 3.0}};
    return p;
}

const LpMethod kMethods[] = {LpMethod::simplex, LpMethod::interior_point};

}  // namespace

TEST_CASE("small worked examples with both methods") {
    for (LpMethod m : kMethods) {
        LpOptions o;
        o.method = m;
        const auto a = solve_lp(max_t_problem(), o);
        REQUIRE(a.status == LpStatus::optimal);
        CHECK(a.x[0] == doctest::Approx(3.0).epsilon(1e-7));

        const auto b = solve_lp(two_var_problem(), o);
        REQUIRE(b.status == LpStatus::optimal);
        CHECK(b.x[0] == doctest::Approx(3.0).epsilon(1e-7));
        CHECK(b.x[1] == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(b.objective_value == doctest::Approx(3.5).epsilon(1e-8));

        LpProblem bad;
        bad.num_vars = 1;
        bad.objective = {1.0};
        bad.rows.push_back(make_row({{0, 1.0}}, Sense::greater_equal, 1.0));
        bad.rows.push_back(make_row({{0, 1.0}}, Sense::less_equal, 0.0));
        CHECK(solve_lp(bad, o).status == LpStatus::infeasible);

        LpProblem open;
        open.num_vars = 2;
        open.objective = {1.0, 0.0};
        open.rows.push_back(make_row({{0, 1.0}, {1, -1.0}}, Sense::less_equal, 1.0));
        CHECK(solve_lp(open, o).status == LpStatus::unbounded);
    }
}

TEST_CASE("free variables and equality rows") {
    LpProblem p;
    p.num_vars = 3;
    p.objective = {0.0, 0.0, 1.0};
    // x0 + x1 = 2, t <= x0 - x1 + 4, t <= -x0 + x1 + 4 -> t* = 4.
    p.rows.push_back(make_row({{0, 1.0}, {1, 1.0}}, Sense::equal, 2.0));
    p.rows.push_back(make_row({{2, 1.0}, {0, -1.0}, {1, 1.0}}, Sense::less_equal, 4.0));
    p.rows.push_back(make_row({{2, 1.0}, {0, 1.0}, {1, -1.0}}, Sense::less_equal, 4.0));
    for (LpMethod m : kMethods) {
        LpOptions o;
        o.method = m;
        const auto s = solve_lp(p, o);
        REQUIRE(s.status == LpStatus::optimal);
        CHECK(s.objective_value == doctest::Approx(4.0).epsilon(1e-7));
        CHECK(max_violation(p, s.x) <= 1e-7);
    }
}

TEST_CASE("random small LPs agree with vertex enumeration") {
    std::mt19937_64 rng(20240611);
    int counts[3] = {0, 0, 0};
    for (int trial = 0; trial < 300; ++trial) {
        const LpProblem p = random_small_lp(rng);
        const OracleAnswer ref = lp_oracle(p);
        counts[static_cast<int>(ref.status)]++;
        LpOptions o;
        o.method = LpMethod::simplex;
        const LpSolution s = solve_lp(p, o);
        INFO("trial " << trial);
        switch (ref.status) {
            case OracleStatus::optimal:
                REQUIRE(s.status == LpStatus::optimal);
                CHECK(s.objective_value == doctest::Approx(ref.value).epsilon(1e-7).scale(1.0));
                CHECK(max_violation(p, s.x) <= 1e-7);
                break;
            case OracleStatus::infeasible:
                CHECK(s.status == LpStatus::infeasible);
                break;
            case OracleStatus::unbounded:
                CHECK(s.status == LpStatus::unbounded);
                break;
        }
    }
    MESSAGE("optimal " << counts[0] << ", infeasible " << counts[1] << ", unbounded " << counts[2]);
    CHECK(counts[0] > 50);
    CHECK(counts[1] > 10);
    CHECK(counts[2] > 10);
}

TEST_CASE("interior point matches the oracle on bounded feasible LPs") {
    std::mt19937_64 rng(77);
    int checked = 0;
    for (int trial = 0; trial < 300 && checked < 80; ++trial) {
        LpProblem p = random_small_lp(rng);
        for (auto& b : p.bounds)
            if (!std::isfinite(b.upper)) b.upper = b.lower + 8.0;
        const OracleAnswer ref = lp_oracle(p);
        if (ref.status != OracleStatus::optimal) continue;
        ++checked;
        LpOptions o;
        o.method = LpMethod::interior_point;
        const LpSolution s = solve_lp(p, o);
        INFO("trial " << trial);
        REQUIRE(s.status == LpStatus::optimal);
        CHECK(s.objective_value == doctest::Approx(ref.value).epsilon(1e-7).scale(1.0));
        CHECK(max_violation(p, s.x) <= 1e-7);
    }
    CHECK(checked >= 40);
}

TEST_CASE("solves are deterministic") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const LpProblem p = random_small_lp(rng);
        for (LpMethod m : kMethods) {
            LpOptions o;
            o.method = m;
            const auto a = solve_lp(p, o);
            const auto b = solve_lp(p, o);
            CHECK(a.status == b.status);
            CHECK(a.x == b.x);
        }
    }
}

TEST_CASE("invalid problems are rejected") {
    LpProblem p = max_t_problem();
    p.rows[0].index[0] = 7;
    CHECK_THROWS_AS(solve_lp(p), std::invalid_argument);
    LpProblem q = max_t_problem();
    q.objective.push_back(1.0);
    CHECK_THROWS_AS(solve_lp(q), std::invalid_argument);
}

TEST_CASE("CPLEX LP export") {
    std::ostringstream os;
    write_cplex_lp(two_var_problem(), os);
    const std::string text = os.str();
    CHECK(text.find("Maximize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find(" c0: + 1 x0 + 2 x1 <= 4") != std::string::npos);
    CHECK(text.find("0 <= x1 <= 3") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
}
