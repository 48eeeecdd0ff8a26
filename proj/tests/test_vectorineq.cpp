#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "ckn/errors.hpp"
#include "ckn/sampling.hpp"
#include "ckn/vectorineq.hpp"
#include "oracles.hpp"

using namespace ckn;
using V = std::vector<double>;

TEST_CASE("vectorineq: g_p closed values")
{
    const V x{1.0, -2.0, 0.5}, y{0.3, 4.0, -1.0};
    CHECK(g_p(x, x, 3.0) == 0.0);
    CHECK(g_p(x, y, 2.0) == doctest::Approx(0.7 * 0.7 + 36.0 + 2.25).epsilon(1e-14));
    CHECK(g_p(V{1.0, 0.0}, V{0.0, 0.0}, 3.0) == doctest::Approx(2.0));
    // X = 0 with p < 2 uses the limit of the middle term
    CHECK(g_p(V{0.0, 0.0}, V{3.0, 4.0}, 1.5) == doctest::Approx(std::pow(5.0, 1.5)));
    CHECK(g_p_scalar(1.0, 2.0, 3.0) == doctest::Approx(4.0));
}

TEST_CASE("vectorineq: near-diagonal g_p keeps relative accuracy")
{
    // g_2 = |Y - X|^2 exactly; check a p != 2 case against a long double
    // evaluation far from cancellation by scaling
    const double h = 1e-9;
    const double val = g_p_scalar(1.0, 1.0 + h, 3.0);
    // Taylor: p(p-1)/2 h^2 + p(p-1)(p-2)/6 h^3
    CHECK(val == doctest::Approx(3.0 * h * h).epsilon(1e-6));
}

TEST_CASE("vectorineq: z vector branches")
{
    const V x{1.0, 0.0}, s{2.0, 0.0};
    const V z = fz_z_vector(x, s, 1.5);
    CHECK(z[0] == doctest::Approx(9.0 / 16.0));
    CHECK(z[1] == 0.0);
    CHECK(fz_z_vector(s, x, 1.5) == s);
    CHECK(fz_z_vector(x, s, 3.0) == x);
    const V z3 = fz_z_vector(s, x, 3.0);
    CHECK(z3[0] == doctest::Approx(std::pow(0.5, 1.0) * 1.0));
}

TEST_CASE("vectorineq: Figalli-Zhang bound")
{
    const V x{1.0, 0.0}, y{1.0, 0.0}, zero{0.0, 0.0};
    CHECK(fz_lower_bound(x, y, 3.0, 0.5, 0.1) == doctest::Approx(0.25 * (3.0 + 3.0) + 0.1));
    CHECK(fz_lower_bound(x, zero, 1.5, 0.3, 0.7) == 0.0);
    CHECK(fz_lower_bound(x, zero, 3.0, 0.3, 0.7) == 0.0);
    // gamma = 1 leaves the power term only
    const V y2{0.5, 2.0};
    CHECK(fz_lower_bound(x, y2, 1.5, 1.0, 0.2) == doctest::Approx(0.2 * fz_power_term(x, y2, 1.5)));
    CHECK(fz_lower_bound(x, y2, 2.5, 1.0, 0.2) == doctest::Approx(0.2 * std::pow(std::hypot(0.5, 2.0), 2.5)));
}

TEST_CASE("vectorineq: lower-bound kernel")
{
    const V X{1.0, 0.0}, Y{3.0, 0.0};
    CHECK(cor_lower_bound_kernel(X, X, 1.5) == 0.0);
    CHECK(cor_lower_bound_kernel(V{0.0, 0.0}, V{3.0, 4.0}, 2.5) == doctest::Approx(std::pow(5.0, 2.5)));
    CHECK(cor_lower_bound_kernel(X, Y, 1.5) == doctest::Approx(std::pow(2.0, 1.5)));
}

TEST_CASE("vectorineq: rotation invariance and scaling covariance")
{
    const double th = 0.7;
    const double c = std::cos(th), s = std::sin(th);
    for (std::uint64_t i = 0; i < 200; ++i)
        for (double p : {1.1, 1.5, 2.5, 4.0}) {
            SampleRng rng(5, i);
            const V X{rng.normal(), rng.normal()}, Y{rng.normal(), rng.normal()};
            const V RX{c * X[0] - s * X[1], s * X[0] + c * X[1]};
            const V RY{c * Y[0] - s * Y[1], s * Y[0] + c * Y[1]};
            const double g = g_p(X, Y, p);
            CHECK(g_p(RX, RY, p) == doctest::Approx(g).epsilon(1e-12));
            CHECK(cor_lower_bound_kernel(RX, RY, p) == doctest::Approx(cor_lower_bound_kernel(X, Y, p)).epsilon(1e-12));
            const double t = 3.7;
            const V tX{t * X[0], t * X[1]}, tY{t * Y[0], t * Y[1]};
            CHECK(g_p(tX, tY, p) == doctest::Approx(std::pow(t, p) * g).epsilon(1e-12));
            CHECK(g >= 0.0);
        }
}

TEST_CASE("vectorineq: estimate_cp against the frozen reduced-scan oracle")
{
    const std::array<std::pair<double, double>, 6> cases{{{1.1, oracle::cp_1_1},
                                                          {1.5, oracle::cp_1_5},
                                                          {1.9, oracle::cp_1_9},
                                                          {2.5, oracle::cp_2_5},
                                                          {3.0, oracle::cp_3},
                                                          {4.0, oracle::cp_4}}};
    for (auto [p, ref] : cases) {
        const EmpiricalConstant c = estimate_cp(p, 20000, 11);
        CHECK(c.value > 0.0);
        CHECK(c.value <= 1.0);
        // a scan can only sit above the true infimum
        CHECK(c.value >= ref * (1 - 1e-9));
        CHECK(c.value == doctest::Approx(ref).epsilon(1e-6));
        CHECK(cp_ratio(c.witness.x, c.witness.y, p) == doctest::Approx(c.value).epsilon(1e-12));
    }
    CHECK(estimate_cp(2.0, 20000, 11).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(estimate_cp(2.0, 100, 1), InvalidArgument);
    CHECK_THROWS_AS(estimate_cp(1.0, 20000, 1), InvalidArgument);
}

TEST_CASE("vectorineq: estimate_cpg at gamma 1 matches estimate_cp")
{
    CHECK(estimate_cpg(1.5, 1.0, 20000, 3).value == doctest::Approx(estimate_cp(1.5, 20000, 3).value).epsilon(1e-9));
}

TEST_CASE("vectorineq: scans are independent of the worker count")
{
    const EmpiricalConstant a = estimate_cp(1.5, 20000, 9, Exec::serial());
    const EmpiricalConstant b = estimate_cp(1.5, 20000, 9, Exec::threads(4));
    CHECK(a.value == b.value);
    CHECK(a.witness.x == b.witness.x);
    const std::vector<double> gammas{0.5, 1.0};
    const auto s = scan_vector_inequalities(3.0, gammas, oracle::cp_3, 20000, 4, Exec::serial());
    const auto t = scan_vector_inequalities(3.0, gammas, oracle::cp_3, 20000, 4, Exec::threads(3));
    REQUIRE(s.size() == t.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i].checked == t[i].checked);
        CHECK(s[i].violations == t[i].violations);
        CHECK(s[i].worst_margin == t[i].worst_margin);
    }
}

TEST_CASE("vectorineq: violation scans come back clean")
{
    const std::vector<double> gammas{0.25, 0.5, 0.75, 1.0};
    for (double p : {1.5, 3.0}) {
        const double c = estimate_cp(p, 20000, 1).value;
        for (const auto& t : scan_vector_inequalities(p, gammas, c, 20000, 2)) {
            CHECK(t.checked > 0);
            CHECK_MESSAGE(t.violations == 0, t.name);
        }
    }
    for (const auto& t : scan_lemma_a(20000, 3)) {
        CHECK(t.checked > 0);
        CHECK_MESSAGE(t.violations == 0, t.name);
    }
}

TEST_CASE("vectorineq: half-power difference bound")
{
    const auto eq = lemma_a_check(0.4, 0.4, 1.5);
    CHECK(eq.lhs == 0.0);
    CHECK_FALSE(eq.violated);
    const auto zero = lemma_a_check(1.0, 0.0, 1.5);
    CHECK(zero.lhs == doctest::Approx(1.0));
    CHECK(zero.rhs == doctest::Approx(4.0));
    const auto opp = lemma_a_check(1.0, -1.0, 1.5);
    CHECK(opp.lhs == doctest::Approx(4.0));
    CHECK(opp.rhs == doctest::Approx(4.0 * std::pow(2.0, 1.5)));
    CHECK_FALSE(opp.refined.has_value());
    const auto same = lemma_a_check(2.0, 0.5, 1.3);
    REQUIRE(same.refined.has_value());
    CHECK_FALSE(same.refined->violated);
    CHECK(half_power(0.0, 1.5) == 0.0);
    CHECK(half_power(-4.0, 1.5) == doctest::Approx(-std::pow(4.0, 0.75)));
}

TEST_CASE("vectorineq: power sum bound")
{
    const auto tight = power_sum_bound_check(1.0, 1.0, 2.0);
    CHECK(tight.lhs == doctest::Approx(4.0));
    CHECK(tight.rhs == doctest::Approx(4.0));
    CHECK_FALSE(tight.violated);
    CHECK(power_sum_bound_check(1.0, -1.0, 3.3).lhs == 0.0);
    const auto half = power_sum_bound_check(3.0, 1.0, 0.5);
    CHECK(half.lhs == doctest::Approx(2.0));
    CHECK(half.rhs == doctest::Approx(std::sqrt(3.0) + 1.0));
    CHECK(power_sum_constant(0.5) == 1.0);
    CHECK(power_sum_constant(3.0) == 4.0);
}

TEST_CASE("vectorineq: appendix scalar facts on a grid")
{
    for (int i = 1; i <= 100; ++i)
        for (int j = 1; j <= 100; ++j) {
            const double p = 1.0 + j / 101.0;
            const double tb = 1.0 + 0.1 * i;  // t > 1
            const double ts = i / 101.0;       // 0 < t < 1
            CHECK(appendix_f(tb, p) < 0.0);
            CHECK(appendix_g(ts, p) < 0.0);
            CHECK(appendix_h(0.05 * i, p) < 0.0);
        }
}
