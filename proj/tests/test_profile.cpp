#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ckn/errors.hpp"
#include "ckn/profile.hpp"

using namespace ckn;

namespace {

// Central difference at 100 interior points, step 1e-6 r.
void check_derivative(const RadialProfile& u, double lo, double hi)
{
    for (int i = 1; i <= 100; ++i) {
        const double r = lo + (hi - lo) * i / 101.0;
        const double h = 1e-6 * r;
        const double fd = (u.eval(r + h) - u.eval(r - h)) / (2 * h);
        const double d = u.deriv(r);
        const double scale = std::max({std::abs(d), std::abs(u.eval(r)) / r, 1e-300});
        // absolute floor: roundoff of the difference quotient where f is flat
        CHECK_MESSAGE(std::abs(fd - d) <= 1e-6 * scale + 1e-12, u.label() << " at r=" << r);
    }
}

} // namespace

TEST_CASE("profile: sphere areas")
{
    CHECK(sphere_area(2) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
    CHECK(sphere_area(3) == doctest::Approx(4 * std::numbers::pi).epsilon(1e-15));
    CHECK(sphere_area(4) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("profile: bump shape")
{
    const RadialProfile u = bump_profile(1.0, 3.0, 2.0);
    CHECK(u.eval(1.0) == 0.0);
    CHECK(u.eval(3.0) == 0.0);
    CHECK(u.deriv(1.0) == 0.0);
    CHECK(u.deriv(3.0) == 0.0);
    CHECK(u.eval(0.5) == 0.0);
    CHECK(u.lo() == 1.0);
    CHECK(u.hi() == 3.0);
    CHECK(u.eval(2.0) == doctest::Approx(2.0 * std::exp(-1.0)));
    CHECK(u.deriv(2.0) == doctest::Approx(0.0));
    CHECK(unit_bump(0.5, 1.5, 3.0).eval(1.0) == doctest::Approx(3.0));
    check_derivative(u, 1.0, 3.0);
}

TEST_CASE("profile: extremals")
{
    const CknParams h = CknParams::make(3, 2.0, 0.0, 0.0);
    CHECK(extremal_profile(h, 0.0, 1.0).is_zero());
    const RadialProfile e = extremal_profile(h, 1.0, 1.0);
    for (double r : {0.1, 1.0, 7.0})
        CHECK(e.eval(r) == doctest::Approx(std::exp(-r)).epsilon(1e-15));
    CHECK(e.decay().kind == Decay::Kind::StretchedExp);

    const CknParams t1 = CknParams::make(3, 1.5, 4.0 / 3.0, 2.0 / 3.0);
    const RadialProfile v = extremal_profile(t1, 1.3, 0.7);
    const double s = t1.manifold_exponent();
    for (double r : {0.2, 1.0, 5.0})
        CHECK(v.deriv(r) == doctest::Approx(-v.eval(r) * std::pow(r, s - 1) / std::pow(0.7, s)).epsilon(1e-13));
    check_derivative(v, 0.05, 20.0);

    CHECK_THROWS_AS(extremal_profile(CknParams::make(3, 2.0, 2.0, 0.0), 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(extremal_profile(h, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("profile: Q-family extremal")
{
    CHECK(extremal_profile_q(4, 1.5, 1.5, 0.0, -1.0).is_zero());
    CHECK_THROWS_AS(extremal_profile_q(4, 2.5, 1.5, 1.0, -1.0), InvalidArgument);
    // N = 2(b+1): the power factor is 1
    const RadialProfile w = extremal_profile_q(4, 1.0, 1.0, 1.0, -1.0);
    CHECK(w.eval(2.0) == doctest::Approx(std::exp(-2.0)));
    const RadialProfile q = extremal_profile_q(4, 1.5, 1.5, 1.0, -1.0);
    for (double r : {0.5, 1.0, 2.0}) {
        const double h = 1e-5;
        const double fd = (q.eval(r + h) - q.eval(r - h)) / (2 * h);
        CHECK(q.deriv(r) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("profile: half power transform")
{
    const RadialProfile e = extremal_profile(CknParams::make(3, 2.0, 0.0, 0.0), 1.0, 1.0);
    const RadialProfile g = half_power_transform(e, 1.5);
    for (double r : {0.3, 2.0, 9.0})
        CHECK(g.eval(r) == doctest::Approx(std::exp(-0.75 * r)).epsilon(1e-14));
    check_derivative(g, 0.05, 20.0);
    const RadialProfile same = half_power_transform(e, 2.0);
    CHECK(same.eval(1.7) == doctest::Approx(e.eval(1.7)));
    CHECK(half_power_transform(zero_profile(), 1.5).eval(1.0) == 0.0);
}

TEST_CASE("profile: derived profiles have consistent derivatives")
{
    const CknParams t5 = CknParams::make(4, 2.0, 1.0, 2.0 / 3.0);
    const RadialProfile v = extremal_profile(t5, 1.0, 1.0);
    const RadialProfile bump = unit_bump(0.8, 2.5);
    check_derivative(perturb(v, 0.3, bump), 0.05, 8.0);
    check_derivative(dilate(v, 2.0, 0.5), 0.05, 8.0);
    check_derivative(combine({{1.0, bump}, {-2.0, unit_bump(3.0, 4.0)}}), 0.7, 4.2);
    check_derivative(smooth_truncate(v, 2.0, 4.0), 0.05, 5.0);
    check_derivative(affine(bump, 2.0, 0.5), 0.9, 2.4);
}

TEST_CASE("profile: descriptor round trip")
{
    const CknParams t1 = CknParams::make(3, 1.5, 4.0 / 3.0, 2.0 / 3.0);
    const RadialProfile u = perturb(extremal_profile(t1, 1.0, 1.0), 0.1, unit_bump(0.3, 1.2));
    const RadialProfile w = profile_from_json(u.descriptor());
    for (double r : {0.2, 0.7, 3.0})
        CHECK(w.eval(r) == u.eval(r));
    CHECK_THROWS_AS(profile_from_json(nlohmann::json{{"kind", "nope"}}), InvalidArgument);
}

TEST_CASE("profile: weighted norms")
{
    QuadratureScheme s;
    const RadialProfile e = extremal_profile(CknParams::make(3, 2.0, 0.0, 0.0), 1.0, 1.0);
    CHECK(weighted_norm_term(e, false, 2.0, 0.0, 3, s) == doctest::Approx(std::numbers::pi).epsilon(1e-8));
    CHECK(weighted_norm_term(zero_profile(), false, 2.0, 0.0, 3, s) == 0.0);
    // gamma = N - 1 cancels the Jacobian
    const RadialProfile b = unit_bump(1.0, 2.0);
    QuadratureScheme plain = s;
    const double direct = integrate([&](double r) { return b.eval(r) * b.eval(r) * b.eval(r); }, 1.0, 2.0, plain).value;
    CHECK(weighted_norm_term(b, false, 3.0, 2.0, 3, s) == doctest::Approx(4 * std::numbers::pi * direct).epsilon(1e-10));
    // non-integrable at the origin: warning recorded
    const QuadResult bad = weighted_norm_result(e, false, 2.0, 3.5, 3, s);
    CHECK_FALSE(bad.warnings.empty());
}
