#include <doctest.h>

#include <cmath>

#include "ckn/errors.hpp"
#include "ckn/functionals.hpp"
#include "ckn/manifold.hpp"
#include "oracles.hpp"

using namespace ckn;

namespace {

const CknParams kHydrogen = CknParams::make(3, 2.0, 0.0, 0.0);
const CknParams kThm1 = CknParams::make(3, 1.5, 4.0 / 3.0, 2.0 / 3.0);
const CknParams kLp = CknParams::make(5, 2.5, 1.0, 0.5);
const CknParams kThm5 = CknParams::make(4, 2.0, 1.0, 2.0 / 3.0);

QuadratureScheme scheme()
{
    QuadratureScheme s;
    s.rel_tol = 1e-10;
    return s;
}

// Dense (c, lam) grid minimum; c over [0, c_hi], lam log-spaced.
double grid_min(const RadialProfile& u, const CknParams& q, StabilityVariant v, double c_hi, double lam_lo,
                double lam_hi, const QuadratureScheme& s)
{
    double best = INFINITY;
    const int nc = 81;
    const int nl = lam_pinned(v) ? 1 : 41;
    for (int j = 0; j < nl; ++j) {
        const double lam = nl == 1 ? 1.0 : lam_lo * std::pow(lam_hi / lam_lo, j / (nl - 1.0));
        for (int i = 0; i < nc; ++i)
            best = std::min(best, stability_distance(u, q, v, c_hi * i / (nc - 1.0), lam, s));
    }
    return best;
}

} // namespace

TEST_CASE("manifold: scale transform")
{
    const auto s = scheme();
    const RadialProfile u = unit_bump(0.5, 2.0);
    const RadialProfile same = scale_transform(u, kThm1, 1.0);
    CHECK(same.eval(1.1) == u.eval(1.1));
    CHECK_THROWS_AS(scale_transform(u, kThm1, 0.0), InvalidArgument);
    const RadialProfile w = scale_transform(u, kThm1, 2.0);
    CHECK(w.lo() == doctest::Approx(0.25));
    CHECK(w.hi() == doctest::Approx(1.0));
    for (const CknParams& q : {kHydrogen, kThm1, kLp})
        for (double lam : {0.1, 0.5, 2.0, 10.0}) {
            const CknTerms a = ckn_terms(u, q, s);
            const CknTerms b = ckn_terms(scale_transform(u, q, lam), q, s);
            CHECK(b.grad / a.grad == doctest::Approx(std::pow(lam, (q.p - 1) * (q.b + 1 - q.a))).epsilon(1e-8));
            CHECK(b.mass / a.mass == doctest::Approx(std::pow(lam, q.a - q.b - 1)).epsilon(1e-8));
            CHECK(b.mixed / a.mixed == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(deficit_si(scale_transform(u, q, lam), q, s).value ==
                  doctest::Approx(deficit_si(u, q, s).value).epsilon(1e-8));
        }
}

TEST_CASE("manifold: projecting a manifold point recovers it")
{
    const auto s = scheme();
    struct Case {
        CknParams q;
        StabilityVariant v;
        double c0, lam0;
    };
    for (const Case& k : {Case{kHydrogen, StabilityVariant::Thm2Dist, 1.5, 0.7},
                          Case{kThm1, StabilityVariant::Thm1Dist, 0.8, 2.0},
                          Case{kThm5, StabilityVariant::ThmCDist, 2.0, 1.3},
                          Case{kLp, StabilityVariant::Thm6Mass, 1.0, 0.5}}) {
        const RadialProfile u = extremal_profile(k.q, k.c0, k.lam0);
        const ProjectionResult r = project(u, k.q, k.v, s);
        CHECK(r.c_star == doctest::Approx(k.c0).epsilon(1e-4));
        CHECK(r.lam_star == doctest::Approx(k.lam0).epsilon(1e-4));
        CHECK(r.distance <= 1e-8 * stability_distance(u, k.q, k.v, 0.0, 1.0, s));
        const ProjectionResult m = project(extremal_profile(k.q, -k.c0, k.lam0), k.q, k.v, s);
        CHECK(m.c_star == doctest::Approx(-k.c0).epsilon(1e-4));
    }
    CHECK_THROWS_AS(project(zero_profile(), kHydrogen, StabilityVariant::Thm2Dist, s), ZeroFunction);
}

TEST_CASE("manifold: closed-form inner minimiser on a bump")
{
    const auto s = scheme();
    const RadialProfile u = bump_profile(1.0, 2.0, 1.0);
    const ProjectionResult r = project_at(u, kHydrogen, StabilityVariant::Thm2Dist, 1.0, s);
    CHECK(r.c_star == doctest::Approx(oracle::bump_proj_c).epsilon(1e-8));
    CHECK(r.distance == doctest::Approx(oracle::bump_proj_dist).epsilon(1e-8));
    CHECK(r.distance == doctest::Approx(stability_distance(u, kHydrogen, StabilityVariant::Thm2Dist, r.c_star, 1.0, s))
                            .epsilon(1e-10));

    ProjectionConfig golden;
    golden.force_golden = true;
    for (StabilityVariant v : {StabilityVariant::Thm2Dist, StabilityVariant::Thm4Dist, StabilityVariant::Thm6Grad}) {
        const ProjectionResult a = project_at(unit_bump(0.6, 2.4), kHydrogen, v, 1.0, s);
        const ProjectionResult b = project_at(unit_bump(0.6, 2.4), kHydrogen, v, 1.0, s, golden);
        CHECK(b.c_star == doctest::Approx(a.c_star).epsilon(1e-8));
    }
}

TEST_CASE("manifold: projection never exceeds a grid-scan oracle")
{
    const auto s = scheme();
    struct Case {
        RadialProfile u;
        CknParams q;
        StabilityVariant v;
        double c_hi;
    };
    const RadialProfile pert = perturb(extremal_profile(kThm1, 1.0, 1.0), 0.5, unit_bump(0.3, 1.2));
    for (const Case& k : {Case{bump_profile(1.0, 2.0, 1.0), kHydrogen, StabilityVariant::Thm2Dist, 0.2},
                          Case{unit_bump(0.5, 3.0), kHydrogen, StabilityVariant::Thm4Dist, 2.0},
                          Case{pert, kThm1, StabilityVariant::Thm1Dist, 3.0},
                          Case{pert, kThm1, StabilityVariant::Thm3Dist, 3.0},
                          Case{unit_bump(0.5, 3.0), kThm5, StabilityVariant::ThmCDist, 3.0}}) {
        const ProjectionResult r = project(k.u, k.q, k.v, s);
        const double g = grid_min(k.u, k.q, k.v, k.c_hi, 0.05, 20.0, s);
        CHECK(r.distance <= g * (1 + 1e-3));
        CHECK(r.distance == doctest::Approx(stability_distance(k.u, k.q, k.v, r.c_star, r.lam_star, s)).epsilon(1e-10));
    }
}

TEST_CASE("manifold: projection is independent of the worker count")
{
    const auto s = scheme();
    ProjectionConfig a, b;
    a.exec = Exec::serial();
    b.exec = Exec::threads(4);
    const RadialProfile u = unit_bump(0.5, 3.0);
    const ProjectionResult x = project(u, kThm5, StabilityVariant::ThmCDist, s, a);
    const ProjectionResult y = project(u, kThm5, StabilityVariant::ThmCDist, s, b);
    CHECK(x.distance == y.distance);
    CHECK(x.lam_star == y.lam_star);
}

TEST_CASE("manifold: counterexample certificates")
{
    const auto s = scheme();
    for (const CknParams& q : {kHydrogen, kThm1, kLp}) {
        const CounterexampleReport g = counterexample_search(dipole_profile(), q, 1.0, 0.0, s);
        CHECK(g.certified);
        CHECK(g.final_claim.holds);
        const CounterexampleReport m = counterexample_search(dipole_profile(), q, 0.0, 1.0, s);
        CHECK(m.certified);
        for (const auto& c : m.cases)
            CHECK(c.delta_scaled == doctest::Approx(c.delta).epsilon(1e-8));
    }
    // the chosen dilation inflates the side being dominated
    const auto g = counterexample_search(dipole_profile(), kHydrogen, 1.0, 0.0, s);
    const auto m = counterexample_search(dipole_profile(), kHydrogen, 0.0, 1.0, s);
    REQUIRE(!g.cases.empty());
    REQUIRE(!m.cases.empty());
    CHECK(g.cases.front().side == "grad");
    CHECK(g.cases.front().term_scaled > g.cases.front().term);
    CHECK(g.cases.front().lam > 1.0);
    CHECK(m.cases.front().side == "mass");
    CHECK(m.cases.front().term_scaled > m.cases.front().term);
    CHECK(m.cases.front().lam < 1.0);

    CHECK_THROWS_AS(counterexample_search(extremal_profile(kHydrogen, 1.0, 2.0), kHydrogen, 1.0, 0.0, s),
                    InvalidArgument);
    CHECK_THROWS_AS(counterexample_search(dipole_profile(), kHydrogen, 0.0, 0.0, s), InvalidArgument);
    CHECK_THROWS_AS(counterexample_search(dipole_profile(), kHydrogen, -1.0, 2.0, s), InvalidArgument);
    CHECK_THROWS_AS(counterexample_search(dipole_profile(), CknParams::make(3, 2.0, 3.0, 1.0), 1.0, 0.0, s),
                    HypothesisViolation);
}
