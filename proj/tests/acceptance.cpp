// Acceptance run: one PASS/FAIL line per criterion, exit 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "ckn/errors.hpp"
#include "ckn/experiments.hpp"
#include "ckn/functionals.hpp"
#include "ckn/manifold.hpp"
#include "ckn/report.hpp"
#include "ckn/vectorineq.hpp"
#include "oracles.hpp"

using namespace ckn;

namespace {

const CknParams kThm1 = CknParams::make(3, 1.5, 4.0 / 3.0, 2.0 / 3.0);
const CknParams kHydrogen = CknParams::make(3, 2.0, 0.0, 0.0);
const CknParams kLp = CknParams::make(5, 2.5, 1.0, 0.5);
const CknParams kBelow = CknParams::make(4, 2.0, 1.0, 2.0 / 3.0);
const CknParams kQ = CknParams::make(4, 2.0, 1.5, 1.5);
constexpr std::uint64_t kSeed = 7;

int failures = 0;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion(int id, const char* name, const std::function<Verdict()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("threw: ") + e.what()};
    }
    const double t = seconds_since(t0);
    if (!v.pass)
        ++failures;
    std::printf("%s %2d %-22s %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), t);
    std::fflush(stdout);
}

std::string secs(double t)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f s", t);
    return buf;
}

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// Identity campaign once; both identity criteria read from it.
struct IdentityRun {
    IdentityReport report;
    double seconds = 0.0;
};

IdentityRun run_identities(const QuadratureScheme& s)
{
    const auto t0 = std::chrono::steady_clock::now();
    IdentityRun r;
    r.report = verify_identities(build_default_corpus({kThm1, kHydrogen, kLp}, kSeed), s);
    r.seconds = seconds_since(t0);
    return r;
}

Verdict identity_verdict(const IdentityRun& run, bool scaled)
{
    double worst = 0.0;  // residual relative to the magnitude of the terms
    double worst1 = 0.0; // |deficit - rhs| / (1 + |deficit|)
    int checked = 0;
    for (const auto& row : run.report.rows) {
        if (row.skipped)
            continue;
        ++checked;
        const double lhs = scaled ? row.lhs_42 : row.lhs_41;
        const double rhs = scaled ? row.rhs_42 : row.rhs_41;
        worst = std::max(worst, scaled ? row.residual_42 : row.residual_41);
        worst1 = std::max(worst1, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
    const bool ok = checked >= 42 && worst <= 1e-6 && worst1 <= 1e-6 && run.seconds <= 60.0;
    return {ok, std::to_string(checked) + " pairs, max rel residual " + fmt(worst) + ", max abs/(1+|d|) " +
                    fmt(worst1) + ", campaign " + secs(run.seconds)};
}

} // namespace

int main()
{
    QuadratureScheme s; // rel_tol 1e-10, 32 nodes, 2 panels per decade
    const IdentityRun ids = run_identities(s);

    criterion(1, "identity-nonscaled", [&] { return identity_verdict(ids, false); });
    criterion(2, "identity-scaled", [&] { return identity_verdict(ids, true); });

    criterion(3, "extremal-attainment", [&] {
        double worst = 0.0;
        int n = 0;
        for (const CknParams& q : {kThm1, kLp})
            for (double lam : {0.5, 1.0, 2.0}) {
                const CknTerms t = ckn_terms(extremal_profile(q, 1.0, lam), q, s);
                const double lead = std::pow(t.grad, 1 / q.p) * std::pow(t.mass, (q.p - 1) / q.p);
                worst = std::max(worst, std::abs(sharp_constant_lp(q) * t.mixed / lead - 1.0));
                ++n;
            }
        return Verdict{n == 6 && worst <= 1e-6, std::to_string(n) + " extremals, max |ratio - 1| " + fmt(worst)};
    });

    criterion(4, "q-region-attainment", [&] {
        const double K = sharp_constant_l2(4, 1.5, 1.5);
        const RadialProfile u = extremal_profile_q(4, 1.5, 1.5, 1.0, -1.0);
        const CknTerms t = ckn_terms(u, kQ, s);
        const double d = deficit_si(t, s.rel_tol, K).value / std::sqrt(t.grad * t.mass);
        return Verdict{classify_region(4, 1.5, 1.5) == Region::Q2 && std::abs(d) <= 1e-6,
                       "K = " + fmt(K) + ", relative deficit " + fmt(d)};
    });

    criterion(5, "scaling-laws", [&] {
        const RadialProfile v = extremal_profile(kThm1, 1.0, 1.0);
        const std::vector<RadialProfile> profiles{unit_bump(0.4, 2.0), unit_bump(1.5, 6.0, 2.0),
                                                  perturb(v, 0.1, unit_bump(0.3, 1.2)),
                                                  perturb(v, 0.5, unit_bump(0.8, 2.5)), dipole_profile()};
        double worst = 0.0;
        int n = 0;
        for (const CknParams& q : {kThm1, kHydrogen, kLp})
            for (const RadialProfile& u : profiles)
                for (double lam : {0.1, 0.5, 2.0, 10.0}) {
                    worst = std::max(worst, scaling_law_check(u, q, lam, s).max_rel_error);
                    ++n;
                }
        return Verdict{worst <= 1e-8, std::to_string(n) + " checks, max rel error " + fmt(worst)};
    });

    criterion(6, "counterexample", [&] {
        bool ok = true;
        double min_slack = INFINITY;
        int certs = 0;
        for (const CknParams& q : {kHydrogen, kThm1, kLp})
            for (auto [c1, c2] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}}) {
                const CounterexampleReport r = counterexample_search(dipole_profile(), q, c1, c2, s);
                ok = ok && r.certified && r.final_claim.holds && r.final_claim.slack >= 0.0;
                min_slack = std::min(min_slack, r.final_claim.slack);
                for (const auto& c : r.cases)
                    for (const auto& step : c.chain) {
                        ok = ok && step.holds && step.slack >= 0.0;
                        min_slack = std::min(min_slack, step.slack);
                    }
                ++certs;
            }
        return Verdict{ok, std::to_string(certs) + " certificates, min slack " + fmt(min_slack)};
    });

    criterion(7, "vector-suite", [&] {
        const std::vector<std::pair<double, double>> cases{{1.1, oracle::cp_1_1}, {1.5, oracle::cp_1_5},
                                                           {1.9, oracle::cp_1_9}, {2.0, 1.0},
                                                           {2.5, oracle::cp_2_5}, {3.0, oracle::cp_3},
                                                           {4.0, oracle::cp_4}};
        const std::vector<double> gammas{0.25, 0.5, 1.0};
        std::int64_t violations = 0, checked = 0;
        for (auto [p, c] : cases)
            for (const auto& t : scan_vector_inequalities(p, gammas, c, 100000, kSeed + 1)) {
                violations += t.violations;
                checked += t.checked;
            }
        const double c2 = estimate_cp(2.0, 100000, kSeed).value;
        const bool ok = violations == 0 && std::abs(c2 - 1.0) <= 1e-12;
        return Verdict{ok, std::to_string(checked) + " checks, " + std::to_string(violations) +
                               " violations, c_emp(p=2) = " + fmt(c2)};
    });

    criterion(8, "half-power-lemma", [&] {
        std::int64_t violations = 0, checked = 0;
        for (const auto& t : scan_lemma_a(100000, kSeed + 2)) {
            violations += t.violations;
            checked += t.checked;
        }
        int grid_bad = 0;
        for (int i = 1; i <= 100; ++i)
            for (int j = 1; j <= 100; ++j) {
                const double p = 1.0 + j / 101.0;
                if (!(appendix_h(0.1 * i, p) < 0.0))
                    ++grid_bad;
                if (!(appendix_f(1.0 + 0.1 * i, p) <= 0.0))
                    ++grid_bad;
            }
        return Verdict{violations == 0 && grid_bad == 0,
                       std::to_string(checked) + " sample checks, " + std::to_string(violations) +
                           " violations, grid failures " + std::to_string(grid_bad) + "/20000"};
    });

    criterion(9, "stability-positivity", [&] {
        struct Case {
            TheoremId id;
            CknParams q;
            double baseline;
        };
        const Case cases[] = {{TheoremId::Thm1, kThm1, 4.94583},    {TheoremId::Thm3, kThm1, 6.21181},
                              {TheoremId::Thm2, kHydrogen, 3.99706}, {TheoremId::Thm4, kHydrogen, 0.834423},
                              {TheoremId::Thm5, kBelow, 9.75988},    {TheoremId::ThmC, kBelow, 6.87376}};
        bool ok = true;
        std::string detail;
        for (const Case& c : cases) {
            const Corpus corpus = build_default_corpus({c.q}, kSeed).only_kind("perturbed");
            const StabilityEstimate e = estimate_stability_constant(corpus, c.q, c.id, s);
            int bad_excl = 0;
            for (const auto& row : e.rows)
                if (row.excluded && row.eps >= 0.1)
                    ++bad_excl;
            const bool in_band = std::abs(e.value - c.baseline) <= 0.2 * c.baseline;
            ok = ok && e.value > 0.0 && bad_excl == 0 && in_band;
            detail += std::string(to_string(c.id)) + "=" + fmt(e.value) + (in_band ? "" : "(out of band)") + " ";
        }
        return Verdict{ok, detail};
    });

    criterion(10, "poincare", [&] {
        struct Tuple {
            double p, rho, sigma, theta, lam;
        };
        const Tuple tuples[] = {{2.0, 0.0, 1.0, 1.0, 1.0},
                                {2.0, 0.5, 2.0, 1.0, 0.5},
                                {1.5, 0.0, 1.0, 1.0, 1.0},
                                {1.5, 0.5, 2.0, 1.2, 1.7}};
        RadialProfile gauss = extremal_profile(CknParams::make(3, 2.0, 0.0, 1.0), 1.0, 1.0);
        const std::vector<RadialProfile> profiles{unit_bump(0.5, 2.5), extremal_profile(kHydrogen, 1.0, 1.0), gauss,
                                                  dipole_profile(), power_profile(1.0)};
        int checks = 0, bad = 0, cov = 0;
        double worst_scaling = 0.0, worst_cov = 0.0;
        for (const Tuple& t : tuples)
            for (int d = 0; d < 3; ++d) {
                PoincareConfig pc{t.p, t.rho, t.sigma, t.theta, t.lam, {}, d == 0};
                if (d == 1)
                    pc.annuli = {{1.0, 2.0}};
                if (d == 2)
                    pc.annuli = {{0.5, 1.0}, {2.0, 3.0}};
                for (const RadialProfile& f : profiles) {
                    const PoincareScaling sc = poincare_scaling_check(f, pc, 3, s);
                    const double r = sc.original.ratio;
                    if (!(std::isfinite(r) && r > 0.0) || !sc.passed)
                        ++bad;
                    worst_scaling = std::max(worst_scaling, sc.rel_diff);
                    ++checks;
                }
            }
        for (const RadialProfile& f : profiles) {
            if (f.decay().kind == Decay::Kind::Algebraic)
                continue;
            const auto c = change_of_variables_check(f, 2.0, 3, s);
            worst_cov = std::max(worst_cov, c.rel_diff);
            bad += c.passed ? 0 : 1;
            ++cov;
        }
        const auto e = change_of_variables_check(extremal_profile(kHydrogen, 1.0, 1.0), 2.0, 2, s);
        bad += (e.passed && rel(e.lhs, 1.0) <= 1e-8) ? 0 : 1;
        return Verdict{bad == 0, std::to_string(checks) + " ratio/scaling checks, max scaling diff " +
                                     fmt(worst_scaling) + ", " + std::to_string(cov + 1) + " substitutions, max diff " +
                                     fmt(std::max(worst_cov, e.rel_diff))};
    });

    criterion(11, "quadrature-oracles", [&] {
        const double g3 =
            integrate([](double r) { return r * r * std::exp(-r); }, 0.0, INFINITY, s, Decay::stretched(1.0, 1.0, 2.0))
                .value;
        QuadratureScheme cut = s;
        cut.r_min = 1e-8;
        cut.r_max = 1.0;
        cut.origin_correction = false;
        const double sq = integrate([](double r) { return 1.0 / std::sqrt(r); }, cut).value;
        const double pi = weighted_norm_term(extremal_profile(kHydrogen, 1.0, 1.0), false, 2.0, 0.0, 3, s);
        const double worst = std::max({rel(g3, 2.0), rel(sq, 2.0 * (1.0 - 1e-4)), rel(pi, std::numbers::pi)});
        const NodeDoublingReport nd = node_doubling_check(build_default_corpus({kThm1, kHydrogen, kLp}, kSeed), s);
        const bool ok = worst <= 1e-8 && nd.max_rel_diff <= 10 * s.rel_tol;
        return Verdict{ok, "max oracle error " + fmt(worst) + ", node doubling " + fmt(nd.max_rel_diff) + " over " +
                               std::to_string(nd.pairs) + " pairs"};
    });

    std::printf("%s: %d of 11 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
