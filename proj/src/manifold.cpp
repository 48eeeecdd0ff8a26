#include "ckn/manifold.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ckn/errors.hpp"
#include "ckn/optimize.hpp"
#include "ckn/parallel.hpp"

namespace ckn {

namespace {

struct PartSpec {
    bool derivative;
    double weight; // gamma in r^{N-1-gamma}
};

struct Part {
    std::vector<double> U, E, W;
};

// sum_parts sum_i W_i |U_i - c E_i|^q on a captured node rule.
struct Discrete {
    std::vector<Part> parts;
    double q = 2.0;
    bool half = false; // parameter is |c|^{(p-2)/2} c

    long double eval(double c) const
    {
        long double s = 0.0L;
        for (const Part& part : parts)
            for (std::size_t i = 0; i < part.W.size(); ++i) {
                const long double d = static_cast<long double>(part.U[i]) - static_cast<long double>(c) * part.E[i];
                s += part.W[i] * (q == 2.0 ? d * d : static_cast<long double>(std::pow(static_cast<double>(std::fabs(d)), q)));
            }
        return s;
    }

    // Minimizer of the q = 2 problem; also the starting point otherwise.
    double l2_coefficient(double* scale) const
    {
        long double ue = 0.0L;
        long double ee = 0.0L;
        long double uu = 0.0L;
        for (const Part& part : parts)
            for (std::size_t i = 0; i < part.W.size(); ++i) {
                ue += static_cast<long double>(part.W[i]) * part.U[i] * part.E[i];
                ee += static_cast<long double>(part.W[i]) * part.E[i] * part.E[i];
                uu += static_cast<long double>(part.W[i]) * part.U[i] * part.U[i];
            }
        if (scale)
            *scale = ee > 0.0L ? static_cast<double>(std::sqrt(uu / ee)) : 1.0;
        return ee > 0.0L ? static_cast<double>(ue / ee) : 0.0;
    }
};

std::vector<PartSpec> parts_for(StabilityVariant v, const CknParams& params)
{
    switch (v) {
    case StabilityVariant::Thm1Dist:
    case StabilityVariant::Thm3Dist:
    case StabilityVariant::Thm2Dist:
    case StabilityVariant::Thm6Mass:
        return {{false, params.mass_weight()}};
    case StabilityVariant::Thm6Grad:
        return {{true, params.grad_weight()}};
    case StabilityVariant::Thm4Dist:
        return {{true, params.grad_weight()}, {false, params.mass_weight()}};
    case StabilityVariant::Thm5Dist:
    case StabilityVariant::ThmCDist:
        return {{false, params.mixed_weight()}};
    }
    return {};
}

bool uses_half_power(StabilityVariant v)
{
    return v == StabilityVariant::Thm1Dist || v == StabilityVariant::Thm3Dist;
}

Discrete build_discrete(const RadialProfile& u, const CknParams& params, StabilityVariant v, double lam,
                        const QuadratureScheme& scheme)
{
    const bool half = uses_half_power(v);
    const double q = half ? 2.0 : params.p;
    const RadialProfile e = extremal_profile(params, 1.0, lam);
    const RadialProfile pu = half ? half_power_transform(u, params.p) : u;
    const RadialProfile pe = half ? half_power_transform(e, params.p) : e;
    const auto specs = parts_for(v, params);
    const int N = params.N;

    auto value = [](const RadialProfile& f, bool d, double r) { return d ? f.deriv(r) : f.eval(r); };
    auto proxy = [&](double r) {
        double s = 0.0;
        for (const PartSpec& sp : specs) {
            const double a = std::abs(value(pu, sp.derivative, r));
            const double b = std::abs(value(pe, sp.derivative, r));
            s += (std::pow(a, q) + std::pow(b, q)) * std::pow(r, N - 1.0 - sp.weight);
        }
        return s;
    };
    Decay decay = Decay::compact();
    for (const PartSpec& sp : specs) {
        const double w = N - 1.0 - sp.weight;
        decay = slower(decay, power_decay(pu.decay(), sp.derivative, q, w));
        decay = slower(decay, power_decay(pe.decay(), sp.derivative, q, w));
    }
    if (!pu.is_zero() && pu.decay().kind == Decay::Kind::Compact)
        decay = with_onset(decay, pu.hi());
    // The rule only locates the minimizer; the reported distance is recomputed adaptively.
    QuadratureScheme coarse = scheme;
    coarse.rel_tol = std::max(scheme.rel_tol, 1e-8);
    NodeRule rule;
    integrate(proxy, 0.0, std::numeric_limits<double>::infinity(), coarse, decay, &rule);

    Discrete out;
    out.q = q;
    out.half = half;
    const double omega = sphere_area(N);
    for (const PartSpec& sp : specs) {
        Part part;
        part.U.reserve(rule.r.size());
        for (std::size_t i = 0; i < rule.r.size(); ++i) {
            const double r = rule.r[i];
            part.U.push_back(value(pu, sp.derivative, r));
            part.E.push_back(value(pe, sp.derivative, r));
            part.W.push_back(omega * rule.w[i] * std::pow(r, N - 1.0 - sp.weight));
        }
        out.parts.push_back(std::move(part));
    }
    return out;
}

struct Inner {
    double c = 0.0;
    double value = 0.0;
    int evaluations = 0;
};

double from_parameter(double d, bool half, double p)
{
    if (!half || d == 0.0)
        return d;
    return std::copysign(std::pow(std::abs(d), 2.0 / p), d);
}

Inner minimize_c(const Discrete& dp, double p, bool force_golden)
{
    double scale = 1.0;
    const double c0 = dp.l2_coefficient(&scale);
    Inner out;
    if (dp.q == 2.0 && !force_golden) {
        out.c = c0;
        out.value = static_cast<double>(dp.eval(c0));
        out.evaluations = 1;
    } else {
        auto f = [&](double c) { return dp.eval(c); };
        const double step = 0.1 * (std::abs(c0) + scale) + 1e-300;
        const auto [a, b] = bracket_minimum(f, c0, step);
        const Minimum1D m = force_golden ? golden_section(f, a, b, 1e-13, 400) : brent_minimize(f, a, b, 1e-12, 400);
        out.c = m.x;
        out.value = static_cast<double>(m.f);
        out.evaluations = m.evaluations;
    }
    out.c = from_parameter(out.c, dp.half, p);
    return out;
}

double natural_scale(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme)
{
    const double G = weighted_norm_term(u, true, params.p, params.grad_weight(), params.N, scheme);
    const double M = weighted_norm_term(u, false, params.p, params.mass_weight(), params.N, scheme);
    const double lam = std::pow(M / G, 1.0 / (params.p * params.manifold_exponent()));
    return std::isfinite(lam) && lam > 0.0 ? lam : 1.0;
}

void set_distance(ProjectionResult& res, const RadialProfile& u, const CknParams& params,
                  const QuadratureScheme& scheme)
{
    const QuadResult q = stability_distance_result(u, params, res.variant, res.c_star, res.lam_star, scheme);
    res.distance = q.value;
    res.distance_condition = scheme.rel_tol * q.abs_value + q.error_estimate;
}

} // namespace

ProjectionResult project_at(const RadialProfile& u, const CknParams& params, StabilityVariant variant, double lam,
                            const QuadratureScheme& scheme, const ProjectionConfig& cfg)
{
    if (u.is_zero())
        throw ZeroFunction("projection of the zero function");
    check_variant(variant, params, lam);
    const Discrete dp = build_discrete(u, params, variant, lam, scheme);
    const Inner in = minimize_c(dp, params.p, cfg.force_golden);
    ProjectionResult res;
    res.variant = variant;
    res.c_star = in.c;
    res.lam_star = lam;
    res.evaluations = in.evaluations;
    res.converged = true;
    set_distance(res, u, params, scheme);
    return res;
}

ProjectionResult project(const RadialProfile& u, const CknParams& params, StabilityVariant variant,
                         const QuadratureScheme& scheme, const ProjectionConfig& cfg)
{
    if (u.is_zero())
        throw ZeroFunction("projection of the zero function");
    if (lam_pinned(variant))
        return project_at(u, params, variant, 1.0, scheme, cfg);
    check_variant(variant, params, 1.0);
    if (cfg.grid_points < 3 || !(cfg.window_lo > 0.0 && cfg.window_hi > cfg.window_lo))
        throw InvalidArgument("projection window needs 0 < lo < hi and at least 3 grid points");

    const double center = natural_scale(u, params, scheme);
    const double log_lo = std::log(center * cfg.window_lo);
    const double log_hi = std::log(center * cfg.window_hi);
    const int n = cfg.grid_points;
    const double step = (log_hi - log_lo) / (n - 1);

    std::vector<Inner> grid(n);
    parallel_for(n, cfg.exec, [&](std::int64_t k) {
        const double lam = std::exp(log_lo + step * static_cast<double>(k));
        grid[k] = minimize_c(build_discrete(u, params, variant, lam, scheme), params.p, cfg.force_golden);
    });
    ArgMin best;
    long evals = 0;
    for (int k = 0; k < n; ++k) {
        best.offer(grid[k].value, k);
        evals += grid[k].evaluations;
    }
    if (best.index < 0)
        throw AccuracyNotReached("projection: no finite distance on the lam grid");
    const int k = static_cast<int>(best.index);

    ProjectionResult res;
    res.variant = variant;
    res.boundary_hit = (k == 0 || k == n - 1);
    double best_log = log_lo + step * k;
    Inner best_inner = grid[k];

    const double a = log_lo + step * std::max(0, k - 1);
    const double b = log_lo + step * std::min(n - 1, k + 1);
    auto f = [&](double log_lam) {
        const Inner in = minimize_c(build_discrete(u, params, variant, std::exp(log_lam), scheme), params.p,
                                    cfg.force_golden);
        evals += in.evaluations;
        if (in.value < best_inner.value) {
            best_inner = in;
            best_log = log_lam;
        }
        return in.value;
    };
    const Minimum1D m = golden_section(f, a, b, cfg.tol, cfg.max_refine);
    res.converged = m.converged;
    res.c_star = best_inner.c;
    res.lam_star = std::exp(best_log);
    res.evaluations = evals;
    set_distance(res, u, params, scheme);
    return res;
}

RadialProfile scale_transform(const RadialProfile& u, const CknParams& params, double lam)
{
    if (!(lam > 0.0))
        throw InvalidArgument("scale_transform needs lam > 0");
    RadialProfile out = dilate(u, lam, std::pow(lam, params.scaling_defect() / params.p));
    std::ostringstream os;
    os << "scaled(" << u.label() << ",lam=" << lam << ")";
    out.set_label(os.str());
    return out;
}

RadialProfile dipole_profile()
{
    RadialProfile out = combine({{1.0, unit_bump(0.5, 1.5)}, {-1.0, unit_bump(1.5, 3.0)}});
    out.set_label("dipole");
    return out;
}

namespace {

CertificateStep step(std::string claim, double lhs, double rhs)
{
    CertificateStep s{std::move(claim), lhs, rhs, rhs - lhs, false};
    s.holds = s.slack >= 0.0;
    return s;
}

} // namespace

CounterexampleReport counterexample_search(const RadialProfile& u, const CknParams& params, double C1, double C2,
                                           const QuadratureScheme& scheme, const ProjectionConfig& cfg)
{
    if (!(C1 >= 0.0 && C2 >= 0.0 && C1 + C2 > 0.0))
        throw InvalidArgument("counterexample needs C1, C2 >= 0 with C1 + C2 > 0");
    if (!hypotheses_hold(TheoremId::Thm6, params))
        throw HypothesisViolation("nonexistence hypotheses fail for " + params.describe());
    if (u.is_zero())
        throw ZeroFunction("counterexample of the zero function");

    CounterexampleReport rep;
    rep.params = params;
    rep.profile_label = u.label();
    rep.C1 = C1;
    rep.C2 = C2;
    const CknTerms t = ckn_terms(u, params, scheme);
    const DeficitValue d = deficit_si(t, scheme.rel_tol);
    if (!d.resolved || d.value <= 0.0)
        throw InvalidArgument("profile is numerically on the extremal manifold (deficit " + std::to_string(d.value) + ")");
    rep.delta = d.value;

    const double s = params.manifold_exponent();
    const double k_grad = (params.p - 1.0) * s;
    const bool grad_side = C1 > 0.0;

    CounterexampleCase cc;
    cc.side = grad_side ? "grad" : "mass";
    cc.C = grad_side ? C1 : C2;
    cc.delta = d.value;
    cc.term = grad_side ? t.grad : t.mass;
    // Factor 2 past the sufficient threshold keeps the certificate off equality.
    cc.lam = grad_side ? std::pow(4.0 * d.value / (C1 * t.grad), 1.0 / k_grad)
                       : std::pow(C2 * t.mass / (4.0 * d.value), 1.0 / s);
    const RadialProfile us = scale_transform(u, params, cc.lam);
    const CknTerms ts = ckn_terms(us, params, scheme);
    cc.delta_scaled = deficit_si(ts, scheme.rel_tol).value;
    cc.term_scaled = grad_side ? ts.grad : ts.mass;
    cc.projection = project(us, params, grad_side ? StabilityVariant::Thm6Grad : StabilityVariant::Thm6Mass, scheme, cfg);

    const double inv_tol = 1e-8 * std::abs(cc.delta);
    cc.chain.push_back(step("|delta(u_lam) - delta(u)| <= 1e-8 delta(u)", std::abs(cc.delta_scaled - cc.delta), inv_tol));
    cc.chain.push_back(step(grad_side ? "delta(u_lam) <= (C1/2) grad(u_lam)" : "delta(u_lam) <= (C2/2) mass(u_lam)",
                            cc.delta_scaled, 0.5 * cc.C * cc.term_scaled));
    cc.chain.push_back(step(grad_side ? "grad(u_lam) <= 2 inf_v grad-dist(u_lam, v)"
                                      : "mass(u_lam) <= 2 inf_v mass-dist(u_lam, v)",
                            cc.term_scaled, 2.0 * cc.projection.distance));
    cc.certified = true;
    for (const auto& st : cc.chain)
        cc.certified = cc.certified && st.holds;
    rep.cases.push_back(cc);

    // Both infima enter the final claim when both constants are positive.
    double rhs = cc.C * cc.projection.distance;
    if (grad_side && C2 > 0.0)
        rhs += C2 * project(us, params, StabilityVariant::Thm6Mass, scheme, cfg).distance;
    rep.final_claim = step("delta(u_lam) <= C1 inf grad-dist + C2 inf mass-dist", cc.delta_scaled, rhs);
    rep.certified = cc.certified && rep.final_claim.holds;
    return rep;
}

} // namespace ckn
