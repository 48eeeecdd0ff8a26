#include "ckn/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "ckn/errors.hpp"
#include "ckn/vectorineq.hpp"

namespace ckn {

CknTerms ckn_terms(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme)
{
    CknTerms t;
    t.params = params;
    const double p = params.p;
    t.grad_q = weighted_norm_result(u, true, p, params.grad_weight(), params.N, scheme);
    t.mass_q = weighted_norm_result(u, false, p, params.mass_weight(), params.N, scheme);
    t.mixed_q = weighted_norm_result(u, false, p, params.mixed_weight(), params.N, scheme);
    t.grad = t.grad_q.value;
    t.mass = t.mass_q.value;
    t.mixed = t.mixed_q.value;
    return t;
}

namespace {

DeficitValue finish(double lhs, double rhs, double rel_tol)
{
    DeficitValue d;
    d.value = lhs - rhs;
    d.condition = (std::abs(lhs) + std::abs(rhs)) * rel_tol;
    d.resolved = std::abs(d.value) > d.condition;
    return d;
}

void require_nonzero(const CknTerms& t)
{
    if (!(t.mass > 0.0) && !(t.grad > 0.0))
        throw ZeroFunction("deficit of the zero function");
}

// Integral of g_p(s1 * X, s2 * Y) |x|^{-pb} with X = -f r^{b-a}, Y = f'.
double collinear_identity(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme,
                          double s1, double s2)
{
    if (u.is_zero())
        return 0.0;
    const double p = params.p;
    const double ba = params.b - params.a;
    const double w = params.N - 1.0 - params.grad_weight();
    auto g = [&](double r) {
        const double f = u.eval(r);
        const double df = u.deriv(r);
        if (f == 0.0 && df == 0.0)
            return 0.0;
        const double x = -s1 * f * std::pow(r, ba);
        return g_p_scalar(x, s2 * df, p) * std::pow(r, w);
    };
    // For extremals the integrand is pure cancellation; measure it against |X|^p + |Y|^p.
    auto m = [&](double r) {
        const double x = s1 * u.eval(r) * std::pow(r, ba);
        const double y = s2 * u.deriv(r);
        return (std::pow(std::abs(x), p) + std::pow(std::abs(y), p)) * std::pow(r, w);
    };
    const Decay decay = slower(power_decay(u.decay(), false, p, w + p * ba), power_decay(u.decay(), true, p, w));
    return sphere_area(params.N) * integrate(g, u.lo(), u.hi(), scheme, decay, nullptr, m).value;
}

} // namespace

DeficitValue deficit_si(const CknTerms& t, double rel_tol, std::optional<double> constant_override)
{
    require_nonzero(t);
    const double p = t.params.p;
    const double K = constant_override ? *constant_override : sharp_constant_lp(t.params);
    const double lhs = std::pow(t.grad, 1.0 / p) * std::pow(t.mass, (p - 1.0) / p);
    return finish(lhs, K * t.mixed, rel_tol);
}

DeficitValue deficit_si(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme,
                        std::optional<double> constant_override)
{
    if (u.is_zero())
        throw ZeroFunction("deficit of the zero function");
    return deficit_si(ckn_terms(u, params, scheme), scheme.rel_tol, constant_override);
}

DeficitValue deficit_sni(const CknTerms& t, double rel_tol)
{
    require_nonzero(t);
    const double p = t.params.p;
    const double K = std::abs(t.params.scaling_defect());
    return finish(t.grad + (p - 1.0) * t.mass, K * t.mixed, rel_tol);
}

DeficitValue deficit_sni(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme)
{
    if (u.is_zero())
        throw ZeroFunction("deficit of the zero function");
    return deficit_sni(ckn_terms(u, params, scheme), scheme.rel_tol);
}

double identity_rhs_41(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme)
{
    return collinear_identity(u, params, scheme, 1.0, 1.0);
}

double identity_rhs_42(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme,
                       const CknTerms* terms)
{
    if (u.is_zero())
        throw ZeroFunction("identity_rhs_42 of the zero function");
    CknTerms local;
    if (!terms) {
        local = ckn_terms(u, params, scheme);
        terms = &local;
    }
    require_nonzero(*terms);
    const double p = params.p;
    const double ratio = terms->grad / terms->mass;
    const double s1 = std::pow(ratio, 1.0 / (p * p));
    const double s2 = std::pow(ratio, -(p - 1.0) / (p * p));
    return collinear_identity(u, params, scheme, s1, s2) / p;
}

std::string_view to_string(StabilityVariant v)
{
    switch (v) {
    case StabilityVariant::Thm1Dist: return "thm1";
    case StabilityVariant::Thm2Dist: return "thm2";
    case StabilityVariant::Thm3Dist: return "thm3";
    case StabilityVariant::Thm4Dist: return "thm4";
    case StabilityVariant::Thm5Dist: return "thm5";
    case StabilityVariant::ThmCDist: return "thmc";
    case StabilityVariant::Thm6Grad: return "thm6-grad";
    case StabilityVariant::Thm6Mass: return "thm6-mass";
    }
    return "?";
}

bool lam_pinned(StabilityVariant v)
{
    return v == StabilityVariant::Thm3Dist || v == StabilityVariant::Thm4Dist || v == StabilityVariant::Thm5Dist;
}

StabilityVariant variant_for(TheoremId theorem)
{
    switch (theorem) {
    case TheoremId::Thm1: return StabilityVariant::Thm1Dist;
    case TheoremId::Thm2: return StabilityVariant::Thm2Dist;
    case TheoremId::Thm3: return StabilityVariant::Thm3Dist;
    case TheoremId::Thm4: return StabilityVariant::Thm4Dist;
    case TheoremId::Thm5: return StabilityVariant::Thm5Dist;
    case TheoremId::ThmC: return StabilityVariant::ThmCDist;
    case TheoremId::Thm6: break;
    }
    throw InvalidArgument("thm6 has two distances; use Thm6Grad or Thm6Mass");
}

void check_variant(StabilityVariant v, const CknParams& params, double lam)
{
    const double p = params.p;
    switch (v) {
    case StabilityVariant::Thm1Dist:
    case StabilityVariant::Thm3Dist:
        if (!(p > 1.0 && p < 2.0))
            throw InvalidArgument(std::string(to_string(v)) + " distance needs 1 < p < 2");
        break;
    case StabilityVariant::Thm2Dist:
    case StabilityVariant::Thm4Dist:
    case StabilityVariant::Thm5Dist:
    case StabilityVariant::ThmCDist:
        if (!(p >= 2.0))
            throw InvalidArgument(std::string(to_string(v)) + " distance needs p >= 2");
        break;
    case StabilityVariant::Thm6Grad:
    case StabilityVariant::Thm6Mass:
        break;
    }
    if (!(lam > 0.0))
        throw InvalidArgument("lam must be > 0");
    if (lam_pinned(v) && lam != 1.0)
        throw InvalidArgument(std::string(to_string(v)) + " distance pins lam = 1");
}

bool half_power_weights_agree(const CknParams& params)
{
    if (params.N == 2)
        return false;
    const double pa = params.mass_weight();
    const double other = params.N * (pa + 2.0 * params.b - 2.0 * params.a) / (params.N - 2.0);
    return approx_equal(other, pa);
}

namespace {

// omega int |x - y|^q r^{N-1-gamma}; near the manifold this is pure
// cancellation, so refinement is measured against |x|^q + |y|^q.
QuadResult difference_norm(const RadialProfile& x, const RadialProfile& y, bool derivative, double q, double gamma,
                           int N, const QuadratureScheme& scheme)
{
    auto val = [derivative](const RadialProfile& f, double r) { return derivative ? f.deriv(r) : f.eval(r); };
    const double w = N - 1.0 - gamma;
    auto g = [&](double r) {
        const double d = val(x, r) - val(y, r);
        return d == 0.0 ? 0.0 : std::pow(std::abs(d), q) * std::pow(r, w);
    };
    auto m = [&](double r) {
        return (std::pow(std::abs(val(x, r)), q) + std::pow(std::abs(val(y, r)), q)) * std::pow(r, w);
    };
    if (x.is_zero() && y.is_zero())
        return {};
    double lo = std::min(x.is_zero() ? y.lo() : x.lo(), y.is_zero() ? x.lo() : y.lo());
    double hi = std::max(x.is_zero() ? y.hi() : x.hi(), y.is_zero() ? x.hi() : y.hi());
    Decay decay = slower(power_decay(x.decay(), derivative, q, w), power_decay(y.decay(), derivative, q, w));
    for (const RadialProfile* f : {&x, &y})
        if (!f->is_zero() && f->decay().kind == Decay::Kind::Compact)
            decay = with_onset(decay, f->hi());
    QuadResult res = integrate(g, lo, hi, scheme, decay, nullptr, m);
    const double omega = sphere_area(N);
    res.value *= omega;
    res.abs_value *= omega;
    res.error_estimate *= omega;
    res.tail_bound *= omega;
    res.origin_term *= omega;
    return res;
}

void accumulate(QuadResult& into, const QuadResult& more)
{
    into.value += more.value;
    into.abs_value += more.abs_value;
    into.error_estimate += more.error_estimate;
    into.tail_bound += more.tail_bound;
    into.origin_term += more.origin_term;
    into.panels += more.panels;
    into.warnings.insert(into.warnings.end(), more.warnings.begin(), more.warnings.end());
}

} // namespace

QuadResult stability_distance_result(const RadialProfile& u, const CknParams& params, StabilityVariant v,
                                     double c, double lam, const QuadratureScheme& scheme)
{
    check_variant(v, params, lam);
    const double p = params.p;
    const int N = params.N;
    const RadialProfile e = extremal_profile(params, c, lam);
    switch (v) {
    case StabilityVariant::Thm1Dist:
    case StabilityVariant::Thm3Dist:
        return difference_norm(half_power_transform(u, p), half_power_transform(e, p), false, 2.0,
                               params.mass_weight(), N, scheme);
    case StabilityVariant::Thm2Dist:
    case StabilityVariant::Thm6Mass:
        return difference_norm(u, e, false, p, params.mass_weight(), N, scheme);
    case StabilityVariant::Thm6Grad:
        return difference_norm(u, e, true, p, params.grad_weight(), N, scheme);
    case StabilityVariant::Thm4Dist: {
        QuadResult g = difference_norm(u, e, true, p, params.grad_weight(), N, scheme);
        accumulate(g, difference_norm(u, e, false, p, params.mass_weight(), N, scheme));
        return g;
    }
    case StabilityVariant::Thm5Dist:
    case StabilityVariant::ThmCDist:
        return difference_norm(u, e, false, p, params.mixed_weight(), N, scheme);
    }
    throw InvalidArgument("unknown stability variant");
}

double stability_distance(const RadialProfile& u, const CknParams& params, StabilityVariant v, double c,
                          double lam, const QuadratureScheme& scheme)
{
    return stability_distance_result(u, params, v, c, lam, scheme).value;
}

} // namespace ckn
