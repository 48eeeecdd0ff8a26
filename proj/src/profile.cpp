#include "ckn/profile.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ckn/errors.hpp"

namespace ckn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json limit_json(double x)
{
    if (std::isinf(x))
        return nullptr;
    return x;
}

double limit_from_json(const nlohmann::json& j)
{
    if (j.is_null())
        return kInf;
    return j.get<double>();
}

std::string num(double x)
{
    std::ostringstream os;
    os << x;
    return os.str();
}

} // namespace

RadialProfile::RadialProfile(Fn f, Fn df, double lo, double hi, Decay decay, std::string label,
                             nlohmann::json descriptor)
    : f_(std::move(f)), df_(std::move(df)), lo_(lo), hi_(hi), decay_(decay),
      label_(std::move(label)), descriptor_(std::move(descriptor))
{
    if (!(lo_ >= 0.0) || !(hi_ >= lo_))
        throw InvalidArgument("profile support must satisfy 0 <= lo <= hi");
    if (decay_.kind == Decay::Kind::Compact && std::isinf(hi_) && f_)
        throw InvalidArgument("compact decay needs a bounded support");
    descriptor_["label"] = label_;
}

RadialProfile zero_profile()
{
    return RadialProfile({}, {}, 0.0, 0.0, Decay::compact(), "zero", {{"kind", "zero"}});
}

RadialProfile bump_profile(double r0, double r1, double amplitude)
{
    if (!(r0 > 0.0 && r1 > r0))
        throw InvalidArgument("bump_profile needs 0 < r0 < r1");
    nlohmann::json d = {{"kind", "bump"}, {"r0", r0}, {"r1", r1}, {"amplitude", amplitude}};
    std::string label = "bump[" + num(r0) + "," + num(r1) + "]";
    if (amplitude == 0.0)
        return RadialProfile({}, {}, r0, r1, Decay::compact(), label, d);
    auto f = [=](double r) {
        const double q = (r - r0) * (r1 - r);
        return q > 0.0 ? amplitude * std::exp(-1.0 / q) : 0.0;
    };
    auto df = [=](double r) {
        const double q = (r - r0) * (r1 - r);
        if (!(q > 0.0))
            return 0.0;
        const double v = amplitude * std::exp(-1.0 / q);
        if (v == 0.0)
            return 0.0;
        return v * ((r0 + r1 - 2.0 * r) / q) / q;
    };
    return RadialProfile(f, df, r0, r1, Decay::compact(), label, d);
}

RadialProfile unit_bump(double r0, double r1, double peak)
{
    const double w = r1 - r0;
    return bump_profile(r0, r1, peak * std::exp(4.0 / (w * w)));
}

RadialProfile extremal_profile(const CknParams& params, double c, double lam)
{
    const double s = params.manifold_exponent();
    if (!(s > 0.0))
        throw InvalidArgument("extremal_profile needs b - a + 1 > 0");
    if (!(lam > 0.0))
        throw InvalidArgument("extremal_profile needs lam > 0");
    nlohmann::json d = {{"kind", "extremal"}, {"N", params.N}, {"p", params.p}, {"a", params.a},
                        {"b", params.b},      {"c", c},        {"lam", lam}};
    const std::string label = "extremal(c=" + num(c) + ",lam=" + num(lam) + ")";
    const double ls = std::pow(lam, s);
    const Decay decay = Decay::stretched(1.0 / (s * ls), s, 0.0);
    if (c == 0.0)
        return RadialProfile({}, {}, 0.0, kInf, decay, label, d);
    auto f = [=](double r) { return c * std::exp(-std::pow(r, s) / (s * ls)); };
    auto df = [=](double r) {
        const double v = c * std::exp(-std::pow(r, s) / (s * ls));
        return -v * std::pow(r, s - 1.0) / ls;
    };
    return RadialProfile(f, df, 0.0, kInf, decay, label, d);
}

RadialProfile extremal_profile_q(int N, double a, double b, double alpha, double beta)
{
    const double s = b - a + 1.0;
    if (s == 0.0)
        throw InvalidArgument("extremal_profile_q needs b != a - 1");
    const double mu = 2.0 * (b + 1.0) - N;
    nlohmann::json d = {{"kind", "extremal_q"}, {"N", N},        {"a", a},
                        {"b", b},               {"alpha", alpha}, {"beta", beta}};
    const std::string label = "extremal_q(alpha=" + num(alpha) + ",beta=" + num(beta) + ")";
    Decay decay = Decay::algebraic(mu);
    if (s > 0.0 && beta != 0.0)
        decay = Decay::stretched(-beta / s, s, mu); // negative rate records growth
    if (alpha == 0.0)
        return RadialProfile({}, {}, 0.0, kInf, decay, label, d);
    auto f = [=](double r) { return alpha * std::pow(r, mu) * std::exp(beta * std::pow(r, s) / s); };
    auto df = [=](double r) {
        const double v = alpha * std::pow(r, mu) * std::exp(beta * std::pow(r, s) / s);
        return v * (mu / r + beta * std::pow(r, s - 1.0));
    };
    return RadialProfile(f, df, 0.0, kInf, decay, label, d);
}

RadialProfile power_profile(double mu, double c, double lo, double hi)
{
    nlohmann::json d = {{"kind", "power"}, {"mu", mu}, {"c", c}, {"lo", lo}, {"hi", limit_json(hi)}};
    const std::string label = "power(mu=" + num(mu) + ")";
    const Decay decay = std::isinf(hi) ? Decay::algebraic(mu) : Decay::compact();
    if (c == 0.0)
        return RadialProfile({}, {}, lo, hi, decay, label, d);
    auto f = [=](double r) { return c * std::pow(r, mu); };
    auto df = [=](double r) { return mu == 0.0 ? 0.0 : c * mu * std::pow(r, mu - 1.0); };
    return RadialProfile(f, df, lo, hi, decay, label, d);
}

RadialProfile half_power_transform(const RadialProfile& u, double p)
{
    if (!(p > 1.0))
        throw InvalidArgument("half_power_transform needs p > 1");
    nlohmann::json d = {{"kind", "half_power"}, {"p", p}, {"base", u.descriptor()}};
    const std::string label = "half_power(" + u.label() + ")";
    Decay decay = u.decay();
    decay.rate *= 0.5 * p;
    decay.power *= 0.5 * p;
    if (u.is_zero())
        return RadialProfile({}, {}, u.lo(), u.hi(), decay, label, d);
    auto f = [=](double r) {
        const double v = u.eval(r);
        return v == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(v), 0.5 * p), v);
    };
    auto df = [=](double r) {
        const double v = u.eval(r);
        return v == 0.0 ? 0.0 : 0.5 * p * std::pow(std::abs(v), 0.5 * (p - 2.0)) * u.deriv(r);
    };
    return RadialProfile(f, df, u.lo(), u.hi(), decay, label, d);
}

RadialProfile dilate(const RadialProfile& u, double lam, double prefactor)
{
    if (!(lam > 0.0))
        throw InvalidArgument("dilation factor must be > 0");
    nlohmann::json d = {{"kind", "dilate"}, {"lam", lam}, {"prefactor", prefactor}, {"base", u.descriptor()}};
    const std::string label = "dilate(" + u.label() + ",lam=" + num(lam) + ")";
    Decay decay = u.decay();
    if (decay.kind == Decay::Kind::StretchedExp)
        decay.rate *= std::pow(lam, decay.exponent);
    decay.onset /= lam;
    const double lo = u.lo() / lam;
    const double hi = u.hi() / lam;
    if (u.is_zero() || prefactor == 0.0)
        return RadialProfile({}, {}, lo, hi, decay, label, d);
    auto f = [=](double r) { return prefactor * u.eval(lam * r); };
    auto df = [=](double r) { return prefactor * lam * u.deriv(lam * r); };
    return RadialProfile(f, df, lo, hi, decay, label, d);
}

RadialProfile perturb(const RadialProfile& v, double eps, const RadialProfile& bump)
{
    nlohmann::json d = {{"kind", "perturbed"}, {"eps", eps}, {"base", v.descriptor()},
                        {"bump", bump.descriptor()}};
    const std::string label = "perturbed(" + v.label() + ",eps=" + num(eps) + "," + bump.label() + ")";
    if (v.is_zero())
        return RadialProfile({}, {}, v.lo(), v.hi(), v.decay(), label, d);
    auto f = [=](double r) { return v.eval(r) * (1.0 + eps * bump.eval(r)); };
    auto df = [=](double r) {
        return v.deriv(r) * (1.0 + eps * bump.eval(r)) + v.eval(r) * eps * bump.deriv(r);
    };
    return RadialProfile(f, df, v.lo(), v.hi(), v.decay(), label, d);
}

RadialProfile combine(const std::vector<std::pair<double, RadialProfile>>& terms)
{
    nlohmann::json list = nlohmann::json::array();
    std::string label = "sum(";
    double lo = kInf;
    double hi = 0.0;
    Decay decay = Decay::compact();
    std::vector<std::pair<double, RadialProfile>> live;
    for (const auto& [w, u] : terms) {
        list.push_back({{"weight", w}, {"profile", u.descriptor()}});
        label += (label.size() > 4 ? "," : "") + num(w) + "*" + u.label();
        if (w == 0.0 || u.is_zero())
            continue;
        live.emplace_back(w, u);
        lo = std::min(lo, u.lo());
        hi = std::max(hi, u.hi());
        decay = slower(decay, u.decay());
        if (u.decay().kind == Decay::Kind::Compact)
            decay = with_onset(decay, u.hi());
    }
    label += ")";
    nlohmann::json d = {{"kind", "sum"}, {"terms", list}};
    if (live.empty())
        return RadialProfile({}, {}, 0.0, 0.0, Decay::compact(), label, d);
    auto f = [live](double r) {
        double s = 0.0;
        for (const auto& [w, u] : live)
            s += w * u.eval(r);
        return s;
    };
    auto df = [live](double r) {
        double s = 0.0;
        for (const auto& [w, u] : live)
            s += w * u.deriv(r);
        return s;
    };
    return RadialProfile(f, df, lo, hi, decay, label, d);
}

RadialProfile affine(const RadialProfile& u, double t, double s)
{
    nlohmann::json d = {{"kind", "affine"}, {"t", t}, {"s", s}, {"base", u.descriptor()}};
    const std::string label = num(t) + "*" + u.label() + "+" + num(s);
    if (s == 0.0) {
        if (t == 0.0 || u.is_zero())
            return RadialProfile({}, {}, u.lo(), u.hi(), u.decay(), label, d);
        return RadialProfile([=](double r) { return t * u.eval(r); },
                             [=](double r) { return t * u.deriv(r); }, u.lo(), u.hi(), u.decay(),
                             label, d);
    }
    const Decay decay = with_onset(slower(u.decay(), Decay::algebraic(0.0)), u.hi());
    return RadialProfile([=](double r) { return t * u.eval(r) + s; },
                         [=](double r) { return t * u.deriv(r); }, 0.0, kInf, decay, label, d);
}

RadialProfile smooth_truncate(const RadialProfile& u, double r_flat, double r_cut)
{
    if (!(r_flat > 0.0 && r_cut > r_flat))
        throw InvalidArgument("smooth_truncate needs 0 < r_flat < r_cut");
    nlohmann::json d = {{"kind", "truncated"}, {"r_flat", r_flat}, {"r_cut", r_cut}, {"base", u.descriptor()}};
    const std::string label = "truncated(" + u.label() + "," + num(r_cut) + ")";
    const double hi = std::min(u.hi(), r_cut);
    const double lo = std::min(u.lo(), hi);
    if (u.is_zero())
        return RadialProfile({}, {}, lo, hi, Decay::compact(), label, d);
    auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    auto chi = [=](double r) {
        if (r <= r_flat)
            return 1.0;
        if (r >= r_cut)
            return 0.0;
        const double A = psi(r_cut - r);
        const double B = psi(r - r_flat);
        return A / (A + B);
    };
    auto dchi = [=](double r) {
        if (r <= r_flat || r >= r_cut)
            return 0.0;
        const double ta = r_cut - r;
        const double tb = r - r_flat;
        const double A = psi(ta);
        const double B = psi(tb);
        const double dA = -A / (ta * ta);
        const double dB = B / (tb * tb);
        const double S = A + B;
        return (dA * B - A * dB) / (S * S);
    };
    return RadialProfile([=](double r) { return u.eval(r) * chi(r); },
                         [=](double r) { return u.deriv(r) * chi(r) + u.eval(r) * dchi(r); }, lo, hi,
                         Decay::compact(), label, d);
}

RadialProfile profile_from_json(const nlohmann::json& j)
{
    try {
        const std::string kind = j.at("kind").get<std::string>();
        RadialProfile out;
        if (kind == "zero")
            out = zero_profile();
        else if (kind == "bump")
            out = bump_profile(j.at("r0"), j.at("r1"), j.at("amplitude"));
        else if (kind == "extremal")
            out = extremal_profile(CknParams::make(j.at("N"), j.at("p"), j.at("a"), j.at("b")), j.at("c"),
                                   j.at("lam"));
        else if (kind == "extremal_q")
            out = extremal_profile_q(j.at("N"), j.at("a"), j.at("b"), j.at("alpha"), j.at("beta"));
        else if (kind == "power")
            out = power_profile(j.at("mu"), j.at("c"), j.at("lo"), limit_from_json(j.at("hi")));
        else if (kind == "half_power")
            out = half_power_transform(profile_from_json(j.at("base")), j.at("p"));
        else if (kind == "dilate")
            out = dilate(profile_from_json(j.at("base")), j.at("lam"), j.at("prefactor"));
        else if (kind == "perturbed")
            out = perturb(profile_from_json(j.at("base")), j.at("eps"), profile_from_json(j.at("bump")));
        else if (kind == "sum") {
            std::vector<std::pair<double, RadialProfile>> terms;
            for (const auto& t : j.at("terms"))
                terms.emplace_back(t.at("weight").get<double>(), profile_from_json(t.at("profile")));
            out = combine(terms);
        } else if (kind == "affine")
            out = affine(profile_from_json(j.at("base")), j.at("t"), j.at("s"));
        else if (kind == "truncated")
            out = smooth_truncate(profile_from_json(j.at("base")), j.at("r_flat"), j.at("r_cut"));
        else
            throw InvalidArgument("unknown profile kind '" + kind + "'");
        if (j.contains("label"))
            out.set_label(j.at("label").get<std::string>());
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed profile descriptor: ") + e.what());
    }
}

double sphere_area(int N)
{
    if (N < 1)
        throw InvalidArgument("sphere_area needs N >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

QuadResult weighted_norm_result(const RadialProfile& u, bool use_derivative, double q, double gamma,
                                int N, const QuadratureScheme& scheme)
{
    if (!(q > 0.0))
        throw InvalidArgument("weighted_norm_term needs an exponent > 0");
    if (u.is_zero())
        return {};
    const double w = N - 1.0 - gamma;
    auto g = [&](double r) {
        const double h = use_derivative ? u.deriv(r) : u.eval(r);
        return h == 0.0 ? 0.0 : std::pow(std::abs(h), q) * std::pow(r, w);
    };
    QuadResult res = integrate(g, u.lo(), u.hi(), scheme, power_decay(u.decay(), use_derivative, q, w));
    if (u.lo() == 0.0 && !(w > -1.0) && res.origin_term == 0.0)
        res.warnings.push_back("weight exponent " + num(w) + " may not be integrable at the origin");
    const double omega = sphere_area(N);
    res.value *= omega;
    res.abs_value *= omega;
    res.error_estimate *= omega;
    res.tail_bound *= omega;
    res.origin_term *= omega;
    return res;
}

double weighted_norm_term(const RadialProfile& u, bool use_derivative, double q, double gamma, int N,
                          const QuadratureScheme& scheme)
{
    return weighted_norm_result(u, use_derivative, q, gamma, N, scheme).value;
}

} // namespace ckn
