#include "ckn/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "ckn/errors.hpp"
#include "ckn/optimize.hpp"
#include "ckn/parallel.hpp"

namespace ckn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel_diff(double x, double y)
{
    const double s = std::max(std::abs(x), std::abs(y));
    return s == 0.0 ? 0.0 : std::abs(x - y) / s;
}

} // namespace

// Corpus ---------------------------------------------------------------------

std::vector<std::pair<std::size_t, std::size_t>> Corpus::pairs() const
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t j = 0; j < params_sets.size(); ++j)
        for (std::size_t i = 0; i < profiles.size(); ++i)
            if (!profiles[i].params_index || *profiles[i].params_index == j)
                out.emplace_back(i, j);
    return out;
}

Corpus Corpus::only_kind(const std::string& kind) const
{
    Corpus out{params_sets, {}, seed};
    for (const CorpusEntry& e : profiles)
        if (e.kind == kind)
            out.profiles.push_back(e);
    return out;
}

Corpus Corpus::for_params(std::size_t index) const
{
    if (index >= params_sets.size())
        throw InvalidArgument("for_params: index out of range");
    Corpus out{{params_sets[index]}, {}, seed};
    for (const CorpusEntry& e : profiles)
        if (!e.params_index || *e.params_index == index) {
            CorpusEntry c = e;
            if (c.params_index)
                c.params_index = 0;
            out.profiles.push_back(std::move(c));
        }
    return out;
}

nlohmann::json Corpus::to_json() const
{
    nlohmann::json j;
    j["seed"] = seed;
    j["params_sets"] = nlohmann::json::array();
    for (const CknParams& q : params_sets)
        j["params_sets"].push_back({{"N", q.N}, {"p", q.p}, {"a", q.a}, {"b", q.b}});
    j["profiles"] = nlohmann::json::array();
    for (const CorpusEntry& e : profiles) {
        nlohmann::json row = {{"kind", e.kind}, {"eps", e.eps}, {"profile", e.profile.descriptor()}};
        row["params_index"] = e.params_index ? nlohmann::json(*e.params_index) : nlohmann::json(nullptr);
        j["profiles"].push_back(std::move(row));
    }
    return j;
}

Corpus build_default_corpus(const std::vector<CknParams>& params_sets, std::uint64_t seed)
{
    if (params_sets.empty())
        throw InvalidArgument("build_default_corpus needs at least one parameter set");
    Corpus c{params_sets, {}, seed};
    const std::pair<double, double> placements[2] = {{0.3, 1.2}, {0.8, 2.5}};
    for (std::size_t j = 0; j < params_sets.size(); ++j) {
        const CknParams& q = params_sets[j];
        for (int k = 0; k < 5; ++k) {
            SampleRng rng(seed, 1000 * j + k);
            const double r0 = rng.log_uniform(0.1, 3.0);
            const double r1 = std::min(10.0, r0 * rng.uniform(1.5, 4.0));
            const double peak = rng.uniform(0.5, 2.0);
            c.profiles.push_back({unit_bump(r0, r1, peak), "bump", 0.0, j});
        }
        for (double lam : {0.5, 1.0, 2.0})
            c.profiles.push_back({extremal_profile(q, 1.0, lam), "extremal", 0.0, j});
        const RadialProfile base = extremal_profile(q, 1.0, 1.0);
        for (double eps : {0.01, 0.1, 0.5})
            for (const auto& [r0, r1] : placements)
                c.profiles.push_back({perturb(base, eps, unit_bump(r0, r1)), "perturbed", eps, j});
        const Region region = classify_region(q.N, q.a, q.b);
        if (q.p == 2.0 && (is_q_region(region) || also_in_q(q.N, q.a, q.b)))
            c.profiles.push_back({extremal_profile_q(q.N, q.a, q.b, 1.0, -1.0), "q-extremal", 0.0, j});
    }
    return c;
}

std::optional<std::string> integrability_issue(const RadialProfile& u, const CknParams& params,
                                               const QuadratureScheme& scheme)
{
    if (u.is_zero())
        return std::nullopt;
    try {
        const CknTerms t = ckn_terms(u, params, scheme);
        for (const QuadResult* r : {&t.grad_q, &t.mass_q, &t.mixed_q}) {
            if (!r->warnings.empty())
                return r->warnings.front();
            if (!std::isfinite(r->value))
                return std::string("term is not finite");
        }
    } catch (const Error& e) {
        return std::string(e.what());
    }
    return std::nullopt;
}

// Identity campaign -----------------------------------------------------------

IdentityReport verify_identities(const Corpus& corpus, const QuadratureScheme& scheme, Exec exec, double tolerance)
{
    const auto pairs = corpus.pairs();
    IdentityReport rep;
    rep.tolerance = tolerance;
    rep.rows.resize(pairs.size());
    parallel_for(static_cast<std::int64_t>(pairs.size()), exec, [&](std::int64_t k) {
        const auto [i, j] = pairs[k];
        const RadialProfile& u = corpus.profiles[i].profile;
        const CknParams& q = corpus.params_sets[j];
        IdentityRow& row = rep.rows[k];
        row.profile_index = i;
        row.params_index = j;
        row.label = u.label();
        row.params = q;
        if (u.is_zero()) {
            row.skipped = true;
            row.note = "zero function";
            return;
        }
        if (!identity_hypotheses_hold(q)) {
            row.skipped = true;
            row.note = "identity hypotheses fail";
            return;
        }
        const CknTerms t = ckn_terms(u, q, scheme);
        const double p = q.p;
        const double defect = q.scaling_defect();
        row.lhs_41 = t.grad + (p - 1.0) * t.mass - defect * t.mixed;
        row.rhs_41 = identity_rhs_41(u, q, scheme);
        row.residual_41 = std::abs(row.lhs_41 - row.rhs_41) /
                          (t.grad + (p - 1.0) * t.mass + std::abs(defect) * t.mixed);
        const double lead = std::pow(t.grad, 1.0 / p) * std::pow(t.mass, (p - 1.0) / p);
        row.lhs_42 = lead - defect / p * t.mixed;
        row.rhs_42 = identity_rhs_42(u, q, scheme, &t);
        row.residual_42 = std::abs(row.lhs_42 - row.rhs_42) / (lead + std::abs(defect) / p * t.mixed);
        row.passed = row.residual_41 <= tolerance && row.residual_42 <= tolerance;
    });
    for (const IdentityRow& row : rep.rows) {
        if (row.skipped) {
            ++rep.skipped_count;
            continue;
        }
        (row.passed ? rep.pass_count : rep.fail_count)++;
        rep.max_residual = std::max({rep.max_residual, row.residual_41, row.residual_42});
    }
    return rep;
}

// Stability constants ---------------------------------------------------------

bool uses_scale_invariant_deficit(TheoremId theorem)
{
    return theorem == TheoremId::Thm1 || theorem == TheoremId::Thm2 || theorem == TheoremId::ThmC;
}

StabilityEstimate estimate_stability_constant(const Corpus& corpus, const CknParams& params, TheoremId theorem,
                                              const QuadratureScheme& scheme, const ProjectionConfig& cfg)
{
    if (theorem == TheoremId::Thm6)
        throw InvalidArgument("thm6 is a nonexistence statement; use counterexample_search");
    if (!hypotheses_hold(theorem, params))
        throw HypothesisViolation(std::string(to_string(theorem)) + " hypotheses fail for " + params.describe());
    std::vector<std::size_t> members;
    for (const auto& [i, j] : corpus.pairs())
        if (corpus.params_sets[j] == params &&
            std::find(members.begin(), members.end(), i) == members.end())
            members.push_back(i);
    if (members.empty())
        throw InvalidArgument("estimate_stability_constant: no corpus entry applies to " + params.describe());

    const StabilityVariant variant = variant_for(theorem);
    StabilityEstimate est;
    est.theorem = theorem;
    est.params = params;
    est.rows.resize(members.size());
    ProjectionConfig inner = cfg;
    inner.exec = Exec::serial();
    parallel_for(static_cast<std::int64_t>(members.size()), cfg.exec, [&](std::int64_t k) {
        const CorpusEntry& e = corpus.profiles[members[k]];
        StabilityRow& row = est.rows[k];
        row.profile_index = members[k];
        row.label = e.profile.label();
        row.kind = e.kind;
        row.eps = e.eps;
        if (e.profile.is_zero()) {
            row.excluded = true;
            row.note = "zero function";
            return;
        }
        const CknTerms t = ckn_terms(e.profile, params, scheme);
        const DeficitValue d =
            uses_scale_invariant_deficit(theorem) ? deficit_si(t, scheme.rel_tol) : deficit_sni(t, scheme.rel_tol);
        row.deficit = d.value;
        row.deficit_condition = d.condition;
        if (theorem == TheoremId::Thm1 || theorem == TheoremId::Thm2)
            row.prefactor = std::pow(t.grad / t.mass, 1.0 / params.p);
        row.projection = project(e.profile, params, variant, scheme, inner);
        if (!(row.projection.distance >= 1e3 * row.projection.distance_condition)) {
            row.excluded = true;
            row.note = "distance below resolution";
            return;
        }
        row.ratio = row.deficit / (row.prefactor * row.projection.distance);
        if (row.projection.boundary_hit)
            row.note = "lam window edge";
    });
    est.value = kInf;
    for (const StabilityRow& row : est.rows) {
        if (row.excluded) {
            ++est.excluded_count;
            continue;
        }
        ++est.included_count;
        if (row.ratio < est.value) {
            est.value = row.ratio;
            est.witness_label = row.label;
        }
    }
    if (est.included_count == 0)
        throw AllExcluded("every corpus member is within resolution of the extremal manifold");
    return est;
}

// Scaling laws ---------------------------------------------------------------

ScalingReport scaling_law_check(const RadialProfile& u, const CknParams& params, double lam,
                                const QuadratureScheme& scheme)
{
    ScalingReport r;
    r.lam = lam;
    const CknTerms t0 = ckn_terms(u, params, scheme);
    const CknTerms t1 = ckn_terms(scale_transform(u, params, lam), params, scheme);
    r.delta_ratio = deficit_si(t1, scheme.rel_tol).value / deficit_si(t0, scheme.rel_tol).value;
    r.grad_ratio = t1.grad / t0.grad;
    r.grad_expected = std::pow(lam, (params.p - 1.0) * (params.b + 1.0 - params.a));
    r.mass_ratio = t1.mass / t0.mass;
    r.mass_expected = std::pow(lam, params.a - params.b - 1.0);
    r.mixed_ratio = t1.mixed / t0.mixed;
    r.max_rel_error = std::max({std::abs(r.delta_ratio - 1.0), rel_diff(r.grad_ratio, r.grad_expected),
                                rel_diff(r.mass_ratio, r.mass_expected), std::abs(r.mixed_ratio - 1.0)});
    return r;
}

// Poincare checks ------------------------------------------------------------

void PoincareConfig::validate(int N) const
{
    if (!(p > 1.0))
        throw InvalidArgument("poincare: p must be > 1");
    if (!(N > p))
        throw InvalidArgument("poincare: needs N > p");
    if (!(sigma > 0.0))
        throw InvalidArgument("poincare: sigma must be > 0");
    if (!(rho >= 0.0 && rho < N - p))
        throw InvalidArgument("poincare: needs 0 <= rho < N - p");
    if (!(theta >= (N - p - rho) / (N - p)))
        throw InvalidArgument("poincare: needs theta >= (N-p-rho)/(N-p)");
    if (!(lam > 0.0))
        throw InvalidArgument("poincare: lam must be > 0");
    if (all)
        return;
    if (annuli.empty())
        throw InvalidArgument("poincare: degenerate domain (no annuli)");
    double prev = 0.0;
    for (const auto& [lo, hi] : annuli) {
        if (!(lo > 0.0 && hi > lo && std::isfinite(hi)))
            throw InvalidArgument("poincare: annulus needs 0 < r < R < inf");
        if (lo < prev)
            throw InvalidArgument("poincare: annuli must be sorted and disjoint");
        prev = hi;
    }
}

std::string PoincareConfig::domain_text() const
{
    if (all)
        return "all";
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < annuli.size(); ++i)
        os << (i ? "u" : "") << "[" << annuli[i].first << ";" << annuli[i].second << "]";
    return os.str();
}

namespace {

struct PoincareSetup {
    std::vector<std::pair<double, double>> pieces;
    double rate = 0.0; // sigma / lam^theta
};

double sum_over(const PoincareSetup& s, const std::function<QuadResult(double, double)>& piece,
                double* abs_value = nullptr, double* error = nullptr)
{
    double v = 0.0;
    for (const auto& [lo, hi] : s.pieces) {
        const QuadResult r = piece(lo, hi);
        v += r.value;
        if (abs_value)
            *abs_value += r.abs_value;
        if (error)
            *error += r.error_estimate;
    }
    return v;
}

} // namespace

PoincareReport poincare_check(const RadialProfile& f, const PoincareConfig& cfg, int N, const QuadratureScheme& scheme)
{
    cfg.validate(N);
    const double p = cfg.p;
    PoincareSetup s;
    s.rate = cfg.sigma / std::pow(cfg.lam, cfg.theta);
    if (cfg.all)
        s.pieces.emplace_back(0.0, kInf);
    else
        s.pieces = cfg.annuli;
    const double omega = sphere_area(N);
    const double w1 = N - 1.0 - cfg.rho;
    const double w2 = N - 1.0 - N * cfg.rho / (N - p);
    auto weight = [&](double r, double w) { return std::pow(r, w) * std::exp(-s.rate * std::pow(r, cfg.theta)); };
    const double grow = f.decay().kind == Decay::Kind::Algebraic ? std::max(0.0, f.decay().power) : 0.0;
    const double onset = f.decay().kind == Decay::Kind::Compact ? f.hi() : f.decay().onset;

    PoincareReport rep;
    // Gradient side.
    const Decay dtail = with_onset(Decay::stretched(s.rate, cfg.theta, w1 + p * grow), onset);
    rep.lhs = std::pow(cfg.lam, p * (N - p - cfg.rho) / (N - p)) * omega * sum_over(s, [&](double lo, double hi) {
                  if (f.is_zero())
                      return QuadResult{};
                  auto g = [&](double r) {
                      const double d = f.deriv(r);
                      return d == 0.0 ? 0.0 : std::pow(std::abs(d), p) * weight(r, w1);
                  };
                  return integrate(g, std::max(lo, f.lo()), std::min(hi, f.hi()), scheme, dtail);
              });

    // Distance to constants: locate c on a captured rule, then evaluate adaptively.
    const Decay vtail = with_onset(Decay::stretched(s.rate, cfg.theta, w2 + p * grow), onset);
    NodeRule rule;
    QuadratureScheme coarse = scheme;
    coarse.rel_tol = std::max(scheme.rel_tol, 1e-9);
    sum_over(s, [&](double lo, double hi) {
        auto g = [&](double r) { return (std::pow(std::abs(f.eval(r)), p) + 1.0) * weight(r, w2); };
        return integrate(g, lo, hi, coarse, vtail, &rule);
    });
    double fmin = kInf;
    double fmax = -kInf;
    std::vector<double> F(rule.r.size());
    std::vector<double> W(rule.r.size());
    for (std::size_t i = 0; i < rule.r.size(); ++i) {
        F[i] = f.eval(rule.r[i]);
        W[i] = rule.w[i] * weight(rule.r[i], w2);
        fmin = std::min(fmin, F[i]);
        fmax = std::max(fmax, F[i]);
    }
    auto value = [&](double c) {
        auto g = [&](double r) {
            const double d = f.eval(r) - c;
            return d == 0.0 ? 0.0 : std::pow(std::abs(d), p) * weight(r, w2);
        };
        auto m = [&](double r) { return (std::pow(std::abs(f.eval(r)), p) + std::pow(std::abs(c), p)) * weight(r, w2); };
        double abs_value = 0.0;
        double error = 0.0;
        const double v = sum_over(s, [&](double lo, double hi) { return integrate(g, lo, hi, scheme, vtail, nullptr, m); },
                                  &abs_value, &error);
        return std::array<double, 3>{omega * v, omega * abs_value, omega * error};
    };
    if (!(fmax > fmin)) {
        rep.c_star = fmin;
    } else if (p == 2.0) {
        // Weighted mean, both integrals adaptive.
        double num = 0.0;
        double den = 0.0;
        for (const auto& [lo, hi] : s.pieces) {
            num += integrate([&](double r) { return f.eval(r) * weight(r, w2); }, lo, hi, scheme, vtail).value;
            den += integrate([&](double r) { return weight(r, w2); }, lo, hi, scheme, vtail).value;
        }
        rep.c_star = num / den;
    } else {
        auto h = [&](double c) {
            long double acc = 0.0L;
            for (std::size_t i = 0; i < F.size(); ++i)
                acc += static_cast<long double>(W[i]) * std::pow(std::abs(F[i] - c), p);
            return acc;
        };
        const double c0 = golden_section(h, fmin, fmax, 1e-12, 400).x;
        // The rule is blind to the kinks of |f - c|^p; polish on the adaptive integral.
        auto exact = [&](double c) { return value(c)[0]; };
        const auto [a, b] = bracket_minimum(exact, c0, 1e-3 * (fmax - fmin));
        rep.c_star = brent_minimize(exact, a, b, 1e-9, 100).x;
    }
    const auto [rhs, abs_value, error] = value(rep.c_star);
    rep.rhs_core = rhs;
    rep.rhs_zero = !(rhs > 1e3 * (scheme.rel_tol * abs_value + error));
    if (rep.rhs_zero) {
        rep.ratio = kInf;
        rep.passed = true;
    } else {
        rep.ratio = rep.lhs / rep.rhs_core;
        rep.passed = rep.ratio > 0.0 && std::isfinite(rep.ratio);
    }
    return rep;
}

PoincareScaling poincare_scaling_check(const RadialProfile& f, const PoincareConfig& cfg, int N,
                                       const QuadratureScheme& scheme, double tolerance)
{
    PoincareScaling out;
    out.original = poincare_check(f, cfg, N, scheme);
    PoincareConfig unit = cfg;
    unit.lam = 1.0;
    for (auto& [lo, hi] : unit.annuli) {
        lo /= cfg.lam;
        hi /= cfg.lam;
    }
    out.rescaled = poincare_check(dilate(f, cfg.lam), unit, N, scheme);
    if (out.original.rhs_zero || out.rescaled.rhs_zero)
        out.rel_diff = out.original.rhs_zero == out.rescaled.rhs_zero ? 0.0 : kInf;
    else
        out.rel_diff = rel_diff(out.original.ratio, out.rescaled.ratio);
    out.passed = out.rel_diff <= tolerance;
    return out;
}

ChangeOfVariablesReport change_of_variables_check(const RadialProfile& f, double k, int N,
                                                  const QuadratureScheme& scheme, double tolerance)
{
    if (!(k >= 1.0))
        throw InvalidArgument("change_of_variables_check needs lam_exp >= 1");
    ChangeOfVariablesReport rep;
    if (f.is_zero()) {
        rep.passed = true;
        return rep;
    }
    const QuadResult l = integrate([&](double s) { return f.eval(s) * std::pow(s, N - 1.0); }, f.lo(), f.hi(), scheme,
                                   power_decay(f.decay(), false, 1.0, N - 1.0));
    Decay d = f.decay();
    switch (d.kind) {
    case Decay::Kind::Compact:
        break;
    case Decay::Kind::StretchedExp:
        d = Decay::stretched(d.rate, d.exponent * k, d.power * k + k * N - 1.0);
        break;
    case Decay::Kind::Algebraic:
        d = Decay::algebraic(d.power * k + k * N - 1.0);
        break;
    }
    d = with_onset(d, std::pow(f.decay().onset, 1.0 / k));
    const QuadResult r = integrate([&](double t) { return f.eval(std::pow(t, k)) * std::pow(t, k * N - 1.0); },
                                   std::pow(f.lo(), 1.0 / k), std::pow(f.hi(), 1.0 / k), scheme, d);
    rep.lhs = l.value;
    rep.rhs = k * r.value;
    const double s = std::max(std::abs(rep.lhs), l.abs_value);
    rep.rel_diff = s == 0.0 ? 0.0 : std::abs(rep.lhs - rep.rhs) / s;
    rep.passed = rep.rel_diff <= tolerance;
    return rep;
}

// Quadrature stability -------------------------------------------------------

NodeDoublingReport node_doubling_check(const Corpus& corpus, const QuadratureScheme& scheme, Exec exec)
{
    const auto pairs = corpus.pairs();
    QuadratureScheme fine = scheme;
    fine.nodes_per_panel = 2 * scheme.nodes_per_panel;
    std::vector<double> diffs(pairs.size(), 0.0);
    parallel_for(static_cast<std::int64_t>(pairs.size()), exec, [&](std::int64_t k) {
        const auto [i, j] = pairs[k];
        const RadialProfile& u = corpus.profiles[i].profile;
        if (u.is_zero())
            return;
        const CknTerms a = ckn_terms(u, corpus.params_sets[j], scheme);
        const CknTerms b = ckn_terms(u, corpus.params_sets[j], fine);
        diffs[k] = std::max({rel_diff(a.grad, b.grad), rel_diff(a.mass, b.mass), rel_diff(a.mixed, b.mixed)});
    });
    NodeDoublingReport rep;
    rep.pairs = static_cast<int>(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (k == 0 || diffs[k] > rep.max_rel_diff) {
            rep.max_rel_diff = diffs[k];
            rep.worst_label = corpus.profiles[pairs[k].first].profile.label();
        }
    return rep;
}

} // namespace ckn
