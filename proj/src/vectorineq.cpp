#include "ckn/vectorineq.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ckn/errors.hpp"
#include "ckn/gauss.hpp"
#include "ckn/parallel.hpp"

namespace ckn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Below this ratio |Y-X|/|X| the direct formula loses digits to cancellation.
constexpr double kTaylorSwitch = 0.25;
constexpr int kTaylorOrder = 24;

double norm(std::span<const double> v)
{
    double s = 0.0;
    for (double c : v)
        s += c * c;
    return std::sqrt(s);
}

double dot(std::span<const double> u, std::span<const double> v)
{
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += u[i] * v[i];
    return s;
}

void require_same_dim(std::span<const double> u, std::span<const double> v)
{
    if (u.size() != v.size() || u.empty())
        throw InvalidArgument("vector arguments must be non-empty and of equal dimension");
}

void require_p(double p)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw InvalidArgument("exponent p must be a finite real > 1");
}

bool violates(double margin, double lhs, double rhs, double rel_tol = 1e-12)
{
    return margin < -rel_tol * std::max(std::abs(lhs), std::abs(rhs));
}

} // namespace

double g_p(std::span<const double> X, std::span<const double> Y, double p)
{
    require_same_dim(X, Y);
    require_p(p);
    const std::size_t d = X.size();
    std::vector<double> D(d);
    for (std::size_t i = 0; i < d; ++i)
        D[i] = Y[i] - X[i];
    const double nd = norm(D);
    const double nx = norm(X);
    if (nd == 0.0)
        return 0.0;
    if (nx == 0.0)
        return std::pow(nd, p);
    if (nd > kTaylorSwitch * nx) {
        const double ny = norm(Y);
        return std::pow(ny, p) - std::pow(nx, p) - p * std::pow(nx, p - 2.0) * dot(X, D);
    }
    // g = int_0^1 (1-t) D^T H(X + tD) D dt with H(V) = p|V|^{p-2}(I + (p-2) V V^T/|V|^2).
    const GaussRule& rule = gauss_legendre(kTaylorOrder);
    const double xd = dot(X, D);
    const double dd = nd * nd;
    const double xx = nx * nx;
    double acc = 0.0;
    for (int k = 0; k < kTaylorOrder; ++k) {
        const double t = 0.5 * (rule.nodes[k] + 1.0);
        const double vv = xx + 2.0 * t * xd + t * t * dd;
        const double vd = xd + t * dd;
        const double quad = p * std::pow(vv, 0.5 * (p - 2.0)) * (dd + (p - 2.0) * vd * vd / vv);
        acc += 0.5 * rule.weights[k] * (1.0 - t) * quad;
    }
    return acc;
}

double g_p_scalar(double x, double y, double p)
{
    require_p(p);
    const double d = y - x;
    const double ax = std::abs(x);
    if (d == 0.0)
        return 0.0;
    if (ax == 0.0)
        return std::pow(std::abs(d), p);
    if (std::abs(d) > kTaylorSwitch * ax) {
        const double sx = x > 0.0 ? 1.0 : -1.0;
        return std::pow(std::abs(y), p) - std::pow(ax, p) - p * std::pow(ax, p - 1.0) * sx * d;
    }
    const GaussRule& rule = gauss_legendre(kTaylorOrder);
    double acc = 0.0;
    for (int k = 0; k < kTaylorOrder; ++k) {
        const double t = 0.5 * (rule.nodes[k] + 1.0);
        const double v = std::abs(x + t * d);
        acc += 0.5 * rule.weights[k] * (1.0 - t) * p * (p - 1.0) * std::pow(v, p - 2.0) * d * d;
    }
    return acc;
}

std::vector<double> fz_z_vector(std::span<const double> x, std::span<const double> s, double p)
{
    require_same_dim(x, s);
    require_p(p);
    if (p == 2.0)
        throw InvalidArgument("z(x, x+y) is not defined for p = 2");
    const double nx = norm(x);
    const double ns = norm(s);
    if (nx == 0.0 && ns == 0.0)
        throw InvalidArgument("z(x, x+y) needs x or x+y nonzero");
    std::vector<double> z(x.begin(), x.end());
    if (p < 2.0) {
        if (nx < ns) {
            const double denom = (2.0 - p) * ns + (p - 1.0) * nx;
            if (!(denom > 0.0))
                throw InvalidArgument("z(x, x+y): vanishing denominator");
            const double factor = std::pow(ns / denom, 1.0 / (p - 2.0));
            for (double& c : z)
                c *= factor;
        }
        return z;
    }
    if (nx >= ns) {
        const double factor = std::pow(ns / nx, 1.0 / (p - 2.0));
        for (std::size_t i = 0; i < z.size(); ++i)
            z[i] = factor * s[i];
    }
    return z;
}

double fz_quadratic_part(std::span<const double> x, std::span<const double> y, double p, double gamma)
{
    require_same_dim(x, y);
    require_p(p);
    if (!(gamma > 0.0))
        throw InvalidArgument("gamma must be > 0");
    const double nx = norm(x);
    const double ny = norm(y);
    if (ny == 0.0)
        return 0.0;
    if (nx == 0.0 && p < 2.0)
        return 0.0;
    std::vector<double> s(x.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = x[i] + y[i];
    const double ns = norm(s);
    double bracket = p * std::pow(nx, p - 2.0) * ny * ny;
    if (p != 2.0) {
        const auto z = fz_z_vector(x, s, p);
        const double nz = norm(z);
        const double gap = nx - ns;
        if (gap != 0.0)
            bracket += p * (p - 2.0) * std::pow(nz, p - 2.0) * gap * gap;
    }
    return 0.5 * (1.0 - gamma) * bracket;
}

double fz_power_term(std::span<const double> x, std::span<const double> y, double p)
{
    require_same_dim(x, y);
    require_p(p);
    const double ny = norm(y);
    if (ny == 0.0)
        return 0.0;
    const double yp = std::pow(ny, p);
    if (p >= 2.0)
        return yp;
    const double nx = norm(x);
    if (nx == 0.0)
        return yp;
    return std::min(yp, std::pow(nx, p - 2.0) * ny * ny);
}

double fz_lower_bound(std::span<const double> x, std::span<const double> y, double p, double gamma,
                      double c_pg)
{
    if (!(c_pg >= 0.0))
        throw InvalidArgument("c_pg must be >= 0");
    const double quad = fz_quadratic_part(x, y, p, gamma);
    if (c_pg == 0.0)
        return quad;
    return quad + c_pg * fz_power_term(x, y, p);
}

double cor_lower_bound_kernel(std::span<const double> X, std::span<const double> Y, double p)
{
    require_same_dim(X, Y);
    std::vector<double> D(X.size());
    for (std::size_t i = 0; i < D.size(); ++i)
        D[i] = Y[i] - X[i];
    return fz_power_term(X, D, p);
}

double half_power(double t, double p)
{
    if (t == 0.0)
        return 0.0;
    return std::copysign(std::pow(std::abs(t), 0.5 * p), t);
}

InequalityReport lemma_a_check(double m, double n, double p)
{
    if (!(p > 1.0 && p < 2.0))
        throw InvalidArgument("lemma_a_check needs 1 < p < 2");
    InequalityReport rep;
    const double diff = half_power(m, p) - half_power(n, p);
    const double gap = std::pow(std::abs(m - n), p);
    rep.lhs = diff * diff;
    rep.rhs = 4.0 * gap;
    rep.margin = rep.rhs - rep.lhs;
    rep.violated = violates(rep.margin, rep.lhs, rep.rhs);
    if (m * n > 0.0) {
        InequalityReport::Refined r;
        r.rhs = gap;
        r.margin = gap - rep.lhs;
        r.violated = violates(r.margin, rep.lhs, gap);
        rep.refined = r;
    }
    std::ostringstream os;
    os.precision(17);
    os << "m=" << m << " n=" << n << " p=" << p;
    rep.witness = os.str();
    return rep;
}

double power_sum_constant(double q) { return std::max(1.0, std::pow(2.0, q - 1.0)); }

InequalityReport power_sum_bound_check(double m, double n, double q)
{
    if (!(q > 0.0))
        throw InvalidArgument("power_sum_bound_check needs q > 0");
    InequalityReport rep;
    rep.lhs = std::pow(std::abs(m + n), q);
    rep.rhs = power_sum_constant(q) * (std::pow(std::abs(m), q) + std::pow(std::abs(n), q));
    rep.margin = rep.rhs - rep.lhs;
    rep.violated = violates(rep.margin, rep.lhs, rep.rhs);
    std::ostringstream os;
    os.precision(17);
    os << "m=" << m << " n=" << n << " q=" << q;
    rep.witness = os.str();
    return rep;
}

double appendix_f(double t, double p) { return std::pow(t, 0.5 * p) - 1.0 - std::pow(t - 1.0, 0.5 * p); }

double appendix_g(double t, double p) { return 1.0 - std::pow(t, 0.5 * p) - std::pow(1.0 - t, 0.5 * p); }

double appendix_h(double t, double p) { return std::pow(t, 0.5 * p) + 1.0 - 2.0 * std::pow(t + 1.0, 0.5 * p); }

// Sampling ------------------------------------------------------------------

namespace {

constexpr int kMaxDim = 4;

void random_direction(SampleRng& rng, int dim, double* out)
{
    if (dim == 1) {
        out[0] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        return;
    }
    double s = 0.0;
    do {
        s = 0.0;
        for (int i = 0; i < dim; ++i) {
            out[i] = rng.normal();
            s += out[i] * out[i];
        }
    } while (s < 1e-24);
    s = std::sqrt(s);
    for (int i = 0; i < dim; ++i)
        out[i] /= s;
}

} // namespace

VecPair draw_pair(std::uint64_t seed, std::uint64_t index, double p)
{
    SampleRng rng(seed, index);
    const int dim = 1 + static_cast<int>(rng.below(kMaxDim));
    std::array<double, kMaxDim> ex{};
    std::array<double, kMaxDim> ey{};
    random_direction(rng, dim, ex.data());
    const double mx = rng.log_uniform(1e-6, 1e6);
    VecPair pair;
    pair.p = p;
    pair.x.resize(dim);
    pair.y.resize(dim);
    for (int i = 0; i < dim; ++i)
        pair.x[i] = mx * ex[i];

    switch (index % 4) {
    case 0: { // independent directions and magnitudes
        random_direction(rng, dim, ey.data());
        const double my = rng.log_uniform(1e-6, 1e6);
        for (int i = 0; i < dim; ++i)
            pair.y[i] = my * ey[i];
        break;
    }
    case 1: { // nearly collinear, either orientation
        random_direction(rng, dim, ey.data());
        const double eps = rng.log_uniform(1e-8, 1e-1);
        const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        const double my = rng.log_uniform(1e-6, 1e6);
        double s = 0.0;
        for (int i = 0; i < dim; ++i) {
            ey[i] = ex[i] + eps * ey[i];
            s += ey[i] * ey[i];
        }
        s = std::sqrt(s);
        for (int i = 0; i < dim; ++i)
            pair.y[i] = sign * my * ey[i] / s;
        break;
    }
    case 2: { // nearly equal
        random_direction(rng, dim, ey.data());
        const double delta = rng.log_uniform(1e-8, 1e-1) * mx;
        for (int i = 0; i < dim; ++i)
            pair.y[i] = pair.x[i] + delta * ey[i];
        break;
    }
    default: { // moderate offsets relative to |X|, where the infima live
        random_direction(rng, dim, ey.data());
        const double delta = rng.log_uniform(1e-2, 1e2) * mx;
        for (int i = 0; i < dim; ++i)
            pair.y[i] = pair.x[i] + delta * ey[i];
        break;
    }
    }
    return pair;
}

double cp_ratio(std::span<const double> X, std::span<const double> Y, double p)
{
    const double k = cor_lower_bound_kernel(X, Y, p);
    if (k == 0.0 || !std::isfinite(k))
        return kNaN;
    return g_p(X, Y, p) / k;
}

double cpg_ratio(std::span<const double> X, std::span<const double> Y, double p, double gamma)
{
    std::vector<double> y(X.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = Y[i] - X[i];
    const double power = fz_power_term(X, y, p);
    if (power == 0.0 || !std::isfinite(power))
        return kNaN;
    return (g_p(X, Y, p) - fz_quadratic_part(X, y, p, gamma)) / power;
}

namespace {

// Reduced coordinates: X = (1, 0), Y = X + rho (cos phi, sin phi).
struct Reduced {
    double log_rho;
    double phi;
};

VecPair reduced_pair(Reduced r, double p)
{
    const double rho = std::exp(r.log_rho);
    return VecPair{{1.0, 0.0}, {1.0 + rho * std::cos(r.phi), rho * std::sin(r.phi)}, p};
}

template <class Ratio>
double golden_min(Ratio&& f, double lo, double hi, double& arg_out, int iters)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int k = 0; k < iters; ++k) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    arg_out = fc <= fd ? c : d;
    return std::min(fc, fd);
}

struct ScanOutcome {
    double value;
    VecPair witness;
    std::int64_t evaluations;
};

template <class Ratio>
ScanOutcome reduced_scan(Ratio&& ratio, double p, Exec exec)
{
    // log10(rho) in [-6, 6] with 20 points per decade, phi in [0, pi].
    constexpr int kRho = 241;
    constexpr int kPhi = 181;
    const double lr_lo = -6.0 * std::numbers::ln10;
    const double lr_step = 12.0 * std::numbers::ln10 / (kRho - 1);
    const double ph_step = std::numbers::pi / (kPhi - 1);
    auto at = [&](Reduced r) {
        const VecPair v = reduced_pair(r, p);
        return ratio(v.x, v.y);
    };
    const ArgMin grid = parallel_argmin(kRho * kPhi, exec, [&](std::int64_t i) {
        const Reduced r{lr_lo + lr_step * static_cast<double>(i / kPhi),
                        ph_step * static_cast<double>(i % kPhi)};
        return at(r);
    });
    std::int64_t evals = kRho * kPhi;
    if (grid.index < 0)
        return {kNaN, {}, evals};
    Reduced best{lr_lo + lr_step * static_cast<double>(grid.index / kPhi),
                 ph_step * static_cast<double>(grid.index % kPhi)};
    double best_value = grid.value;
    // Alternate golden-section sweeps over one grid cell on either side.
    double half_lr = lr_step;
    double half_ph = ph_step;
    for (int sweep = 0; sweep < 6; ++sweep) {
        double arg = best.log_rho;
        double v = golden_min([&](double lr) { return at({lr, best.phi}); }, best.log_rho - half_lr,
                              best.log_rho + half_lr, arg, 80);
        evals += 82;
        if (v < best_value) {
            best_value = v;
            best.log_rho = arg;
        }
        arg = best.phi;
        v = golden_min([&](double ph) { return at({best.log_rho, ph}); },
                       std::max(0.0, best.phi - half_ph),
                       std::min(std::numbers::pi, best.phi + half_ph), arg, 80);
        evals += 82;
        if (v < best_value) {
            best_value = v;
            best.phi = arg;
        }
        half_lr *= 0.5;
        half_ph *= 0.5;
    }
    return {best_value, reduced_pair(best, p), evals};
}

template <class Ratio>
EmpiricalConstant run_constant_scan(double p, std::int64_t sample_count, std::uint64_t seed,
                                    Exec exec, Ratio&& ratio, std::string description)
{
    require_p(p);
    if (sample_count < kMinCpSamples)
        throw InvalidArgument("constant scans need at least " + std::to_string(kMinCpSamples) +
                              " samples");
    const ArgMin random = parallel_argmin(sample_count, exec, [&](std::int64_t i) {
        const VecPair v = draw_pair(seed, static_cast<std::uint64_t>(i), p);
        return ratio(v.x, v.y);
    });
    ScanOutcome reduced = reduced_scan(ratio, p, exec);

    EmpiricalConstant out;
    out.seed = seed;
    out.sample_count = sample_count + reduced.evaluations;
    out.scan_description = std::move(description);
    if (random.index >= 0 && !(reduced.value < random.value)) {
        out.value = random.value;
        out.witness = draw_pair(seed, static_cast<std::uint64_t>(random.index), p);
    } else {
        out.value = reduced.value;
        out.witness = std::move(reduced.witness);
    }
    return out;
}

} // namespace

EmpiricalConstant estimate_cp(double p, std::int64_t sample_count, std::uint64_t seed, Exec exec)
{
    auto ratio = [p](std::span<const double> X, std::span<const double> Y) { return cp_ratio(X, Y, p); };
    return run_constant_scan(p, sample_count, seed, exec, ratio,
                             "inf g_p/kernel: random pairs + reduced (rho, phi) scan");
}

EmpiricalConstant estimate_cpg(double p, double gamma, std::int64_t sample_count, std::uint64_t seed,
                               Exec exec)
{
    if (!(gamma > 0.0))
        throw InvalidArgument("gamma must be > 0");
    auto ratio = [p, gamma](std::span<const double> X, std::span<const double> Y) {
        return cpg_ratio(X, Y, p, gamma);
    };
    EmpiricalConstant out = run_constant_scan(
        p, sample_count, seed, exec, ratio,
        "inf (g_p - quadratic part)/power term: random pairs + reduced (rho, phi) scan");
    out.gamma = gamma;
    return out;
}

std::vector<ViolationTally> scan_vector_inequalities(double p, std::span<const double> gammas,
                                                     double c_emp, std::int64_t sample_count,
                                                     std::uint64_t seed, Exec exec)
{
    require_p(p);
    const std::size_t checks = 2 + gammas.size();
    // margins[i * checks + k]: relative margin of check k on sample i.
    std::vector<double> margins(static_cast<std::size_t>(sample_count) * checks);
    parallel_for(sample_count, exec, [&](std::int64_t i) {
        const VecPair v = draw_pair(seed, static_cast<std::uint64_t>(i), p);
        const double g = g_p(v.x, v.y, p);
        double* row = &margins[static_cast<std::size_t>(i) * checks];
        const double scale = std::max(std::pow(norm(v.x), p), std::pow(norm(v.y), p));
        row[0] = g / scale;
        std::vector<double> y(v.x.size());
        for (std::size_t j = 0; j < y.size(); ++j)
            y[j] = v.y[j] - v.x[j];
        for (std::size_t k = 0; k < gammas.size(); ++k) {
            const double quad = fz_quadratic_part(v.x, y, p, gammas[k]);
            const double denom = std::max(std::abs(g), std::abs(quad));
            row[1 + k] = denom > 0.0 ? (g - quad) / denom : 0.0;
        }
        const double bound = c_emp * cor_lower_bound_kernel(v.x, v.y, p);
        const double denom = std::max(std::abs(g), std::abs(bound));
        row[checks - 1] = denom > 0.0 ? (g - bound) / denom : 0.0;
    });

    std::vector<ViolationTally> out(checks);
    out[0].name = "g_p>=0";
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        std::ostringstream os;
        os << "g_p>=fz_quadratic(gamma=" << gammas[k] << ")";
        out[1 + k].name = os.str();
    }
    out[checks - 1].name = "g_p>=c_emp*kernel";
    for (std::size_t k = 0; k < checks; ++k) {
        ViolationTally& t = out[k];
        t.checked = sample_count;
        const double tol = k == 0 ? 0.0 : 1e-12;
        std::int64_t worst_index = -1;
        for (std::int64_t i = 0; i < sample_count; ++i) {
            const double m = margins[static_cast<std::size_t>(i) * checks + k];
            if (m < -tol)
                ++t.violations;
            if (worst_index < 0 || m < t.worst_margin) {
                t.worst_margin = m;
                worst_index = i;
            }
        }
        if (worst_index >= 0)
            t.worst_witness = draw_pair(seed, static_cast<std::uint64_t>(worst_index), p);
    }
    return out;
}

std::vector<ViolationTally> scan_lemma_a(std::int64_t sample_count, std::uint64_t seed, Exec exec)
{
    struct Row {
        double m, n, p;
        double a1 = 0.0;
        double a2 = 0.0;
        bool same_sign = false;
    };
    std::vector<Row> rows(static_cast<std::size_t>(sample_count));
    parallel_for(sample_count, exec, [&](std::int64_t i) {
        SampleRng rng(seed, static_cast<std::uint64_t>(i));
        Row r{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0), 0.0};
        double u = rng.uniform01();
        while (u <= 0.0)
            u = rng.uniform01();
        r.p = 1.0 + u;
        const InequalityReport rep = lemma_a_check(r.m, r.n, r.p);
        const double scale = std::max(rep.lhs, rep.rhs);
        r.a1 = scale > 0.0 ? rep.margin / scale : 0.0;
        if (rep.refined) {
            r.same_sign = true;
            const double s2 = std::max(rep.lhs, rep.refined->rhs);
            r.a2 = s2 > 0.0 ? rep.refined->margin / s2 : 0.0;
        }
        rows[i] = r;
    });
    std::vector<ViolationTally> out(2);
    out[0].name = "lemma_a(a.1)";
    out[1].name = "lemma_a(a.2,same-sign)";
    std::int64_t w0 = -1;
    std::int64_t w1 = -1;
    for (std::int64_t i = 0; i < sample_count; ++i) {
        const Row& r = rows[i];
        ++out[0].checked;
        if (r.a1 < -1e-12)
            ++out[0].violations;
        if (w0 < 0 || r.a1 < out[0].worst_margin) {
            out[0].worst_margin = r.a1;
            w0 = i;
        }
        if (r.same_sign) {
            ++out[1].checked;
            if (r.a2 < -1e-12)
                ++out[1].violations;
            if (w1 < 0 || r.a2 < out[1].worst_margin) {
                out[1].worst_margin = r.a2;
                w1 = i;
            }
        }
    }
    if (w0 >= 0)
        out[0].worst_witness = VecPair{{rows[w0].m}, {rows[w0].n}, rows[w0].p};
    if (w1 >= 0)
        out[1].worst_witness = VecPair{{rows[w1].m}, {rows[w1].n}, rows[w1].p};
    return out;
}

} // namespace ckn
