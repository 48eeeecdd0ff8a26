#include "ckn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ckn/errors.hpp"
#include "ckn/gauss.hpp"

namespace ckn {

Decay power_decay(const Decay& f, bool derivative, double q, double w)
{
    switch (f.kind) {
    case Decay::Kind::Compact:
        return f;
    case Decay::Kind::Algebraic:
        return with_onset(Decay::algebraic(q * (f.power - (derivative ? 1.0 : 0.0)) + w), f.onset);
    case Decay::Kind::StretchedExp:
        break;
    }
    const double mu = derivative ? f.power + f.exponent - 1.0 : f.power;
    return with_onset(Decay::stretched(q * f.rate, f.exponent, q * mu + w), f.onset);
}

Decay with_onset(Decay d, double r)
{
    if (std::isfinite(r))
        d.onset = std::max(d.onset, r);
    return d;
}

namespace {

Decay slower_impl(const Decay& x, const Decay& y)
{
    using K = Decay::Kind;
    if (x.kind == K::Compact)
        return y;
    if (y.kind == K::Compact)
        return x;
    if (x.kind == K::Algebraic && y.kind == K::Algebraic)
        return Decay::algebraic(std::max(x.power, y.power));
    if (x.kind == K::Algebraic)
        return x;
    if (y.kind == K::Algebraic)
        return y;
    if (x.exponent == y.exponent)
        return Decay::stretched(std::min(x.rate, y.rate), x.exponent, std::max(x.power, y.power));
    const Decay& s = x.exponent < y.exponent ? x : y;
    return Decay::stretched(s.rate, s.exponent, std::max(x.power, y.power));
}

Decay product_impl(const Decay& x, const Decay& y)
{
    using K = Decay::Kind;
    if (x.kind == K::Compact || y.kind == K::Compact)
        return Decay::compact();
    if (x.kind == K::Algebraic && y.kind == K::Algebraic)
        return Decay::algebraic(x.power + y.power);
    if (x.kind == K::Algebraic)
        return Decay::stretched(y.rate, y.exponent, y.power + x.power);
    if (y.kind == K::Algebraic)
        return Decay::stretched(x.rate, x.exponent, x.power + y.power);
    if (x.exponent == y.exponent)
        return Decay::stretched(x.rate + y.rate, x.exponent, x.power + y.power);
    // A decaying factor is at most its power envelope; keep the stronger exponential.
    const Decay& s = x.exponent > y.exponent ? x : y;
    return Decay::stretched(s.rate, s.exponent, x.power + y.power);
}

} // namespace

Decay slower(const Decay& x, const Decay& y)
{
    return with_onset(slower_impl(x, y), std::max(x.onset, y.onset));
}

Decay product_decay(const Decay& x, const Decay& y)
{
    return with_onset(product_impl(x, y), std::max(x.onset, y.onset));
}

namespace {

double log_stretched_tail(double R, double m, double k, double theta)
{
    const double s = (m + 1.0) / theta;
    const double z = k * std::pow(R, theta);
    double log_gamma_bound = (s - 1.0) * std::log(z) - z;
    if (s > 1.0) {
        if (!(z > s - 1.0))
            return std::numeric_limits<double>::infinity();
        log_gamma_bound += std::log(z / (z - s + 1.0));
    }
    return -std::log(theta) - s * std::log(k) + log_gamma_bound;
}

struct Panel {
    double value = 0.0;
    double abs = 0.0;
};

class Integrator {
public:
    Integrator(const std::function<double(double)>& g, const std::function<double(double)>& magnitude,
               const QuadratureScheme& scheme, NodeRule* capture)
        : g_(g), magnitude_(magnitude), scheme_(scheme), rule_(gauss_legendre(scheme.nodes_per_panel)),
          capture_(capture)
    {
    }

    double at(double r) const
    {
        const double v = g_(r);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os.precision(17);
            os << "integrand is not finite at r=" << r;
            throw NonFiniteIntegrand(os.str());
        }
        return v;
    }

    Panel gauss(double a, double b) const
    {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        Panel out;
        for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
            const double r = mid + half * rule_.nodes[k];
            const double v = at(r);
            out.value += rule_.weights[k] * v;
            out.abs += rule_.weights[k] * (magnitude_ ? magnitude_(r) : std::abs(v));
        }
        out.value *= half;
        out.abs *= half;
        return out;
    }

    void record(double a, double b)
    {
        if (!capture_)
            return;
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
            capture_->r.push_back(mid + half * rule_.nodes[k]);
            capture_->w.push_back(half * rule_.weights[k]);
        }
    }

    // Integral over [a, b] split into panels; `scale_hint` is an a priori
    // magnitude of the whole integral used for the absolute floor.
    void run(double a, double b, double scale_hint, QuadResult& res)
    {
        std::vector<double> edges = make_edges(a, b);
        const std::size_t n = edges.size() - 1;
        std::vector<Panel> coarse(n);
        double scale = scale_hint;
        for (std::size_t i = 0; i < n; ++i) {
            coarse[i] = gauss(edges[i], edges[i + 1]);
            scale += coarse[i].abs;
        }
        for (std::size_t i = 0; i < n; ++i)
            refine(edges[i], edges[i + 1], coarse[i], scale, 0, res);
    }

private:
    std::vector<double> make_edges(double a, double b) const
    {
        std::vector<double> edges;
        edges.push_back(a);
        if (!scheme_.panel_edges.empty()) {
            for (double e : scheme_.panel_edges)
                if (e > a && e < b)
                    edges.push_back(e);
        } else if (a > 0.0) {
            const double decades = std::log10(b / a);
            const int n = std::max(1, static_cast<int>(std::ceil(scheme_.panels_per_decade * decades)));
            const double step = std::log(b / a) / n;
            for (int i = 1; i < n; ++i)
                edges.push_back(a * std::exp(step * i));
        }
        edges.push_back(b);
        return edges;
    }

    static double split_point(double a, double b)
    {
        // Geometric midpoint keeps relative resolution near the origin.
        if (a > 0.0 && b / a > 4.0)
            return std::sqrt(a * b);
        return 0.5 * (a + b);
    }

    void refine(double a, double b, Panel whole, double scale, int depth, QuadResult& res)
    {
        const double m = split_point(a, b);
        const Panel left = gauss(a, m);
        const Panel right = gauss(m, b);
        const double both = left.value + right.value;
        const double diff = std::abs(whole.value - both);
        const double floor = scheme_.rel_tol * std::max(left.abs + right.abs, 1e-2 * scale);
        if (diff <= floor || !(m > a && m < b)) {
            res.value += both;
            res.abs_value += left.abs + right.abs;
            res.error_estimate += diff;
            res.panels += 2;
            record(a, m);
            record(m, b);
            return;
        }
        if (depth >= scheme_.max_depth || res.panels > scheme_.max_panels) {
            std::ostringstream os;
            os.precision(17);
            os << "quadrature refinement cap reached on [" << a << ", " << b << "]";
            throw AccuracyNotReached(os.str());
        }
        refine(a, m, left, scale, depth + 1, res);
        refine(m, b, right, scale, depth + 1, res);
    }

    const std::function<double(double)>& g_;
    const std::function<double(double)>& magnitude_;
    const QuadratureScheme& scheme_;
    const GaussRule& rule_;
    NodeRule* capture_;
};

// Integral of g over (lo, r0): panels down to r0 * 1e-15, then the
// power-law fit of g below that. A two-point fit at r0 alone is off by
// the non-power part of g (e.g. exp(-r^s) with small s).
void origin_term(Integrator& in, double lo, double r0, QuadResult& res)
{
    const double g0 = in.at(r0);
    if (g0 == 0.0)
        return;
    const double g1 = in.at(2.0 * r0);
    if (g1 == 0.0 || (g0 > 0.0) != (g1 > 0.0))
        return;
    const double m0 = std::log2(g1 / g0);
    if (!(m0 > -1.0)) {
        if (lo == 0.0) {
            std::ostringstream os;
            os.precision(6);
            os << "integrand not integrable at the origin (local exponent " << m0 << ")";
            res.warnings.push_back(os.str());
        }
        return;
    }
    const double deep = std::max(lo, r0 * 1e-15);
    QuadResult part;
    if (deep < r0)
        in.run(deep, r0, res.abs_value, part);
    double fit = 0.0;
    if (lo < deep) {
        const double d0 = in.at(deep);
        const double d1 = in.at(2.0 * deep);
        if (d0 != 0.0 && d1 != 0.0 && (d0 > 0.0) == (d1 > 0.0)) {
            const double m = std::log2(d1 / d0);
            if (m > -1.0) {
                const double frac = lo > 0.0 ? std::pow(lo / deep, m + 1.0) : 0.0;
                fit = d0 * deep * (1.0 - frac) / (m + 1.0);
            }
        }
    }
    res.origin_term = part.value + fit;
    res.value += res.origin_term;
    res.abs_value += part.abs_value + std::abs(fit);
    res.error_estimate += part.error_estimate;
    res.panels += part.panels;
}

} // namespace

double stretched_tail_integral(double R, double m, double k, double theta)
{
    return std::exp(log_stretched_tail(R, m, k, theta));
}

QuadResult integrate(const std::function<double(double)>& g, double lo, double hi,
                     const QuadratureScheme& scheme, const Decay& tail, NodeRule* capture,
                     const std::function<double(double)>& magnitude)
{
    if (!(lo >= 0.0) || !(scheme.r_min > 0.0) || !(scheme.rel_tol > 0.0))
        throw InvalidArgument("integrate: need lo >= 0, r_min > 0, rel_tol > 0");
    QuadResult res;
    const double a = std::max(lo, scheme.r_min);
    const double b = std::min(hi, scheme.r_max);
    res.lower = a;
    res.upper = a;
    if (!(b > a))
        return res;
    Integrator in(g, magnitude, scheme, capture);

    if (std::isfinite(b)) {
        in.run(a, b, 0.0, res);
        res.upper = b;
    } else {
        using K = Decay::Kind;
        if (tail.kind == K::Compact)
            throw InvalidArgument("integrate: infinite upper limit needs a decay envelope");
        if ((tail.kind == K::StretchedExp && !(tail.rate > 0.0 && tail.exponent > 0.0)) ||
            (tail.kind == K::Algebraic && !(tail.power < -1.0)))
            throw InvalidArgument("integrate: integrand envelope does not decay");
        double left = a;
        double right = std::max({4.0 * a, 1.0, 1.5 * tail.onset});
        for (int grow = 0;; ++grow) {
            in.run(left, right, res.abs_value, res);
            // Envelope constant from samples over [R/2, R], in logs to avoid underflow.
            double log_amp = -std::numeric_limits<double>::infinity();
            for (int j = 0; j <= 8; ++j) {
                const double r = right * (0.5 + 0.0625 * j);
                const double v = std::abs(in.at(r));
                if (v == 0.0)
                    continue;
                double l = std::log(v) - tail.power * std::log(r);
                if (tail.kind == K::StretchedExp)
                    l += tail.rate * std::pow(r, tail.exponent);
                log_amp = std::max(log_amp, l);
            }
            double log_tail = -std::numeric_limits<double>::infinity();
            if (std::isfinite(log_amp)) {
                const double lt =
                    tail.kind == K::Algebraic
                        ? (tail.power + 1.0) * std::log(right) - std::log(-(tail.power + 1.0))
                        : log_stretched_tail(right, tail.power, tail.rate, tail.exponent);
                log_tail = std::log(2.0) + log_amp + lt;
            }
            res.tail_bound = std::exp(log_tail);
            res.upper = right;
            const double target = 1e-3 * scheme.rel_tol * std::abs(res.abs_value);
            if (res.tail_bound <= target || (res.abs_value == 0.0 && grow > 8 && log_tail < -700.0))
                break;
            if (grow > 200)
                throw AccuracyNotReached("integrate: tail bound did not reach the tolerance");
            left = right;
            right *= 2.0;
        }
    }
    if (scheme.origin_correction && lo < scheme.r_min)
        origin_term(in, lo, scheme.r_min, res);
    return res;
}

QuadResult integrate(const std::function<double(double)>& g, const QuadratureScheme& scheme)
{
    if (!std::isfinite(scheme.r_max))
        throw InvalidArgument("integrate: scheme.r_max must be finite");
    return integrate(g, scheme.r_min, scheme.r_max, scheme);
}

} // namespace ckn
