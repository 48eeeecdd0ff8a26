#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

namespace ckn {

struct Minimum1D {
    double x = 0.0;
    double f = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Expands [x0 - step, x0 + step] geometrically until the middle point is
/// lower than both ends. Returns (a, b) with the minimizer inside when the
/// function is unimodal.
template <class F>
std::pair<double, double> bracket_minimum(F&& f, double x0, double step, int max_expand = 200)
{
    if (!(step > 0.0))
        step = 1.0;
    double a = x0 - step;
    double m = x0;
    double b = x0 + step;
    auto fa = f(a);
    auto fm = f(m);
    auto fb = f(b);
    for (int k = 0; k < max_expand && !(fm <= fa && fm <= fb); ++k) {
        if (fa < fm) {
            b = m;
            fb = fm;
            m = a;
            fm = fa;
            a = m - 2.0 * (b - m);
            fa = f(a);
        } else {
            a = m;
            fa = fm;
            m = b;
            fm = fb;
            b = m + 2.0 * (m - a);
            fb = f(b);
        }
    }
    return {a, b};
}

/// Golden-section search on [a, b].
template <class F>
Minimum1D golden_section(F&& f, double a, double b, double x_tol, int max_iter = 200)
{
    using V = decltype(f(a));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    Minimum1D out;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    V fc = f(c);
    V fd = f(d);
    out.evaluations = 2;
    for (int k = 0; k < max_iter; ++k) {
        if (std::abs(b - a) <= x_tol * (1.0 + std::abs(c) + std::abs(d))) {
            out.converged = true;
            break;
        }
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
        ++out.evaluations;
    }
    if (fc <= fd) {
        out.x = c;
        out.f = static_cast<double>(fc);
    } else {
        out.x = d;
        out.f = static_cast<double>(fd);
    }
    return out;
}

/// Brent's parabolic/golden minimizer on [a, b] (Numerical Recipes layout).
template <class F>
Minimum1D brent_minimize(F&& f, double a, double b, double x_tol, int max_iter = 200)
{
    using V = decltype(f(a));
    const double cgold = 0.3819660112501051;
    const double zeps = 1e-300;
    Minimum1D out;
    if (a > b)
        std::swap(a, b);
    double x = a + cgold * (b - a);
    double w = x;
    double v = x;
    V fx = f(x);
    V fw = fx;
    V fv = fx;
    double d = 0.0;
    double e = 0.0;
    out.evaluations = 1;
    for (int iter = 0; iter < max_iter; ++iter) {
        const double xm = 0.5 * (a + b);
        const double tol1 = x_tol * std::abs(x) + zeps + 1e-300;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) {
            out.converged = true;
            break;
        }
        bool golden = true;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * static_cast<double>(fx - fv);
            double q = (x - v) * static_cast<double>(fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0)
                p = -p;
            q = std::abs(q);
            const double etemp = e;
            e = d;
            if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2)
                    d = std::copysign(tol1, xm - x);
                golden = false;
            }
        }
        if (golden) {
            e = (x >= xm) ? a - x : b - x;
            d = cgold * e;
        }
        const double u = std::abs(d) >= tol1 ? x + d : x + std::copysign(tol1, d);
        const V fu = f(u);
        ++out.evaluations;
        if (fu <= fx) {
            if (u >= x)
                a = x;
            else
                b = x;
            v = w;
            w = x;
            x = u;
            fv = fw;
            fw = fx;
            fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu <= fw || w == x) {
                v = w;
                w = u;
                fv = fw;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    out.x = x;
    out.f = static_cast<double>(fx);
    return out;
}

} // namespace ckn
