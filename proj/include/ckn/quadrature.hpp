#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace ckn {

/// Envelope |g(r)| <= A r^power exp(-rate r^exponent) for large r.
/// Compact means the integrand vanishes beyond its support.
struct Decay {
    enum class Kind { Compact, StretchedExp, Algebraic };
    Kind kind = Kind::Compact;
    double rate = 0.0;
    double exponent = 1.0;
    double power = 0.0;
    /// The envelope only holds beyond this radius (compactly supported
    /// parts mixed into the function end here).
    double onset = 0.0;

    static Decay compact() { return {}; }
    static Decay stretched(double rate, double exponent, double power = 0.0)
    {
        return {Kind::StretchedExp, rate, exponent, power, 0.0};
    }
    static Decay algebraic(double power) { return {Kind::Algebraic, 0.0, 1.0, power, 0.0}; }
};

/// Envelope of |f|^q r^w (or |f'|^q r^w) given the envelope of f.
Decay power_decay(const Decay& f, bool derivative, double q, double w);

/// Envelope of a sum: the slower of the two.
Decay slower(const Decay& x, const Decay& y);

/// Same envelope, valid only beyond `r`.
Decay with_onset(Decay d, double r);

/// Envelope of f*g.
Decay product_decay(const Decay& x, const Decay& y);

struct QuadratureScheme {
    /// Optional explicit panel edges. When empty the panels are log-spaced
    /// with `panels_per_decade` between the integration limits.
    std::vector<double> panel_edges;
    int nodes_per_panel = 32;
    int panels_per_decade = 2;
    double r_min = 1e-10;
    /// Upper cutoff. Infinity lets the tail model choose it.
    double r_max = std::numeric_limits<double>::infinity();
    double rel_tol = 1e-10;
    int max_depth = 48;
    int max_panels = 200000;
    /// Adds the power-law extrapolation of the integral over (0, r_min).
    bool origin_correction = true;
};

struct QuadResult {
    double value = 0.0;
    double abs_value = 0.0;      // integral of |g| (conditioning)
    double error_estimate = 0.0; // sum of accepted panel differences
    double tail_bound = 0.0;     // bound on the integral beyond `upper`
    double origin_term = 0.0;    // added extrapolation over (0, r_min)
    double lower = 0.0;
    double upper = 0.0;
    int panels = 0;
    std::vector<std::string> warnings;
};

/// Fixed composite rule r_i, w_i captured from an adaptive run.
struct NodeRule {
    std::vector<double> r;
    std::vector<double> w;
};

/// Adaptive Gauss-Legendre over [lo, hi] with hi possibly infinite. Throws
/// NonFiniteIntegrand or AccuracyNotReached.
///
/// `magnitude`, when given, is a pointwise bound m(r) >= |g(r)| used for the
/// absolute part of the refinement test instead of |g|. Integrands that are
/// small differences of large quantities need it, or refinement chases
/// rounding noise.
QuadResult integrate(const std::function<double(double)>& g, double lo, double hi,
                     const QuadratureScheme& scheme, const Decay& tail = Decay::compact(),
                     NodeRule* capture = nullptr, const std::function<double(double)>& magnitude = {});

/// Integral over [scheme.r_min, scheme.r_max]; r_max must be finite.
QuadResult integrate(const std::function<double(double)>& g, const QuadratureScheme& scheme);

/// Upper bound on int_R^inf r^m exp(-k r^theta) dr, or +inf when the
/// incomplete-gamma estimate does not apply yet.
double stretched_tail_integral(double R, double m, double k, double theta);

} // namespace ckn
