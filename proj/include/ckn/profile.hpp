#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>

#include <json.hpp>

#include "ckn/params.hpp"
#include "ckn/quadrature.hpp"

namespace ckn {

/// Radial function u(x) = f(|x|) with an analytic derivative.
///
/// eval and deriv return exactly 0 outside [lo, hi]. The decay envelope
/// describes |f| for large r; the descriptor is enough to rebuild the
/// profile (see profile_from_json).
class RadialProfile {
public:
    using Fn = std::function<double(double)>;

    RadialProfile() = default;
    RadialProfile(Fn f, Fn df, double lo, double hi, Decay decay, std::string label,
                  nlohmann::json descriptor);

    double eval(double r) const { return inside(r) ? f_(r) : 0.0; }
    double deriv(double r) const { return inside(r) ? df_(r) : 0.0; }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const Decay& decay() const { return decay_; }
    const std::string& label() const { return label_; }
    const nlohmann::json& descriptor() const { return descriptor_; }
    bool is_zero() const { return !f_; }

    void set_label(std::string label) { label_ = std::move(label); }

private:
    bool inside(double r) const { return f_ && r >= lo_ && r <= hi_ && r > 0.0; }

    Fn f_;
    Fn df_;
    double lo_ = 0.0;
    double hi_ = 0.0;
    Decay decay_;
    std::string label_ = "zero";
    nlohmann::json descriptor_ = {{"kind", "zero"}};
};

RadialProfile zero_profile();

/// amplitude * exp(-1/((r-r0)(r1-r))) on (r0, r1).
RadialProfile bump_profile(double r0, double r1, double amplitude);

/// Bump rescaled so its peak value is `peak`.
RadialProfile unit_bump(double r0, double r1, double peak = 1.0);

/// c exp(-r^s / (s lam^s)), s = b - a + 1.
RadialProfile extremal_profile(const CknParams& params, double c, double lam);

/// alpha r^{2(b+1)-N} exp(beta r^s / s). A sign of beta that does not match
/// the region is allowed; the decay envelope then records growth.
RadialProfile extremal_profile_q(int N, double a, double b, double alpha, double beta);

/// c r^mu on [lo, hi].
RadialProfile power_profile(double mu, double c = 1.0, double lo = 0.0,
                            double hi = std::numeric_limits<double>::infinity());

/// |f|^{(p-2)/2} f.
RadialProfile half_power_transform(const RadialProfile& u, double p);

/// prefactor * f(lam r).
RadialProfile dilate(const RadialProfile& u, double lam, double prefactor = 1.0);

/// v (1 + eps * bump).
RadialProfile perturb(const RadialProfile& v, double eps, const RadialProfile& bump);

/// Linear combination sum_i w_i f_i.
RadialProfile combine(const std::vector<std::pair<double, RadialProfile>>& terms);

/// t f + s.
RadialProfile affine(const RadialProfile& u, double t, double s);

/// f times a smooth cutoff equal to 1 on [0, r_flat] and 0 beyond r_cut.
RadialProfile smooth_truncate(const RadialProfile& u, double r_flat, double r_cut);

/// Rebuilds a profile from its descriptor. Throws InvalidArgument on an
/// unknown kind or missing field.
RadialProfile profile_from_json(const nlohmann::json& j);

/// 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int N);

/// omega_{N-1} int |f or f'|^q r^{N-1-gamma} dr over the support.
QuadResult weighted_norm_result(const RadialProfile& u, bool use_derivative, double q,
                                double gamma, int N, const QuadratureScheme& scheme);

double weighted_norm_term(const RadialProfile& u, bool use_derivative, double q, double gamma,
                          int N, const QuadratureScheme& scheme);

} // namespace ckn
