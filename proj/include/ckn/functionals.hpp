#pragma once

#include <optional>
#include <string_view>

#include "ckn/params.hpp"
#include "ckn/profile.hpp"
#include "ckn/quadrature.hpp"

namespace ckn {

/// The three weighted integrals of the inequality, each over R^N:
/// grad = int |grad u|^p |x|^{-pb}, mass = int |u|^p |x|^{-pa},
/// mixed = int |u|^p |x|^{-((p-1)a+b+1)}.
struct CknTerms {
    double grad = 0.0;
    double mass = 0.0;
    double mixed = 0.0;
    CknParams params;
    QuadResult grad_q;
    QuadResult mass_q;
    QuadResult mixed_q;
};

CknTerms ckn_terms(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme);

/// A deficit together with its resolution: `condition` is the sum of the
/// magnitudes of the combined terms times rel_tol, and `resolved` is false
/// when |value| does not exceed it.
struct DeficitValue {
    double value = 0.0;
    double condition = 0.0;
    bool resolved = false;
};

/// grad^{1/p} mass^{(p-1)/p} - K mixed, K = sharp_constant_lp unless
/// overridden. Throws ZeroFunction for u = 0.
DeficitValue deficit_si(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme,
                        std::optional<double> constant_override = {});
DeficitValue deficit_si(const CknTerms& terms, double rel_tol, std::optional<double> constant_override = {});

/// grad + (p-1) mass - |N-(p-1)a-b-1| mixed. Throws ZeroFunction for u = 0.
DeficitValue deficit_sni(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme);
DeficitValue deficit_sni(const CknTerms& terms, double rel_tol);

/// int g_p(-u|x|^{b-a-1}x, grad u) |x|^{-pb}, evaluated on collinear scalars.
double identity_rhs_41(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme);

/// (1/p) int g_p(-(G/M)^{1/p^2} u|x|^{b-a-1}x, (M/G)^{(p-1)/p^2} grad u) |x|^{-pb}.
/// Pass precomputed terms to skip the first pass.
double identity_rhs_42(const RadialProfile& u, const CknParams& params, const QuadratureScheme& scheme,
                       const CknTerms* terms = nullptr);

/// Distance families measured against v = extremal_profile(params, c, lam).
/// Thm6Grad and Thm6Mass are the two infima of the nonexistence statement.
enum class StabilityVariant { Thm1Dist, Thm2Dist, Thm3Dist, Thm4Dist, Thm5Dist, ThmCDist, Thm6Grad, Thm6Mass };

std::string_view to_string(StabilityVariant v);

/// True when the variant fixes lam = 1.
bool lam_pinned(StabilityVariant v);

/// Distance used by each stability theorem.
StabilityVariant variant_for(TheoremId theorem);

/// Throws InvalidArgument when p is outside the variant's range or a pinned
/// variant is given lam != 1.
void check_variant(StabilityVariant v, const CknParams& params, double lam);

/// N(pa + 2b - 2a)/(N - 2) versus pa: the two weights that appear for the
/// half-power distance. Equal whenever a = Nb/(N-p).
bool half_power_weights_agree(const CknParams& params);

QuadResult stability_distance_result(const RadialProfile& u, const CknParams& params, StabilityVariant v,
                                     double c, double lam, const QuadratureScheme& scheme);

double stability_distance(const RadialProfile& u, const CknParams& params, StabilityVariant v, double c,
                          double lam, const QuadratureScheme& scheme);

} // namespace ckn
