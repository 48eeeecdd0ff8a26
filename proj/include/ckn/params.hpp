#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ckn {

/// Parameter tuple (N, p, a, b) of the first-order L^p CKN family.
///
/// The three weights appearing in the inequality are derived on demand:
/// |x|^{-pb} on the gradient, |x|^{-pa} on the mass, and
/// |x|^{-((p-1)a+b+1)} on the mixed term. The extremal family is
/// exp(-r^s / s) with s = b - a + 1 (the manifold exponent).
struct CknParams {
    int N = 3;
    double p = 2.0;
    double a = 0.0;
    double b = 0.0;

    /// Throws InvalidArgument unless N >= 1, p > 1 and a, b are finite.
    static CknParams make(int N, double p, double a, double b);

    double grad_weight() const { return p * b; }
    double mass_weight() const { return p * a; }
    double mixed_weight() const { return (p - 1.0) * a + b + 1.0; }
    double manifold_exponent() const { return b - a + 1.0; }
    /// N - (p-1)a - b - 1; the sharp constant is its absolute value over p.
    double scaling_defect() const { return N - mixed_weight(); }

    std::string describe() const;
};

bool operator==(const CknParams& lhs, const CknParams& rhs);

enum class Region { P1, P2, Q1, Q2, Diagonal, Other };

std::string_view to_string(Region region);

/// Region membership for the L^2 family. Ties: a = b + 1 is Diagonal; on
/// b = (N-2)/2 both P and Q predicates hold and the P tag is reported.
Region classify_region(int N, double a, double b);

/// True when (a, b) also satisfies the Q predicates (only possible on the
/// boundary b = (N-2)/2, where the P tag wins in classify_region).
bool also_in_q(int N, double a, double b);

inline bool is_p_region(Region r) { return r == Region::P1 || r == Region::P2; }
inline bool is_q_region(Region r) { return r == Region::Q1 || r == Region::Q2; }

/// Best constant of the L^2 inequality in each region.
double sharp_constant_l2(int N, double a, double b);

/// |N - (p-1)a - b - 1| / p.
double sharp_constant_lp(const CknParams& params);

enum class TheoremId { Thm1, Thm2, Thm3, Thm4, Thm5, Thm6, ThmC };

std::string_view to_string(TheoremId id);
TheoremId theorem_from_string(std::string_view name);

struct HypothesisCheck {
    std::string condition;
    bool holds = false;
};

/// Relative tolerance used for every equality hypothesis.
inline constexpr double kEqualityRelTol = 1e-12;

bool approx_equal(double x, double y, double rel_tol = kEqualityRelTol);

/// Evaluates each hypothesis of the theorem separately.
std::vector<HypothesisCheck> check_hypotheses(TheoremId theorem, const CknParams& params);

/// Conjunction of check_hypotheses.
bool hypotheses_hold(TheoremId theorem, const CknParams& params);

/// Conditions under which the two integral identities (and inequality
/// (ckn) with the extremal family exp(-r^s/s)) hold.
bool identity_hypotheses_hold(const CknParams& params);

} // namespace ckn
