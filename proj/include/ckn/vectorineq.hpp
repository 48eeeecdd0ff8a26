#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckn/sampling.hpp"

namespace ckn {

/// Pair of equal-length vectors together with the exponent they are
/// evaluated at. Scalar pairs are stored as 1-vectors.
struct VecPair {
    std::vector<double> x;
    std::vector<double> y;
    double p = 2.0;
};

/// Result of a one-sided scalar inequality lhs <= rhs.
struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; // rhs - lhs
    bool violated = false;
    std::string witness;

    // Secondary, sharper bound checked on the same input when it applies.
    struct Refined {
        double rhs = 0.0;
        double margin = 0.0;
        bool violated = false;
    };
    std::optional<Refined> refined;
};

/// Scan estimate of a best constant. `value` is the extreme ratio seen;
/// re-evaluating the ratio at `witness` reproduces it.
struct EmpiricalConstant {
    double value = 0.0;
    std::int64_t sample_count = 0;
    VecPair witness;
    std::string scan_description;
    std::uint64_t seed = 0;
    std::optional<double> gamma;
};

// Pointwise kernels ---------------------------------------------------------

/// |Y|^p - |X|^p - p|X|^{p-2} X.(Y-X). Close to the diagonal (|Y-X| small
/// against |X|) the value is computed from the integral Taylor remainder so
/// that it keeps full relative accuracy instead of cancelling.
double g_p(std::span<const double> X, std::span<const double> Y, double p);

/// Same quantity for collinear arguments X = x e, Y = y e with a unit e.
double g_p_scalar(double x, double y, double p);

/// Figalli-Zhang auxiliary vector z(x, s) with s = x + y. Requires p != 2.
std::vector<double> fz_z_vector(std::span<const double> x, std::span<const double> s, double p);

/// Quadratic part (1-gamma)/2 [p|x|^{p-2}|y|^2 + p(p-2)|z|^{p-2}(|x|-|x+y|)^2]
/// of the Figalli-Zhang lower bound. At x = 0 with p < 2 the bracket is
/// taken as its limit 0; at p = 2 the z term carries a zero factor.
double fz_quadratic_part(std::span<const double> x, std::span<const double> y, double p, double gamma);

/// The power term multiplying c_{p,gamma}: min{|y|^p, |x|^{p-2}|y|^2} for
/// p < 2 and |y|^p for p >= 2.
double fz_power_term(std::span<const double> x, std::span<const double> y, double p);

/// Full right-hand side fz_quadratic_part + c_pg * fz_power_term.
double fz_lower_bound(std::span<const double> x, std::span<const double> y, double p, double gamma,
                      double c_pg);

/// min{|Y-X|^p, |X|^{p-2}|Y-X|^2} for p < 2, |Y-X|^p for p >= 2.
double cor_lower_bound_kernel(std::span<const double> X, std::span<const double> Y, double p);

/// | |m|^{(p-2)/2} m - |n|^{(p-2)/2} n |^2 <= 4|m-n|^p, plus the
/// same-sign refinement with constant 1. Requires 1 < p < 2.
InequalityReport lemma_a_check(double m, double n, double p);

/// |m+n|^q <= C_q (|m|^q + |n|^q) with C_q = max(1, 2^{q-1}).
InequalityReport power_sum_bound_check(double m, double n, double q);

double power_sum_constant(double q);

/// |t|^{(p-2)/2} t, continuous at 0.
double half_power(double t, double p);

// Scalar facts behind the appendix estimate, each returning lhs - rhs of a
// strict "<" statement (so the fact holds when the value is negative).
double appendix_f(double t, double p); // t^{p/2} - 1 - (t-1)^{p/2}, t > 1
double appendix_g(double t, double p); // 1 - t^{p/2} - (1-t)^{p/2}, 0 < t < 1
double appendix_h(double t, double p); // t^{p/2} + 1 - 2(t+1)^{p/2}, t > 0

// Scanners ------------------------------------------------------------------

inline constexpr std::int64_t kMinCpSamples = 10000;

/// One stress sample of the pair distribution used by every vector scan:
/// uniform-on-sphere directions with log-uniform magnitudes in [1e-6, 1e6],
/// interleaved with near-collinear, near-equal and reduced-coordinate draws.
VecPair draw_pair(std::uint64_t seed, std::uint64_t index, double p);

/// Ratio g_p(X,Y)/cor_lower_bound_kernel(X,Y); NaN when the kernel is 0.
double cp_ratio(std::span<const double> X, std::span<const double> Y, double p);

/// (g_p - quadratic part)/power term with y = Y - X; NaN when the power
/// term is 0.
double cpg_ratio(std::span<const double> X, std::span<const double> Y, double p, double gamma);

/// Infimum of g_p/kernel over random pairs plus a dense reduced-coordinate
/// scan (|X| = 1, radius and angle of Y - X) refined by golden section.
/// Throws InvalidArgument for p <= 1 or sample_count < kMinCpSamples.
EmpiricalConstant estimate_cp(double p, std::int64_t sample_count, std::uint64_t seed,
                              Exec exec = {});

/// Same for c_{p,gamma}; gamma = 1 reproduces estimate_cp.
EmpiricalConstant estimate_cpg(double p, double gamma, std::int64_t sample_count, std::uint64_t seed,
                               Exec exec = {});

struct ViolationTally {
    std::string name;
    std::int64_t checked = 0;
    std::int64_t violations = 0;
    double worst_margin = 0.0; // most negative relative margin seen
    std::optional<VecPair> worst_witness;
};

/// Fresh-sample hunt for violations of g_p >= 0, g_p >= quadratic part for
/// each gamma, and g_p >= c_emp * kernel (relative margin 1e-12).
std::vector<ViolationTally> scan_vector_inequalities(double p, std::span<const double> gammas,
                                                     double c_emp, std::int64_t sample_count,
                                                     std::uint64_t seed, Exec exec = {});

/// Samples (m, n) in [-10, 10]^2 and p in (1, 2); tallies the factor-4 bound over all
/// samples and the refined bound over same-sign samples.
std::vector<ViolationTally> scan_lemma_a(std::int64_t sample_count, std::uint64_t seed,
                                         Exec exec = {});

} // namespace ckn
