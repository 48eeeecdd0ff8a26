#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ckn/functionals.hpp"
#include "ckn/manifold.hpp"
#include "ckn/params.hpp"
#include "ckn/profile.hpp"
#include "ckn/sampling.hpp"

namespace ckn {

// Corpus ---------------------------------------------------------------------

struct CorpusEntry {
    RadialProfile profile;
    std::string kind; // bump, extremal, perturbed, q-extremal, custom
    double eps = 0.0; // perturbation size for perturbed entries
    /// Parameter set the entry was built for; empty means every set.
    std::optional<std::size_t> params_index;
};

struct Corpus {
    std::vector<CknParams> params_sets;
    std::vector<CorpusEntry> profiles;
    std::uint64_t seed = 0;

    /// (profile index, params index) in deterministic order.
    std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
    /// Entries of one kind, keeping the parameter sets.
    Corpus only_kind(const std::string& kind) const;
    /// Entries tied to params set `index` (or to every set).
    Corpus for_params(std::size_t index) const;
    nlohmann::json to_json() const;
};

/// Per parameter set: 5 seeded bumps inside [0.1, 10], the extremals with
/// c = 1 and lam in {0.5, 1, 2}, the lam = 1 extremal perturbed by
/// eps in {0.01, 0.1, 0.5} at two bump placements, and the Q-family
/// profile when p = 2 and (a, b) lies in a Q region.
Corpus build_default_corpus(const std::vector<CknParams>& params_sets, std::uint64_t seed);

/// Reason the pair fails the integrability preconditions of ckn_terms, or
/// nothing when it passes.
std::optional<std::string> integrability_issue(const RadialProfile& u, const CknParams& params,
                                               const QuadratureScheme& scheme);

// Identity campaign -----------------------------------------------------------

struct IdentityRow {
    std::size_t profile_index = 0;
    std::size_t params_index = 0;
    std::string label;
    CknParams params;
    double lhs_41 = 0.0; // grad + (p-1) mass - defect mixed
    double rhs_41 = 0.0;
    double residual_41 = 0.0; // relative to the magnitude of the terms
    double lhs_42 = 0.0;      // deficit_si
    double rhs_42 = 0.0;
    double residual_42 = 0.0;
    bool skipped = false;
    bool passed = false;
    std::string note;
};

struct IdentityReport {
    std::vector<IdentityRow> rows;
    double tolerance = 1e-6;
    int pass_count = 0;
    int fail_count = 0;
    int skipped_count = 0;
    double max_residual = 0.0;
    bool all_passed() const { return fail_count == 0; }
};

IdentityReport verify_identities(const Corpus& corpus, const QuadratureScheme& scheme, Exec exec = {},
                                 double tolerance = 1e-6);

// Stability constants ---------------------------------------------------------

struct StabilityRow {
    std::size_t profile_index = 0;
    std::string label;
    std::string kind;
    double eps = 0.0;
    double deficit = 0.0;
    double deficit_condition = 0.0;
    double prefactor = 1.0;
    ProjectionResult projection;
    double ratio = 0.0; // deficit / (prefactor * distance)
    bool excluded = false;
    std::string note;
};

struct StabilityEstimate {
    TheoremId theorem = TheoremId::Thm1;
    CknParams params;
    double value = 0.0; // min ratio over the included rows
    std::string witness_label;
    int included_count = 0;
    int excluded_count = 0;
    std::vector<StabilityRow> rows;
};

/// Empirical stability constant of `theorem` over the corpus entries that
/// apply to `params`: the smallest deficit / (prefactor * projected
/// distance). Rows with distance below 1e3 times its quadrature resolution
/// are excluded and counted. Throws HypothesisViolation, InvalidArgument
/// (empty corpus or thm6) or AllExcluded.
StabilityEstimate estimate_stability_constant(const Corpus& corpus, const CknParams& params, TheoremId theorem,
                                              const QuadratureScheme& scheme, const ProjectionConfig& cfg = {});

/// Deficit used for each theorem: deficit_si for Thm1/Thm2/ThmC,
/// deficit_sni for Thm3/Thm4/Thm5.
bool uses_scale_invariant_deficit(TheoremId theorem);

// Scaling laws ---------------------------------------------------------------

struct ScalingReport {
    double lam = 1.0;
    double delta_ratio = 0.0;
    double grad_ratio = 0.0;
    double grad_expected = 0.0;
    double mass_ratio = 0.0;
    double mass_expected = 0.0;
    double mixed_ratio = 0.0;
    double max_rel_error = 0.0; // over the four comparisons
};

/// Compares u with scale_transform(u, params, lam).
ScalingReport scaling_law_check(const RadialProfile& u, const CknParams& params, double lam,
                                const QuadratureScheme& scheme);

// Poincare checks ------------------------------------------------------------

struct PoincareConfig {
    double p = 2.0;
    double rho = 0.0;
    double sigma = 1.0;
    double theta = 1.0;
    double lam = 1.0;
    /// Disjoint sorted [r_i, R_i]; ignored when `all` is set.
    std::vector<std::pair<double, double>> annuli;
    bool all = false;

    /// Throws InvalidArgument when the weight or the domain is inadmissible.
    void validate(int N) const;
    std::string domain_text() const;
};

struct PoincareReport {
    double lhs = 0.0;
    double rhs_core = 0.0;
    double c_star = 0.0;
    double ratio = 0.0; // +inf when rhs_core vanishes
    bool rhs_zero = false;
    bool passed = false;
};

PoincareReport poincare_check(const RadialProfile& f, const PoincareConfig& cfg, int N,
                              const QuadratureScheme& scheme);

struct PoincareScaling {
    PoincareReport original; // (f, lam) on the domain
    PoincareReport rescaled; // (f(lam .), 1) on the domain divided by lam
    double rel_diff = 0.0;
    bool passed = false;
};

PoincareScaling poincare_scaling_check(const RadialProfile& f, const PoincareConfig& cfg, int N,
                                       const QuadratureScheme& scheme, double tolerance = 1e-8);

struct ChangeOfVariablesReport {
    double lhs = 0.0; // int f(s) s^{N-1} ds
    double rhs = 0.0; // k int f(r^k) r^{kN-1} dr
    double rel_diff = 0.0;
    bool passed = false;
};

ChangeOfVariablesReport change_of_variables_check(const RadialProfile& f, double lam_exp, int N,
                                                  const QuadratureScheme& scheme, double tolerance = 1e-8);

// Quadrature stability -------------------------------------------------------

struct NodeDoublingReport {
    double max_rel_diff = 0.0;
    std::string worst_label;
    int pairs = 0;
};

/// Largest relative change of the three terms when the panel rule goes
/// from n to 2n nodes.
NodeDoublingReport node_doubling_check(const Corpus& corpus, const QuadratureScheme& scheme, Exec exec = {});

} // namespace ckn
