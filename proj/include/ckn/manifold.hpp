#pragma once

#include <string>
#include <vector>

#include "ckn/functionals.hpp"
#include "ckn/sampling.hpp"

namespace ckn {

struct ProjectionConfig {
    /// lam window relative to the natural scale (mass/grad)^{1/(p(b-a+1))}.
    double window_lo = 1e-3;
    double window_hi = 1e3;
    int grid_points = 61;
    /// Relative tolerance of the golden refinement in log lam.
    double tol = 1e-8;
    int max_refine = 120;
    /// Skip the closed-form inner minimizer (tests compare the two).
    bool force_golden = false;
    Exec exec{};
};

struct ProjectionResult {
    double c_star = 0.0;
    double lam_star = 1.0;
    double distance = 0.0;
    /// Quadrature resolution of `distance` (rel_tol times the magnitude
    /// integral plus the accepted panel differences).
    double distance_condition = 0.0;
    long evaluations = 0;
    bool converged = false;
    /// Best grid point sat on the edge of the lam window.
    bool boundary_hit = false;
    StabilityVariant variant = StabilityVariant::Thm2Dist;
};

/// Approximate inf over c (and lam when free) of stability_distance. The
/// inner problem in c is convex and is solved on a fixed node rule captured
/// for each lam; the reported distance is re-evaluated adaptively at the
/// final (c*, lam*). Throws ZeroFunction for u = 0.
ProjectionResult project(const RadialProfile& u, const CknParams& params, StabilityVariant variant,
                         const QuadratureScheme& scheme, const ProjectionConfig& cfg = {});

/// Inner minimization only, at a fixed lam.
ProjectionResult project_at(const RadialProfile& u, const CknParams& params, StabilityVariant variant,
                            double lam, const QuadratureScheme& scheme, const ProjectionConfig& cfg = {});

/// lam^{(N-(p-1)a-b-1)/p} f(lam r).
RadialProfile scale_transform(const RadialProfile& u, const CknParams& params, double lam);

/// Two separated bumps of opposite sign: a profile far from the manifold in
/// both the gradient and the mass distance.
RadialProfile dipole_profile();

struct CertificateStep {
    std::string claim;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0; // rhs - lhs
    bool holds = false;
};

struct CounterexampleCase {
    std::string side; // "grad" or "mass"
    double C = 0.0;
    double lam = 1.0;
    double delta = 0.0;        // deficit of u
    double delta_scaled = 0.0; // deficit of u_lam
    double term = 0.0;         // grad or mass term of u
    double term_scaled = 0.0;  // same for u_lam
    ProjectionResult projection;
    std::vector<CertificateStep> chain;
    bool certified = false;
};

struct CounterexampleReport {
    CknParams params;
    std::string profile_label;
    double C1 = 0.0;
    double C2 = 0.0;
    double delta = 0.0;
    std::vector<CounterexampleCase> cases;
    /// Final claim delta(u_lam) <= C1 inf grad-dist + C2 inf mass-dist.
    CertificateStep final_claim;
    bool certified = false;
};

/// Builds the dilated profile u_lam for which the deficit is dominated by
/// C1 times the gradient distance (or C2 times the mass distance) to the
/// manifold. Throws HypothesisViolation when the nonexistence hypotheses
/// fail and InvalidArgument when C1, C2 are invalid or u is an extremal.
CounterexampleReport counterexample_search(const RadialProfile& u, const CknParams& params, double C1, double C2,
                                           const QuadratureScheme& scheme, const ProjectionConfig& cfg = {});

} // namespace ckn
