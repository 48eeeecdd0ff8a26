#pragma once

// Reference values computed offline at 30 digits with mpmath (quadrature of
// the radial integrals, or closed forms) and frozen here.

namespace oracle {

// Infimum of g_p / kernel over the reduced (|X| = 1, |Y - X|, angle) scan.
inline constexpr double cp_1_1 = 0.04354692507258632842601;
inline constexpr double cp_1_5 = 0.3284271247461900976034;
inline constexpr double cp_1_9 = 0.8321319661472296639254;
inline constexpr double cp_2_5 = 0.7680186634970625464273;
inline constexpr double cp_3 = 0.5857864376269049511983;
inline constexpr double cp_4 = 1.0 / 3.0;

// exp(-r^s/s), s = 1/3, at (N, p, a, b) = (3, 1.5, 4/3, 2/3).
inline constexpr double thm1_ext_grad = 0.827415349093608095726786734691072;
inline constexpr double thm1_ext_mass = 0.827415349093608095726786734691072;
inline constexpr double thm1_ext_mixed = 1.86168453546061821538527015101891;

// exp(-r^s/s), s = 1/2, at (5, 2.5, 1, 0.5).
inline constexpr double lp_ext_grad = 0.404258996268620129027460751354858;
inline constexpr double lp_ext_mixed = 0.505323745335775161284325939193548;

// bump_profile(1, 2, 1) at (3, 2, 0, 0).
inline constexpr double bump_grad = 0.0630370408297462185795867560388737;
inline constexpr double bump_mass = 0.0027564747052062208442688815269856;
inline constexpr double bump_mixed = 0.00182815512322960506019494992739741;

// Same bump against c e^{-r} in L^2(R^3): best c and squared distance.
inline constexpr double bump_proj_c = 0.014012697674359400123322878508;
inline constexpr double bump_proj_dist = 0.00213960509280711847863798998525;

// f(r) = r on the annulus [1, 2] in R^3, weight e^{-r}, p = 2.
inline constexpr double poincare_lhs = 6.10781373231298122063696921789;
inline constexpr double poincare_c = 1.52934657058720062274813654582;
inline constexpr double poincare_rhs = 0.490420881853577447619509562048;

} // namespace oracle
