#pragma once

#include <functional>

#include "vpb/report.hpp"
#include "vpb/vec.hpp"

namespace vpb {

enum class ProfileKind { polynomial_bump };

/// Steady radial background density in velocity space. The shipped family
/// is the compactly supported bump
///     F_R(u) = kappa (W^2 - u^2)^3   for u <= W,   0 beyond,
/// the lowest-degree polynomial bump that is C^2 across u = W with
/// F_R'' (0) < 0 and strict decrease on (0, W).
struct BackgroundProfile {
    double W = 1.0;      // velocity-support radius
    double kappa = 1.0;  // amplitude
    ProfileKind kind = ProfileKind::polynomial_bump;

    double radial(double u) const;         // F_R(u)
    double radial_deriv(double u) const;   // F_R'(u)
    double radial_deriv2(double u) const;  // F_R''(u)
    double peak() const;                   // F_R(0)

    /// Inverse of F_R on [0, W]; h is clamped into [0, peak()].
    double radial_inverse(double h) const;

    double density(const Vec3& v) const;  // F(v) = F_R(|v|)
    Vec3 gradient(const Vec3& v) const;   // F_R'(|v|) v/|v|, zero at v = 0
};

/// Energy functionals derived from the background:
///   sigma(h) = -int_0^{min(h, F(0))} (F_R^{-1}(s))^2 ds      (nonpositive)
///   S(h, eta) = (h - F(eta)) eta^2 + sigma(h) - sigma(F(eta)) (nonnegative)
/// S is the convex relative-energy integrand whose phase-space integral is
/// a priori bounded along solutions.
struct EnergyFunctionals {
    BackgroundProfile profile;
    double f0_peak = 0.0;  // F(0)

    explicit EnergyFunctionals(const BackgroundProfile& p);

    double sigma(double h) const;
    double relative_energy(double h, double eta) const;  // S(h, eta)
};

/// Quadrature route for sigma. Substitutes s = F_R(u) so the integrand's
/// inverse-function derivative singularity at s -> F(0) disappears:
///   sigma(h) = int_{u_h}^{W} u^2 F_R'(u) du,  u_h = F_R^{-1}(min(h, F(0))).
double sigma_by_quadrature(const BackgroundProfile& p, double h, double abs_tol = 1e-10);

/// Checks the admissibility clauses of a radial background profile:
/// nonnegativity, C^2 continuity across the support edge (Richardson-
/// extrapolated one-sided second-derivative jump), concavity at the
/// origin, strict decrease on (0, W), and exact vanishing beyond W.
ConditionReport check_background_profile(const std::function<double(double)>& f_r,
                                         double support_radius, double tol = 1e-6);
ConditionReport check_background_profile(const BackgroundProfile& p, double tol = 1e-6);

}  // namespace vpb
