#pragma once

#include <vector>

#include "vpb/report.hpp"
#include "vpb/vec.hpp"

namespace vpb {

enum class FieldKind { zero, dipole, coulomb_tail };

/// Applied (external) force field A(t, x). Shipped families:
///   zero         -- A = 0.
///   dipole       -- A = (m x X) / R^3(x), exactly divergence-free, decays
///                   like R^-2 but carries no Coulomb far field.
///   coulomb_tail -- A = a q(|x|) x/|x|^3 with a quintic smoothstep cutoff
///                   q (0 inside cutoff/2, 1 outside cutoff): exact Coulomb
///                   tail, divergence nonzero on the mollification annulus.
/// No closed-form family satisfies decay, exact solenoidality and the
/// Coulomb tail at once; check_applied_field reports where each family
/// deviates instead of hiding it.
struct ExternalField {
    FieldKind kind = FieldKind::zero;
    double amplitude = 0.0;      // |m| for dipole, tail strength a for coulomb_tail
    Vec3 dipole_axis = {0.0, 0.0, 1.0};
    double cutoff_radius = 1.0;  // coulomb_tail mollification radius

    Vec3 value(double t, const Vec3& x) const;
    Mat3 jacobian(double t, const Vec3& x) const;
    double divergence(double t, const Vec3& x) const;  // analytic

    /// Far-field monopole coefficient a(t); constant in the shipped
    /// families (amplitude for coulomb_tail, 0 otherwise).
    double far_field_coefficient(double t) const;
};

/// Evaluates the applied-field admissibility clauses over a sample grid:
/// |A| R^2 bounded (measured sup is the decay constant), |grad A| R^3
/// bounded, vanishing divergence, and the Coulomb far-field clause
/// |A - a(t) x/|x|^3| R^(p-1) bounded, for the scenario's p in (3, 4).
ConditionReport check_applied_field(const ExternalField& field,
                                    const std::vector<Vec3>& sample_grid, double p,
                                    double t = 0.0);

/// Deterministic radial sample grid: log-spaced radii times a fixed set
/// of directions.
std::vector<Vec3> default_field_sample_grid(double r_min = 0.25, double r_max = 60.0,
                                            int n_radii = 40);

}  // namespace vpb
