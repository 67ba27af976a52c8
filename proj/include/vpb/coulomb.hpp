#pragma once

#include <functional>
#include <vector>

#include "vpb/vec.hpp"

namespace vpb {

/// Radial charge density on increasing nodes r_0 = 0 < ... < r_N.
/// Between nodes the density is the piecewise-linear interpolant; beyond
/// r_N it follows the power-law tail model
///     rho(r) = values.back() * (R(r_N)/R(r))^tail_exponent.
struct RadialDensity {
    std::vector<double> nodes;
    std::vector<double> values;
    double tail_exponent = 6.0;

    void validate() const;  // throws std::invalid_argument on bad layout
    double r_max() const { return nodes.back(); }
    double operator()(double r) const;
    bool has_tail() const { return values.back() != 0.0; }
};

/// Radial field table: e(r) at the density nodes with monotone cubic
/// (Fritsch-Carlson) interpolation, E(x) = e(|x|) x/|x|. Beyond the last
/// node the enclosed charge continues with the density tail model when one
/// is present, otherwise e(r) = e(r_N) (r_N/r)^2.
struct RadialFieldTable {
    std::vector<double> nodes;
    std::vector<double> values;  // e at nodes; values[0] = 0
    std::vector<double> slopes;  // interpolant derivative at nodes
    bool uniform = false;
    double inv_step = 0.0;
    // tail model carried over from the density
    double tail_density = 0.0;
    double tail_exponent = 6.0;
    double enclosed_at_rmax = 0.0;  // e(r_N) r_N^2

    static RadialFieldTable from_samples(std::vector<double> nodes, std::vector<double> e_values);

    double r_max() const { return nodes.back(); }
    double eval(double r) const;
    double eval_deriv(double r) const;
    bool outside(double r) const { return r > nodes.back(); }
};

/// Cartesian field samples on a uniform n^3 grid over [-half_extent,
/// half_extent]^3, trilinear interpolation. Low-resolution cross-check
/// path only.
struct CartesianFieldGrid {
    double half_extent = 0.0;
    int n = 0;
    std::vector<Vec3> samples;  // index = (ix * n + iy) * n + iz

    static CartesianFieldGrid from_function(double half_extent, int n,
                                            const std::function<Vec3(const Vec3&)>& field);

    Vec3 evaluate(const Vec3& x, bool* outside = nullptr) const;
    Mat3 gradient(const Vec3& x, bool* outside = nullptr) const;
};

/// Spatial samples of the self-consistent field at one time.
struct FieldState {
    enum class Mode { radial, cartesian };

    double time = 0.0;
    Mode mode = Mode::radial;
    RadialFieldTable radial;
    CartesianFieldGrid cartesian;

    Vec3 evaluate(const Vec3& x, bool* outside = nullptr) const;
    /// Jacobian of the interpolated field; in radial mode the exact
    /// analytic Jacobian of e(r) x/|x| built from the interpolant
    /// derivative.
    Mat3 gradient(const Vec3& x, bool* outside = nullptr) const;
    double sup_radial() const;  // max |e| over nodes (radial mode)
};

/// Shell-theorem fast path: e(r) = Q_enc(r)/r^2 with Q_enc the exact
/// integral of 4 pi rho(s) s^2 over the piecewise-linear density. The
/// Coulomb kernel carries no 1/(4 pi) normalization. Throws when the
/// density tail is non-integrable (tail_exponent <= 3 with a nonzero
/// last value).
FieldState solve_field_radial(const RadialDensity& rho, double time = 0.0);

struct OracleResult {
    Vec3 field;
    double error_estimate = 0.0;
    bool converged = false;
    long evaluations = 0;
};

/// Direct quadrature of E(x) = int rho(y) (x-y)/|x-y|^3 dy over the ball
/// |y| <= domain_radius, in spherical coordinates centered at x so the
/// kernel singularity cancels against the volume element. tol is an
/// absolute target on each field component.
OracleResult oracle_field(const std::function<double(const Vec3&)>& rho, const Vec3& x,
                          double tol, double domain_radius, long max_evaluations = 40'000'000);

}  // namespace vpb
