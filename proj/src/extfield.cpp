#include "vpb/extfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vpb/io_util.hpp"

namespace vpb {

namespace {

// quintic smoothstep: 0 below lo, 1 above hi, C^2 at both ends
double smoothstep5(double r, double lo, double hi) {
    if (r <= lo) return 0.0;
    if (r >= hi) return 1.0;
    const double s = (r - lo) / (hi - lo);
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstep5_deriv(double r, double lo, double hi) {
    if (r <= lo || r >= hi) return 0.0;
    const double s = (r - lo) / (hi - lo);
    return 30.0 * s * s * (1.0 - s) * (1.0 - s) / (hi - lo);
}

// matrix of v -> m x v
Mat3 cross_matrix(const Vec3& m) {
    Mat3 r;
    r(0, 1) = -m.z;
    r(0, 2) = m.y;
    r(1, 0) = m.z;
    r(1, 2) = -m.x;
    r(2, 0) = -m.y;
    r(2, 1) = m.x;
    return r;
}

}  // namespace

Vec3 ExternalField::value(double, const Vec3& x) const {
    switch (kind) {
        case FieldKind::zero:
            return {0.0, 0.0, 0.0};
        case FieldKind::dipole: {
            const Vec3 m = amplitude * dipole_axis;
            const double R = decay_weight(x);
            return (1.0 / (R * R * R)) * cross(m, x);
        }
        case FieldKind::coulomb_tail: {
            const double r = norm(x);
            if (r <= 0.5 * cutoff_radius || r == 0.0) return {0.0, 0.0, 0.0};
            const double q = smoothstep5(r, 0.5 * cutoff_radius, cutoff_radius);
            return (amplitude * q / (r * r * r)) * x;
        }
    }
    return {0.0, 0.0, 0.0};
}

Mat3 ExternalField::jacobian(double, const Vec3& x) const {
    switch (kind) {
        case FieldKind::zero:
            return Mat3::zero();
        case FieldKind::dipole: {
            const Vec3 m = amplitude * dipole_axis;
            const double R = decay_weight(x);
            const double inv_r3 = 1.0 / (R * R * R);
            const double inv_r5 = inv_r3 / (R * R);
            Mat3 j = cross_matrix(m);
            j *= inv_r3;
            Mat3 second = outer(cross(m, x), x);
            second *= -3.0 * inv_r5;
            return j + second;
        }
        case FieldKind::coulomb_tail: {
            const double r = norm(x);
            if (r <= 0.5 * cutoff_radius || r == 0.0) return Mat3::zero();
            const double q = smoothstep5(r, 0.5 * cutoff_radius, cutoff_radius);
            const double qp = smoothstep5_deriv(r, 0.5 * cutoff_radius, cutoff_radius);
            const double phi = amplitude * q / (r * r * r);
            const double phi_prime = amplitude * (qp / (r * r * r) - 3.0 * q / (r * r * r * r));
            Mat3 j = outer(x, x);
            j *= phi_prime / r;
            Mat3 iso = Mat3::identity();
            iso *= phi;
            return j + iso;
        }
    }
    return Mat3::zero();
}

double ExternalField::divergence(double, const Vec3& x) const {
    // zero and dipole are solenoidal identities; coulomb_tail picks up
    // a q'(r)/r^2 on the mollification annulus.
    if (kind != FieldKind::coulomb_tail) return 0.0;
    const double r = norm(x);
    if (r == 0.0) return 0.0;
    const double qp = smoothstep5_deriv(r, 0.5 * cutoff_radius, cutoff_radius);
    return amplitude * qp / (r * r);
}

double ExternalField::far_field_coefficient(double) const {
    return kind == FieldKind::coulomb_tail ? amplitude : 0.0;
}

std::vector<Vec3> default_field_sample_grid(double r_min, double r_max, int n_radii) {
    static const Vec3 dirs[] = {
        {1, 0, 0}, {0, 1, 0},  {0, 0, 1},  {-1, 0, 0}, {0, -1, 0},
        {0, 0, -1}, {1, 1, 0}, {1, 0, 1},  {0, 1, 1},  {1, 1, 1},
        {-1, 1, 0}, {1, -1, 1}};
    std::vector<Vec3> grid;
    grid.reserve(static_cast<std::size_t>(n_radii) * std::size(dirs));
    for (int i = 0; i < n_radii; ++i) {
        const double r = r_min * std::pow(r_max / r_min, double(i) / (n_radii - 1));
        for (const Vec3& d : dirs) grid.push_back((r / norm(d)) * d);
    }
    return grid;
}

ConditionReport check_applied_field(const ExternalField& field,
                                    const std::vector<Vec3>& sample_grid, double p,
                                    double t) {
    if (sample_grid.empty()) throw std::invalid_argument("check_applied_field: empty grid");
    ConditionReport report;

    double sup_a_r2 = 0.0, sup_grad_r3 = 0.0, sup_div = 0.0;
    for (const Vec3& x : sample_grid) {
        const double R = decay_weight(x);
        sup_a_r2 = std::max(sup_a_r2, norm(field.value(t, x)) * R * R);
        sup_grad_r3 = std::max(sup_grad_r3, frobenius_norm(field.jacobian(t, x)) * R * R * R);
        sup_div = std::max(sup_div, std::abs(field.divergence(t, x)));
    }
    report.clauses.push_back({"amplitude_decay",
                              std::isfinite(sup_a_r2) ? ClauseStatus::pass : ClauseStatus::fail,
                              sup_a_r2,
                              "sup |A| R^2 (measured decay constant)"});
    report.clauses.push_back({"gradient_decay",
                              std::isfinite(sup_grad_r3) ? ClauseStatus::pass
                                                         : ClauseStatus::fail,
                              sup_grad_r3,
                              "sup |grad A| R^3"});
    report.clauses.push_back({"divergence_free",
                              sup_div == 0.0 ? ClauseStatus::pass : ClauseStatus::deviates,
                              sup_div,
                              sup_div == 0.0 ? "analytic identity"
                                             : "nonzero on the mollification annulus"});

    // Far-field clause: weighted residual |A - a(t) x/|x|^3| R^(p-1) over the
    // far samples. A residual sup that keeps growing with radius means the
    // family misses the required decay exponent.
    {
        const double a_t = field.far_field_coefficient(t);
        const double r_far =
            std::max(1.0, field.kind == FieldKind::coulomb_tail ? field.cutoff_radius : 1.0);
        double sup_near = 0.0, sup_out = 0.0, r_split = 0.0;
        std::vector<double> radii;
        for (const Vec3& x : sample_grid)
            if (norm(x) >= r_far) radii.push_back(norm(x));
        if (radii.empty()) throw std::invalid_argument("check_applied_field: no far samples");
        std::sort(radii.begin(), radii.end());
        r_split = radii[radii.size() / 2];
        for (const Vec3& x : sample_grid) {
            const double r = norm(x);
            if (r < r_far) continue;
            const Vec3 monopole = (a_t / (r * r * r)) * x;
            const double resid =
                norm(field.value(t, x) - monopole) * std::pow(decay_weight(x), p - 1.0);
            (r <= r_split ? sup_near : sup_out) = std::max(r <= r_split ? sup_near : sup_out, resid);
        }
        const double sup_total = std::max(sup_near, sup_out);
        ClauseStatus status = ClauseStatus::pass;
        std::string note = "sup |A - a(t) x/|x|^3| R^(p-1), samples with |x| >= " +
                           format_double(r_far);
        if (sup_total > 0.0 && sup_out > 1.1 * sup_near) {
            status = ClauseStatus::deviates;
            note += "; residual grows with radius (decay exponent below p-1)";
        }
        report.clauses.push_back({"far_field_coulomb", status, sup_total, note});
    }
    return report;
}

}  // namespace vpb
