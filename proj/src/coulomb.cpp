#include "vpb/coulomb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vpb/quad.hpp"

namespace vpb {

void RadialDensity::validate() const {
    if (nodes.size() < 2 || nodes.size() != values.size())
        throw std::invalid_argument("RadialDensity: need matching nodes/values, at least 2");
    if (nodes.front() != 0.0)
        throw std::invalid_argument("RadialDensity: first node must be r = 0");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1]))
            throw std::invalid_argument("RadialDensity: nodes must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("RadialDensity: non-finite value");
}

double RadialDensity::operator()(double r) const {
    if (r <= 0.0) return values.front();
    if (r >= nodes.back()) {
        if (values.back() == 0.0) return 0.0;
        return values.back() *
               std::pow(decay_weight(nodes.back()) / decay_weight(r), tail_exponent);
    }
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
    const double t = (r - nodes[i]) / (nodes[i + 1] - nodes[i]);
    return values[i] + t * (values[i + 1] - values[i]);
}

namespace {

// Fritsch-Carlson monotone slopes for cubic Hermite interpolation.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n == 2) {
        m[0] = m[1] = (y[1] - y[0]) / (x[1] - x[0]);
        return m;
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double m0 = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m0 * d0 <= 0.0)
            m0 = 0.0;
        else if (d0 * d1 < 0.0 && std::abs(m0) > 3.0 * std::abs(d0))
            m0 = 3.0 * d0;
        return m0;
    };
    m[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return m;
}

bool nodes_uniform(const std::vector<double>& nodes) {
    const double h = nodes[1] - nodes[0];
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i)
        if (std::abs(nodes[i + 1] - nodes[i] - h) > 1e-12 * h) return false;
    return true;
}

}  // namespace

RadialFieldTable RadialFieldTable::from_samples(std::vector<double> nodes,
                                                std::vector<double> e_values) {
    RadialFieldTable t;
    t.nodes = std::move(nodes);
    t.values = std::move(e_values);
    if (t.nodes.size() < 2 || t.nodes.size() != t.values.size())
        throw std::invalid_argument("RadialFieldTable: bad sample layout");
    t.slopes = pchip_slopes(t.nodes, t.values);
    t.uniform = nodes_uniform(t.nodes);
    t.inv_step = t.uniform ? 1.0 / (t.nodes[1] - t.nodes[0]) : 0.0;
    t.enclosed_at_rmax = t.values.back() * t.nodes.back() * t.nodes.back();
    return t;
}

namespace {

// Enclosed charge carried by the tail model between the last node and r.
double tail_enclosed_charge(const RadialFieldTable& t, double r) {
    if (t.tail_density == 0.0 || r <= t.r_max()) return 0.0;
    const double scale = std::pow(decay_weight(t.r_max()), t.tail_exponent);
    const auto& gl = gauss_legendre(64);
    return 4.0 * M_PI * t.tail_density * scale *
           gl.integrate(
               [&](double s) {
                   return s * s * std::pow(decay_weight(s), -t.tail_exponent);
               },
               t.r_max(), r);
}

}  // namespace

double RadialFieldTable::eval(double r) const {
    if (r <= 0.0) return values.front();
    if (r >= nodes.back()) {
        const double q = enclosed_at_rmax + tail_enclosed_charge(*this, r);
        return q / (r * r);
    }
    std::size_t i;
    double t;
    if (uniform) {
        const double u = r * inv_step;
        i = std::min(static_cast<std::size_t>(u), nodes.size() - 2);
        t = u - static_cast<double>(i);
    } else {
        const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
        i = static_cast<std::size_t>(it - nodes.begin()) - 1;
        t = (r - nodes[i]) / (nodes[i + 1] - nodes[i]);
    }
    const double h = nodes[i + 1] - nodes[i];
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * values[i] + (t3 - 2.0 * t2 + t) * h * slopes[i] +
           (-2.0 * t3 + 3.0 * t2) * values[i + 1] + (t3 - t2) * h * slopes[i + 1];
}

double RadialFieldTable::eval_deriv(double r) const {
    if (r <= 0.0) return slopes.front();
    if (r >= nodes.back()) {
        // d/dr [Q(r)/r^2] = 4 pi rho_tail(r) - 2 e(r)/r
        double rho_tail = 0.0;
        if (tail_density != 0.0)
            rho_tail = tail_density *
                       std::pow(decay_weight(nodes.back()) / decay_weight(r), tail_exponent);
        return 4.0 * M_PI * rho_tail - 2.0 * eval(r) / r;
    }
    std::size_t i;
    double t;
    if (uniform) {
        const double u = r * inv_step;
        i = std::min(static_cast<std::size_t>(u), nodes.size() - 2);
        t = u - static_cast<double>(i);
    } else {
        const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
        i = static_cast<std::size_t>(it - nodes.begin()) - 1;
        t = (r - nodes[i]) / (nodes[i + 1] - nodes[i]);
    }
    const double h = nodes[i + 1] - nodes[i];
    const double t2 = t * t;
    return ((6.0 * t2 - 6.0 * t) * values[i] + (3.0 * t2 - 4.0 * t + 1.0) * h * slopes[i] +
            (-6.0 * t2 + 6.0 * t) * values[i + 1] + (3.0 * t2 - 2.0 * t) * h * slopes[i + 1]) /
           h;
}

CartesianFieldGrid CartesianFieldGrid::from_function(
    double half_extent, int n, const std::function<Vec3(const Vec3&)>& field) {
    if (n < 2 || n > 48) throw std::invalid_argument("CartesianFieldGrid: n must be in [2, 48]");
    CartesianFieldGrid g;
    g.half_extent = half_extent;
    g.n = n;
    g.samples.resize(static_cast<std::size_t>(n) * n * n);
    const double h = 2.0 * half_extent / (n - 1);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const Vec3 x{-half_extent + ix * h, -half_extent + iy * h,
                             -half_extent + iz * h};
                g.samples[(static_cast<std::size_t>(ix) * n + iy) * n + iz] = field(x);
            }
    return g;
}

Vec3 CartesianFieldGrid::evaluate(const Vec3& x, bool* outside) const {
    const double h = 2.0 * half_extent / (n - 1);
    double u[3] = {(x.x + half_extent) / h, (x.y + half_extent) / h, (x.z + half_extent) / h};
    bool out = false;
    int idx[3];
    double t[3];
    for (int d = 0; d < 3; ++d) {
        if (u[d] < 0.0 || u[d] > n - 1) out = true;
        const double c = std::clamp(u[d], 0.0, double(n - 1));
        idx[d] = std::min(static_cast<int>(c), n - 2);
        t[d] = c - idx[d];
    }
    if (outside) *outside = out;
    Vec3 result{0, 0, 0};
    for (int dx = 0; dx < 2; ++dx)
        for (int dy = 0; dy < 2; ++dy)
            for (int dz = 0; dz < 2; ++dz) {
                const double w = (dx ? t[0] : 1 - t[0]) * (dy ? t[1] : 1 - t[1]) *
                                 (dz ? t[2] : 1 - t[2]);
                result += w * samples[(static_cast<std::size_t>(idx[0] + dx) * n + idx[1] + dy) *
                                          n +
                                      idx[2] + dz];
            }
    return result;
}

Mat3 CartesianFieldGrid::gradient(const Vec3& x, bool* outside) const {
    // derivative of the trilinear interpolant inside the containing cell
    const double h = 2.0 * half_extent / (n - 1);
    bool out = false;
    Mat3 j;
    const Vec3 steps[3] = {{h, 0, 0}, {0, h, 0}, {0, 0, h}};
    for (int d = 0; d < 3; ++d) {
        bool o1 = false, o2 = false;
        Vec3 plus = evaluate(x + 0.5 * steps[d], &o1);
        Vec3 minus = evaluate(x - 0.5 * steps[d], &o2);
        out = out || o1 || o2;
        j(0, d) = (plus.x - minus.x) / h;
        j(1, d) = (plus.y - minus.y) / h;
        j(2, d) = (plus.z - minus.z) / h;
    }
    if (outside) *outside = out;
    return j;
}

Vec3 FieldState::evaluate(const Vec3& x, bool* outside) const {
    if (mode == Mode::cartesian) return cartesian.evaluate(x, outside);
    const double r = norm(x);
    if (outside) *outside = radial.outside(r);
    if (r < 1e-300) return {0.0, 0.0, 0.0};
    return (radial.eval(r) / r) * x;
}

Mat3 FieldState::gradient(const Vec3& x, bool* outside) const {
    if (mode == Mode::cartesian) return cartesian.gradient(x, outside);
    const double r = norm(x);
    if (outside) *outside = radial.outside(r);
    if (r < 1e-10) {
        Mat3 iso = Mat3::identity();
        iso *= radial.eval_deriv(0.0);
        return iso;
    }
    // grad(e(r) x/r) = e'(r) rhat rhat^T + e(r)/r (I - rhat rhat^T)
    const Vec3 rhat = (1.0 / r) * x;
    const double ep = radial.eval_deriv(r);
    const double eor = radial.eval(r) / r;
    Mat3 rr = outer(rhat, rhat);
    Mat3 iso = Mat3::identity();
    iso *= eor;
    rr *= ep - eor;
    return iso + rr;
}

double FieldState::sup_radial() const {
    double s = 0.0;
    for (double v : radial.values) s = std::max(s, std::abs(v));
    return s;
}

FieldState solve_field_radial(const RadialDensity& rho, double time) {
    rho.validate();
    if (rho.has_tail() && rho.tail_exponent <= 3.0)
        throw std::invalid_argument(
            "solve_field_radial: non-integrable density tail (tail_exponent <= 3)");

    const std::size_t n = rho.nodes.size();
    std::vector<double> e(n, 0.0);
    double q_enc = 0.0;  // running 4 pi int rho s^2 ds, exact for the linear interpolant
    for (std::size_t i = 1; i < n; ++i) {
        const double r0 = rho.nodes[i - 1], r1 = rho.nodes[i];
        const double b = (rho.values[i] - rho.values[i - 1]) / (r1 - r0);
        const double a = rho.values[i - 1] - b * r0;
        const double cell = a * (r1 * r1 * r1 - r0 * r0 * r0) / 3.0 +
                            b * (r1 * r1 * r1 * r1 - r0 * r0 * r0 * r0) / 4.0;
        q_enc += 4.0 * M_PI * cell;
        e[i] = q_enc / (r1 * r1);
    }

    FieldState state;
    state.time = time;
    state.mode = FieldState::Mode::radial;
    state.radial = RadialFieldTable::from_samples(rho.nodes, std::move(e));
    state.radial.tail_density = rho.has_tail() ? rho.values.back() : 0.0;
    state.radial.tail_exponent = rho.tail_exponent;
    return state;
}

OracleResult oracle_field(const std::function<double(const Vec3&)>& rho, const Vec3& x,
                          double tol, double domain_radius, long max_evaluations) {
    // E(x) = -int_0^rcut int_{S^2} rho(x + r w) w dOmega dr; the r^-2 kernel
    // cancels against the r^2 volume element.
    const double r_cut = norm(x) + domain_radius;

    // orthonormal frame with a3 along x (or z for x = 0)
    Vec3 a3 = norm(x) > 0 ? (1.0 / norm(x)) * x : Vec3{0, 0, 1};
    Vec3 seed = std::abs(a3.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 a1 = cross(a3, seed);
    a1 *= 1.0 / norm(a1);
    Vec3 a2 = cross(a3, a1);

    constexpr int n_phi = 48;
    long evals = 0;
    bool inner_converged = true;

    auto angular_slice = [&](double r, double mu) {
        // integral over phi at fixed (r, mu), trapezoid on the periodic circle
        const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        Vec3 acc{0, 0, 0};
        for (int k = 0; k < n_phi; ++k) {
            const double phi = 2.0 * M_PI * k / n_phi;
            const Vec3 w = mu * a3 + (s * std::cos(phi)) * a1 + (s * std::sin(phi)) * a2;
            acc += rho(x + r * w) * w;
            ++evals;
        }
        return (2.0 * M_PI / n_phi) * acc;
    };

    const double inner_tol = tol / (3.0 * std::max(1.0, r_cut));
    auto radial_integrand = [&](double r) {
        auto res = integrate_adaptive3([&](double mu) { return angular_slice(r, mu); }, -1.0,
                                       1.0, inner_tol, 1e-12,
                                       std::max<long>(20'000, max_evaluations / 4000));
        if (!res.converged) inner_converged = false;
        return res.value;
    };

    auto outer = integrate_adaptive3(radial_integrand, 0.0, r_cut, tol / 3.0, 1e-10,
                                     max_evaluations / n_phi / 16);

    OracleResult result;
    result.field = -1.0 * outer.value;
    result.error_estimate = outer.error_estimate + 2.0 * inner_tol * r_cut;
    result.evaluations = evals;
    result.converged = outer.converged && inner_converged;
    return result;
}

}  // namespace vpb
