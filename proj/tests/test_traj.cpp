#include <doctest.h>

#include <cmath>

#include "vpb/traj.hpp"

using namespace vpb;

namespace {

// uniform ball of unit density: harmonic interior force, exactly linear
// field data so the interpolation is exact there
FieldHistory harmonic_history(double t0, double t1) {
    RadialDensity rho;
    for (int i = 0; i <= 400; ++i) {
        const double r = 8.0 * i / 400;
        rho.nodes.push_back(r);
        rho.values.push_back(r <= 1.0 ? 1.0 : 0.0);
    }
    FieldState a = solve_field_radial(rho, t0);
    FieldState b = solve_field_radial(rho, t1);
    return FieldHistory({a, b}, ExternalField{});
}

// constant uniform vector field via a cartesian snapshot pair
FieldHistory constant_history(const Vec3& field, double t0, double t1) {
    CartesianFieldGrid g =
        CartesianFieldGrid::from_function(50.0, 4, [&](const Vec3&) { return field; });
    FieldState a;
    a.time = t0;
    a.mode = FieldState::Mode::cartesian;
    a.cartesian = g;
    FieldState b = a;
    b.time = t1;
    return FieldHistory({a, b}, ExternalField{});
}

}  // namespace

TEST_CASE("free streaming is exact") {
    FieldHistory h = FieldHistory::zero(0.0, 2.0);
    const PhaseState start{{1.0, -2.0, 0.5}, {0.3, 0.7, -0.2}};
    for (double s : {0.0, 0.37, 1.0, 2.0}) {
        TraceResult res = trace(h, 0.5, start, s, 0.02);
        const Vec3 expect = start.x + (s - 0.5) * start.v;
        CHECK(norm(res.state.x - expect) < 1e-13);
        CHECK(norm(res.state.v - start.v) < 1e-15);
    }
}

TEST_CASE("constant force: uniformly accelerated motion to roundoff") {
    const Vec3 c{0.4, 0.0, 0.0};  // total field; acceleration is -c
    FieldHistory h = constant_history(c, 0.0, 2.0);
    const PhaseState start{{0.1, 0.2, 0.3}, {1.0, 0.0, -0.5}};
    const double t = 0.3, s = 1.7;
    TraceResult res = trace(h, t, start, s, 0.02);
    const double d = s - t;
    const Vec3 xe = start.x + d * start.v - (0.5 * d * d) * c;
    const Vec3 ve = start.v - d * c;
    CHECK(norm(res.state.x - xe) < 1e-12);
    CHECK(norm(res.state.v - ve) < 1e-12);
}

TEST_CASE("round trip converges at fourth order") {
    FieldHistory h = harmonic_history(0.0, 4.0);
    const PhaseState start{{0.5, 0.1, -0.2}, {0.2, -0.4, 0.1}};
    auto round_trip_error = [&](double dt) {
        TraceResult fwd = trace(h, 0.0, start, 3.0, dt);
        TraceResult back = trace(h, 3.0, fwd.state, 0.0, dt);
        return norm(back.state.x - start.x) + norm(back.state.v - start.v);
    };
    const double e1 = round_trip_error(0.1);
    const double e2 = round_trip_error(0.05);
    const double e3 = round_trip_error(0.025);
    CHECK(e1 / e2 >= 8.0);
    CHECK(e2 / e3 >= 8.0);
    CHECK(std::log2(e1 / e2) >= 3.5);
}

TEST_CASE("harmonic interior orbit matches the closed form") {
    FieldHistory h = harmonic_history(0.0, 4.0);
    const double omega = std::sqrt(4.0 * M_PI / 3.0);  // e(r) = (4 pi/3) r inside
    const PhaseState start{{0.2, 0.0, 0.0}, {0.0, 0.15, 0.0}};
    const double t = 2.5;
    TraceResult res = trace(h, 0.0, start, t, 0.005);
    const Vec3 xe = std::cos(omega * t) * start.x + (std::sin(omega * t) / omega) * start.v;
    const Vec3 ve = (-omega * std::sin(omega * t)) * start.x + std::cos(omega * t) * start.v;
    CHECK(norm(res.state.x - xe) < 1e-9);
    CHECK(norm(res.state.v - ve) < 1e-9);
}

TEST_CASE("phase volume: shear and translation maps give det exactly 1") {
    FieldHistory zero = FieldHistory::zero(0.0, 2.0);
    const PhaseState center{{0.4, -0.1, 0.2}, {0.1, 0.3, -0.2}};
    CHECK(std::abs(phase_volume_determinant(zero, 0.0, center, 1e-4, 1.5, 0.05) - 1.0) < 1e-12);

    FieldHistory constant = constant_history({0.3, -0.2, 0.1}, 0.0, 2.0);
    CHECK(std::abs(phase_volume_determinant(constant, 0.0, center, 1e-4, 1.5, 0.05) - 1.0) <
          1e-10);
}

TEST_CASE("phase volume: self-consistent-shaped field preserves volume at integrator order") {
    FieldHistory h = harmonic_history(0.0, 4.0);
    const PhaseState center{{0.3, 0.1, 0.0}, {0.05, -0.2, 0.1}};
    const double d1 = std::abs(phase_volume_determinant(h, 0.0, center, 1e-4, 2.0, 0.05) - 1.0);
    CHECK(d1 < 1e-4);
    const double d2 = std::abs(phase_volume_determinant(h, 0.0, center, 1e-4, 2.0, 0.025) - 1.0);
    CHECK(d2 < d1);
}

TEST_CASE("flow composition returns to the start at integrator accuracy") {
    FieldHistory h = harmonic_history(0.0, 4.0);
    const PhaseState start{{0.6, -0.3, 0.1}, {-0.1, 0.25, 0.3}};
    TraceResult mid = trace(h, 0.5, start, 2.7, 0.01);
    TraceResult back = trace(h, 2.7, mid.state, 0.5, 0.01);
    CHECK(norm(back.state.x - start.x) < 1e-9);
    CHECK(norm(back.state.v - start.v) < 1e-9);
}

TEST_CASE("central total field conserves angular momentum at integrator order") {
    // radial self-field plus the radial coulomb_tail applied field
    RadialDensity rho;
    for (int i = 0; i <= 300; ++i) {
        const double r = 6.0 * i / 300;
        rho.nodes.push_back(r);
        rho.values.push_back(std::exp(-r * r));
    }
    ExternalField tail{FieldKind::coulomb_tail, 0.2, {0, 0, 1}, 1.0};
    FieldState s0 = solve_field_radial(rho, 0.0);
    FieldState s1 = solve_field_radial(rho, 3.0);
    FieldHistory h({s0, s1}, tail);

    const PhaseState start{{1.2, 0.3, -0.5}, {0.2, -0.3, 0.4}};
    const Vec3 l0 = cross(start.x, start.v);
    auto drift = [&](double dt) {
        TraceResult res = trace(h, 0.0, start, 2.5, dt);
        return norm(cross(res.state.x, res.state.v) - l0);
    };
    const double e1 = drift(0.02);
    CHECK(e1 < 1e-6);
    CHECK(e1 / drift(0.01) > 8.0);  // conservation error shrinks at RK4 order
}

TEST_CASE("rotation equivariance about the dipole axis") {
    // dipole applied field plus radial self-field: rotating the initial
    // state about the axis rotates the whole characteristic
    RadialDensity rho;
    for (int i = 0; i <= 300; ++i) {
        const double r = 6.0 * i / 300;
        rho.nodes.push_back(r);
        rho.values.push_back(0.5 * std::exp(-r));
    }
    ExternalField dip{FieldKind::dipole, 0.3, {0, 0, 1}, 1.0};
    FieldHistory h({solve_field_radial(rho, 0.0), solve_field_radial(rho, 3.0)}, dip);

    const double ang = 1.1;
    auto rotz = [&](const Vec3& u) {
        return Vec3{std::cos(ang) * u.x - std::sin(ang) * u.y,
                    std::sin(ang) * u.x + std::cos(ang) * u.y, u.z};
    };
    const PhaseState start{{0.8, 0.2, 0.4}, {-0.1, 0.3, 0.2}};
    const PhaseState rotated{rotz(start.x), rotz(start.v)};
    TraceResult a = trace(h, 0.0, start, 2.0, 0.01);
    TraceResult b = trace(h, 0.0, rotated, 2.0, 0.01);
    CHECK(norm(b.state.x - rotz(a.state.x)) < 1e-9);
    CHECK(norm(b.state.v - rotz(a.state.v)) < 1e-9);
}

TEST_CASE("displacement check: free streaming saturates the bound exactly") {
    FieldHistory h = FieldHistory::zero(0.0, 1.0);
    const double qg = 0.8, horizon = 1.0;
    const PhaseState probe{{0.3, 0.0, 0.0}, {0.0, qg, 0.0}};  // |v| = Qg
    DisplacementReport rep = displacement_check(h, 0.0, probe, horizon, qg, 0.05);
    CHECK(rep.displacement_ok);
    CHECK(rep.max_displacement == doctest::Approx(horizon * qg).epsilon(1e-12));
    CHECK(!rep.radius_band_applicable);  // |x| < 2 T Qg
}

TEST_CASE("displacement check: far launch stays in the radius band") {
    FieldHistory h = FieldHistory::zero(0.0, 1.0);
    const double qg = 0.5, horizon = 1.0;
    const PhaseState probe{{2.0 * horizon * qg, 0.0, 0.0}, {0.0, qg, 0.0}};
    DisplacementReport rep = displacement_check(h, 0.0, probe, horizon, qg, 0.05);
    CHECK(rep.radius_band_applicable);
    CHECK(rep.displacement_ok);
    CHECK(rep.radius_band_ok);
    CHECK(rep.min_radius_ratio >= 0.5);
    CHECK(rep.max_radius_ratio <= 1.5);
}

TEST_CASE("leaving the sampled domain sets the far-field flag") {
    FieldHistory h = FieldHistory::zero(0.0, 10.0, 5.0);
    const PhaseState fast{{4.0, 0.0, 0.0}, {2.0, 0.0, 0.0}};
    TraceResult res = trace(h, 0.0, fast, 5.0, 0.05);
    CHECK(res.used_far_field);
    CHECK(!trace(h, 0.0, fast, 0.1, 0.05).used_far_field);
}
