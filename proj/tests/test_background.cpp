#include <doctest.h>

#include <cmath>
#include <random>

#include "vpb/background.hpp"

using namespace vpb;

TEST_CASE("shipped bump: values, support, smooth matching at the edge") {
    BackgroundProfile p;  // W = 1, kappa = 1

    CHECK(p.density({2, 0, 0}) == 0.0);
    CHECK(p.density({0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));  // kappa W^6
    CHECK(p.density({1, 0, 0}) == 0.0);
    CHECK(p.radial_deriv(1.0) == 0.0);
    CHECK(p.radial_deriv2(1.0) == 0.0);

    // C^2 matching from inside: derivatives vanish as u -> W^-
    CHECK(std::abs(p.radial_deriv(1.0 - 1e-8)) < 1e-14);
    CHECK(std::abs(p.radial_deriv2(1.0 - 1e-8)) < 1e-6);

    BackgroundProfile q{2.0, 0.7, ProfileKind::polynomial_bump};
    CHECK(q.peak() == doctest::Approx(0.7 * 64.0));
    CHECK(q.density({0, 0, 1.9}) > 0.0);
    CHECK(q.density({0, 0, 2.0}) == 0.0);
}

TEST_CASE("gradient: radial formula and zero cases") {
    BackgroundProfile p;

    Vec3 g0 = p.gradient({0, 0, 0});
    CHECK(norm(g0) == 0.0);

    // F_R'(1/2) = -6 (1/2) (3/4)^2 = -27/16
    Vec3 g = p.gradient({0.5, 0, 0});
    CHECK(g.x == doctest::Approx(-27.0 / 16.0).epsilon(1e-14));
    CHECK(g.y == 0.0);
    CHECK(g.z == 0.0);

    CHECK(norm(p.gradient({1.0, 0, 0})) == 0.0);
    CHECK(norm(p.gradient({0.8, -0.9, 0.4})) == 0.0);  // |v| > W
}

TEST_CASE("gradient agrees with central differences at second order") {
    BackgroundProfile p{1.3, 0.8, ProfileKind::polynomial_bump};
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.1, 1.1);

    for (int trial = 0; trial < 30; ++trial) {
        Vec3 v{u(rng), u(rng), u(rng)};
        if (std::abs(norm(v) - p.W) < 0.05) continue;  // step must not straddle the edge
        auto fd_error = [&](double d) {
            Vec3 approx{(p.density({v.x + d, v.y, v.z}) - p.density({v.x - d, v.y, v.z})) / (2 * d),
                        (p.density({v.x, v.y + d, v.z}) - p.density({v.x, v.y - d, v.z})) / (2 * d),
                        (p.density({v.x, v.y, v.z + d}) - p.density({v.x, v.y, v.z - d})) / (2 * d)};
            return norm(approx - p.gradient(v));
        };
        const double e1 = fd_error(1e-3);
        const double e2 = fd_error(5e-4);
        if (e1 > 1e-12) CHECK(e1 / e2 > 3.5);
        CHECK(e2 < 1e-5);
    }
}

TEST_CASE("sigma: closed form, quadrature route, monotonicity") {
    BackgroundProfile p;
    EnergyFunctionals en(p);

    CHECK(en.sigma(0.0) == 0.0);
    CHECK(en.sigma(1.0) == doctest::Approx(-0.25).epsilon(1e-14));  // -kappa W^8 / 4
    CHECK(en.sigma(5.0) == doctest::Approx(-0.25).epsilon(1e-14));  // saturates past F(0)

    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double h = 1.2 * i / 50.0;
        const double s = en.sigma(h);
        CHECK(s <= prev + 1e-15);
        prev = s;
    }

    // closed form vs substitution quadrature on [0, F(0)]
    for (int i = 0; i <= 20; ++i) {
        const double h = en.f0_peak * i / 20.0;
        CHECK(en.sigma(h) == doctest::Approx(sigma_by_quadrature(p, h)).epsilon(0).scale(1).epsilon(1e-8));
    }

    // a non-unit family, same cross-check
    BackgroundProfile q{1.7, 2.3, ProfileKind::polynomial_bump};
    EnergyFunctionals enq(q);
    CHECK(enq.sigma(enq.f0_peak) ==
          doctest::Approx(-q.kappa * std::pow(q.W, 8) / 4.0).epsilon(1e-12));
    for (int i = 0; i <= 10; ++i) {
        const double h = enq.f0_peak * i / 10.0;
        CHECK(std::abs(enq.sigma(h) - sigma_by_quadrature(q, h)) < 1e-8);
    }
}

TEST_CASE("relative energy S: zeros, corner value, lower bound beyond 2W") {
    BackgroundProfile p;
    EnergyFunctionals en(p);

    for (double eta : {0.0, 0.3, 0.7, 0.99}) {
        CHECK(en.relative_energy(p.radial(eta), eta) == doctest::Approx(0.0).scale(1.0));
    }
    CHECK(en.relative_energy(0.0, 0.0) == doctest::Approx(0.25).epsilon(1e-14));

    // S(h, eta) >= h eta^2 / 2 for eta >= 2W
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uh(0.0, 2.0), ueta(2.0, 6.0);
    for (int i = 0; i < 200; ++i) {
        const double h = uh(rng), eta = ueta(rng);
        CHECK(en.relative_energy(h, eta) >= 0.5 * h * eta * eta - 1e-12);
    }
    CHECK(en.relative_energy(0.1, 2.0) >= 0.2 - 1e-12);

    // nonnegativity on a broad sample
    std::uniform_real_distribution<double> ue(0.0, 3.0);
    for (int i = 0; i < 200; ++i)
        CHECK(en.relative_energy(uh(rng), ue(rng)) >= -1e-12);
}

TEST_CASE("profile condition report: shipped family passes") {
    BackgroundProfile p;
    ConditionReport rep = check_background_profile(p);
    CHECK(rep.all_pass());
    CHECK(rep.find("concave_at_origin")->measured == doctest::Approx(-6.0).epsilon(1e-4));
}

TEST_CASE("profile condition report: quadratic bump fails the C^2 clause") {
    const double W = 1.0, kappa = 1.0;
    auto broken = [=](double u) {
        if (u >= W) return 0.0;
        const double d = W * W - u * u;
        return kappa * d * d;
    };
    ConditionReport rep = check_background_profile(broken, W);
    const auto* c2 = rep.find("c2_at_support_edge");
    REQUIRE(c2 != nullptr);
    CHECK(c2->status == ClauseStatus::fail);
    CHECK(c2->measured == doctest::Approx(8.0 * kappa * W * W).epsilon(1e-2));
}

TEST_CASE("profile condition report: nonpositive amplitude fails") {
    BackgroundProfile neg{1.0, -1.0, ProfileKind::polynomial_bump};
    ConditionReport rep = check_background_profile(neg);
    CHECK(!rep.find("nonnegative")->passed());
    CHECK(!rep.find("concave_at_origin")->passed());

    BackgroundProfile flat{1.0, 0.0, ProfileKind::polynomial_bump};
    ConditionReport rep2 = check_background_profile(flat);
    CHECK(!rep2.find("strictly_decreasing")->passed());
}

TEST_CASE("density is nonnegative and vanishes outside the support ball") {
    BackgroundProfile p{0.9, 1.4, ProfileKind::polynomial_bump};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        Vec3 v{u(rng), u(rng), u(rng)};
        const double f = p.density(v);
        CHECK(f >= 0.0);
        if (norm(v) >= p.W) CHECK(f == 0.0);
    }
}
