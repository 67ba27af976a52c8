#include "vpb/background.hpp"

#include <cmath>
#include <stdexcept>

#include "vpb/quad.hpp"

namespace vpb {

double BackgroundProfile::radial(double u) const {
    if (u >= W) return 0.0;
    const double d = W * W - u * u;
    return kappa * d * d * d;
}

double BackgroundProfile::radial_deriv(double u) const {
    if (u >= W) return 0.0;
    const double d = W * W - u * u;
    return -6.0 * kappa * u * d * d;
}

double BackgroundProfile::radial_deriv2(double u) const {
    if (u >= W) return 0.0;
    const double d = W * W - u * u;
    return 6.0 * kappa * d * (5.0 * u * u - W * W);
}

double BackgroundProfile::peak() const { return kappa * std::pow(W, 6); }

double BackgroundProfile::radial_inverse(double h) const {
    const double f0 = peak();
    if (h <= 0.0) return W;
    if (h >= f0) return 0.0;
    const double d = std::cbrt(h / kappa);
    return std::sqrt(std::max(0.0, W * W - d));
}

double BackgroundProfile::density(const Vec3& v) const { return radial(norm(v)); }

Vec3 BackgroundProfile::gradient(const Vec3& v) const {
    const double u = norm(v);
    if (u == 0.0 || u >= W) return {0.0, 0.0, 0.0};
    return (radial_deriv(u) / u) * v;
}

EnergyFunctionals::EnergyFunctionals(const BackgroundProfile& p)
    : profile(p), f0_peak(p.peak()) {}

double EnergyFunctionals::sigma(double h) const {
    // closed form for the polynomial bump:
    //   (F_R^{-1}(s))^2 = W^2 - (s/kappa)^{1/3}
    //   sigma(h) = -W^2 h + (3/4) kappa^{-1/3} h^{4/3},  h <= F(0)
    const double hc = std::min(std::max(h, 0.0), f0_peak);
    const double w2 = profile.W * profile.W;
    return -w2 * hc + 0.75 * std::pow(hc, 4.0 / 3.0) / std::cbrt(profile.kappa);
}

double EnergyFunctionals::relative_energy(double h, double eta) const {
    const double f_eta = profile.radial(eta);
    return (h - f_eta) * eta * eta + sigma(h) - sigma(f_eta);
}

double sigma_by_quadrature(const BackgroundProfile& p, double h, double abs_tol) {
    const double hc = std::min(std::max(h, 0.0), p.peak());
    if (hc == 0.0) return 0.0;
    const double u_h = p.radial_inverse(hc);
    auto integrand = [&](double u) { return u * u * p.radial_deriv(u); };
    return integrate_adaptive(integrand, u_h, p.W, abs_tol).value;
}

namespace {

// One-sided second derivative at u0 approaching from sign * delta.
double one_sided_deriv2(const std::function<double(double)>& f, double u0, double delta,
                        double sign) {
    return (f(u0) - 2.0 * f(u0 + sign * delta) + f(u0 + 2.0 * sign * delta)) /
           (delta * delta);
}

}  // namespace

ConditionReport check_background_profile(const std::function<double(double)>& f_r,
                                         double support_radius, double tol) {
    const double W = support_radius;
    ConditionReport report;

    // nonnegativity over [0, 2W]
    {
        double min_val = 0.0;
        const int n = 400;
        for (int i = 0; i <= n; ++i) min_val = std::min(min_val, f_r(2.0 * W * i / n));
        report.clauses.push_back({"nonnegative",
                                  min_val >= 0.0 ? ClauseStatus::pass : ClauseStatus::fail,
                                  min_val,
                                  ""});
    }

    // C^2 matching at u = W: Richardson-extrapolated jump of the one-sided
    // second-derivative estimates. jump(d) carries an O(d) bias for a
    // genuinely C^2 profile; 2 jump(d/2) - jump(d) removes it.
    {
        const double d = 5e-5 * std::max(1.0, W);
        auto jump = [&](double dd) {
            return one_sided_deriv2(f_r, W, dd, -1.0) - one_sided_deriv2(f_r, W, dd, +1.0);
        };
        const double extrapolated = 2.0 * jump(0.5 * d) - jump(d);
        report.clauses.push_back({"c2_at_support_edge",
                                  std::abs(extrapolated) < tol ? ClauseStatus::pass
                                                               : ClauseStatus::fail,
                                  extrapolated,
                                  "second-derivative jump across u = W"});
    }

    // second derivative at the origin (even extension): must be negative
    {
        const double d = 1e-4 * std::max(1.0, W);
        auto second = [&](double dd) { return 2.0 * (f_r(dd) - f_r(0.0)) / (dd * dd); };
        const double extrapolated = (4.0 * second(0.5 * d) - second(d)) / 3.0;
        report.clauses.push_back({"concave_at_origin",
                                  extrapolated < 0.0 ? ClauseStatus::pass : ClauseStatus::fail,
                                  extrapolated,
                                  "F_R''(0)"});
    }

    // strict decrease on (0, W)
    {
        double max_slope = -INFINITY;
        const int n = 199;
        const double d = 1e-6 * std::max(1.0, W);
        for (int i = 1; i <= n; ++i) {
            const double u = W * i / (n + 1);
            max_slope = std::max(max_slope, (f_r(u + d) - f_r(u - d)) / (2.0 * d));
        }
        report.clauses.push_back({"strictly_decreasing",
                                  max_slope < 0.0 ? ClauseStatus::pass : ClauseStatus::fail,
                                  max_slope,
                                  "max F_R' on (0, W)"});
    }

    // vanishing beyond W
    {
        double max_val = 0.0;
        const int n = 200;
        for (int i = 0; i <= n; ++i)
            max_val = std::max(max_val, std::abs(f_r(W + (2.0 * W * i) / n)));
        report.clauses.push_back({"vanishes_beyond_support",
                                  max_val == 0.0 ? ClauseStatus::pass : ClauseStatus::fail,
                                  max_val,
                                  ""});
    }

    return report;
}

ConditionReport check_background_profile(const BackgroundProfile& p, double tol) {
    return check_background_profile([&](double u) { return p.radial(u); }, p.W, tol);
}

}  // namespace vpb
