#pragma once

#include <functional>
#include <vector>

#include "vpb/vec.hpp"

namespace vpb {

// Gauss-Legendre rule on [a, b]; nodes/weights computed once per order
// and cached.
struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;

    explicit GaussLegendre(int order);

    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

const GaussLegendre& gauss_legendre(int order);

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = false;
};

// Adaptive Gauss-Kronrod 7/15 with interval bisection. Splits the worst
// interval first until the summed error estimate meets the tolerance or
// the evaluation budget runs out.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol = 1e-12,
                              long max_evaluations = 2'000'000);

struct QuadResult3 {
    Vec3 value;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = false;
};

// Vector-valued variant; the error estimate is a component-wise max.
QuadResult3 integrate_adaptive3(const std::function<Vec3(double)>& f, double a, double b,
                                double abs_tol, double rel_tol = 1e-12,
                                long max_evaluations = 2'000'000);

}  // namespace vpb
