#include "vpb/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <stdexcept>

namespace vpb {

GaussLegendre::GaussLegendre(int order) {
    if (order < 1) throw std::invalid_argument("GaussLegendre: order must be positive");
    nodes.resize(order);
    weights.resize(order);
    // Newton iteration on P_n, Chebyshev initial guesses
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) nodes[order / 2] = 0.0;
}

const GaussLegendre& gauss_legendre(int order) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, GaussLegendre(order)).first;
    return it->second;
}

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr double kron_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kron_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double gauss_w[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double a, b;
    double value;
    double error;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(mid - half * kron_x[i]);
        fv[14 - i] = f(mid + half * kron_x[i]);
    }
    fv[7] = f(mid);
    double kron = kron_w[7] * fv[7];
    double gauss = gauss_w[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kron += kron_w[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gauss += gauss_w[i / 2] * (fv[i] + fv[14 - i]);
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = kron * half;
    p.error = std::abs((kron - gauss) * half);
    return p;
}

}  // namespace

namespace {

struct Panel3 {
    double a, b;
    Vec3 value;
    double error;
};

Panel3 evaluate_panel3(const std::function<Vec3(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    Vec3 fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(mid - half * kron_x[i]);
        fv[14 - i] = f(mid + half * kron_x[i]);
    }
    fv[7] = f(mid);
    Vec3 kron = kron_w[7] * fv[7];
    Vec3 gauss = gauss_w[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kron += kron_w[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gauss += gauss_w[i / 2] * (fv[i] + fv[14 - i]);
    }
    Panel3 p;
    p.a = a;
    p.b = b;
    p.value = half * kron;
    const Vec3 diff = half * (kron - gauss);
    p.error = std::max({std::abs(diff.x), std::abs(diff.y), std::abs(diff.z)});
    return p;
}

double max_abs_component(const Vec3& v) {
    return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}

}  // namespace

QuadResult3 integrate_adaptive3(const std::function<Vec3(double)>& f, double a, double b,
                                double abs_tol, double rel_tol, long max_evaluations) {
    QuadResult3 result;
    if (a == b) {
        result.converged = true;
        return result;
    }
    auto cmp = [](const Panel3& l, const Panel3& r) { return l.error < r.error; };
    std::priority_queue<Panel3, std::vector<Panel3>, decltype(cmp)> heap(cmp);
    constexpr int seed_panels = 8;
    Vec3 total{};
    double total_err = 0.0;
    for (int i = 0; i < seed_panels; ++i) {
        Panel3 p = evaluate_panel3(f, a + (b - a) * i / seed_panels,
                                   a + (b - a) * (i + 1) / seed_panels);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    result.evaluations = 15 * seed_panels;

    while (result.evaluations + 30 <= max_evaluations) {
        const double goal = std::max(abs_tol, rel_tol * max_abs_component(total));
        if (total_err <= goal) break;
        Panel3 worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            heap.push(worst);
            break;
        }
        Panel3 left = evaluate_panel3(f, worst.a, mid);
        Panel3 right = evaluate_panel3(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    result.value = total;
    result.error_estimate = total_err;
    result.converged =
        total_err <= std::max(abs_tol, rel_tol * max_abs_component(total));
    return result;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, long max_evaluations) {
    QuadResult result;
    if (a == b) {
        result.converged = true;
        return result;
    }
    auto cmp = [](const Panel& l, const Panel& r) { return l.error < r.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
    // seed with several panels: a single-panel error estimate can be
    // deceived by discontinuous integrands
    constexpr int seed_panels = 8;
    double total = 0.0, total_err = 0.0;
    for (int i = 0; i < seed_panels; ++i) {
        Panel p = evaluate_panel(f, a + (b - a) * i / seed_panels,
                                 a + (b - a) * (i + 1) / seed_panels);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    result.evaluations = 15 * seed_panels;

    while (result.evaluations + 30 <= max_evaluations) {
        const double goal = std::max(abs_tol, rel_tol * std::abs(total));
        if (total_err <= goal) break;
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval at roundoff limit
            heap.push(worst);
            break;
        }
        Panel left = evaluate_panel(f, worst.a, mid);
        Panel right = evaluate_panel(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    result.value = total;
    result.error_estimate = total_err;
    result.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
    return result;
}

}  // namespace vpb
