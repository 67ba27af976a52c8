#include "vpb/traj.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vpb {

FieldHistory::FieldHistory(std::vector<FieldState> states, ExternalField external)
    : states_(std::move(states)), external_(external) {
    if (states_.empty()) throw std::invalid_argument("FieldHistory: no snapshots");
    times_.reserve(states_.size());
    for (const auto& s : states_) times_.push_back(s.time);
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("FieldHistory: snapshot times must increase");

    if (times_.size() >= 2) {
        const double dt = times_[1] - times_[0];
        uniform_times_ = true;
        for (std::size_t i = 1; i + 1 < times_.size(); ++i)
            if (std::abs(times_[i + 1] - times_[i] - dt) > 1e-9 * dt) uniform_times_ = false;
        inv_dt_ = uniform_times_ ? 1.0 / dt : 0.0;
    }

    shared_radial_grid_ = true;
    for (const auto& s : states_) {
        if (s.mode != FieldState::Mode::radial || s.radial.nodes.size() < 2 ||
            s.radial.nodes.size() != states_.front().radial.nodes.size()) {
            shared_radial_grid_ = false;
            break;
        }
    }
}

FieldHistory FieldHistory::zero(double t0, double t1, double r_max) {
    RadialDensity empty;
    empty.nodes = {0.0, 0.5 * r_max, r_max};
    empty.values = {0.0, 0.0, 0.0};
    FieldState a = solve_field_radial(empty, t0);
    FieldState b = solve_field_radial(empty, t1);
    return FieldHistory({a, b}, ExternalField{});
}

void FieldHistory::locate(double t, std::size_t& index, double& weight) const {
    if (states_.size() == 1) {
        index = 0;
        weight = 0.0;
        return;
    }
    if (t <= times_.front()) {
        index = 0;
        weight = 0.0;
        return;
    }
    if (t >= times_.back()) {
        index = times_.size() - 2;
        weight = 1.0;
        return;
    }
    if (uniform_times_) {
        const double u = (t - times_.front()) * inv_dt_;
        index = std::min(static_cast<std::size_t>(u), times_.size() - 2);
        weight = u - static_cast<double>(index);
    } else {
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        index = static_cast<std::size_t>(it - times_.begin()) - 1;
        weight = (t - times_[index]) / (times_[index + 1] - times_[index]);
    }
}

Vec3 FieldHistory::total_field(double t, const Vec3& x, bool* outside) const {
    Vec3 e;
    bool out = false;
    if (states_.size() == 1) {
        e = states_[0].evaluate(x, &out);
    } else {
        std::size_t j;
        double w;
        locate(t, j, w);
        if (shared_radial_grid_) {
            const double r = norm(x);
            out = states_[j].radial.outside(r);
            const double e0 = states_[j].radial.eval(r);
            const double e1 = states_[j + 1].radial.eval(r);
            const double er = (1.0 - w) * e0 + w * e1;
            e = r < 1e-300 ? Vec3{} : (er / r) * x;
        } else {
            bool out2 = false;
            Vec3 a = states_[j].evaluate(x, &out);
            Vec3 b = states_[j + 1].evaluate(x, &out2);
            e = (1.0 - w) * a + w * b;
            out = out || out2;
        }
    }
    if (outside) *outside = out;
    if (external_.kind == FieldKind::zero) return e;
    return e + external_.value(t, x);
}

Mat3 FieldHistory::total_gradient(double t, const Vec3& x, bool* outside) const {
    Mat3 g;
    bool out = false;
    if (states_.size() == 1) {
        g = states_[0].gradient(x, &out);
    } else {
        std::size_t j;
        double w;
        locate(t, j, w);
        bool out2 = false;
        Mat3 a = states_[j].gradient(x, &out);
        Mat3 b = states_[j + 1].gradient(x, &out2);
        a *= 1.0 - w;
        b *= w;
        g = a + b;
        out = out || out2;
    }
    if (outside) *outside = out;
    if (external_.kind == FieldKind::zero) return g;
    return g + external_.jacobian(t, x);
}

TraceResult trace(const FieldHistory& history, double from_time, const PhaseState& start,
                  double to_time, double dt) {
    return trace_visit(history, from_time, start, to_time, dt,
                       [](double, const PhaseState&) {});
}

DisplacementReport displacement_check(const FieldHistory& history, double t,
                                      const PhaseState& state, double horizon,
                                      double qg_bound, double dt) {
    DisplacementReport report;
    report.displacement_bound = horizon * qg_bound;
    const double r0 = norm(state.x);
    report.radius_band_applicable = r0 >= 2.0 * report.displacement_bound;
    report.min_radius_ratio = 1.0;
    report.max_radius_ratio = 1.0;

    auto inspect = [&](double, const PhaseState& p) {
        report.max_displacement = std::max(report.max_displacement, norm(p.x - state.x));
        if (r0 > 0.0) {
            const double ratio = norm(p.x) / r0;
            report.min_radius_ratio = std::min(report.min_radius_ratio, ratio);
            report.max_radius_ratio = std::max(report.max_radius_ratio, ratio);
        }
    };
    if (t > 0.0) trace_visit(history, t, state, std::max(0.0, history.t_min()), dt, inspect);
    if (horizon > t) trace_visit(history, t, state, std::min(horizon, history.t_max()), dt, inspect);

    report.displacement_ok = report.max_displacement <= report.displacement_bound * (1.0 + 1e-12);
    if (report.radius_band_applicable)
        report.radius_band_ok =
            report.min_radius_ratio >= 0.5 - 1e-12 && report.max_radius_ratio <= 1.5 + 1e-12;
    return report;
}

namespace {

double determinant6(double m[6][6]) {
    double det = 1.0;
    for (int col = 0; col < 6; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 6; ++row)
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
        if (m[pivot][col] == 0.0) return 0.0;
        if (pivot != col) {
            for (int k = 0; k < 6; ++k) std::swap(m[pivot][k], m[col][k]);
            det = -det;
        }
        det *= m[col][col];
        for (int row = col + 1; row < 6; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 6; ++k) m[row][k] -= f * m[col][k];
        }
    }
    return det;
}

}  // namespace

double phase_volume_determinant(const FieldHistory& history, double t,
                                const PhaseState& center, double delta, double s, double dt) {
    auto component = [](PhaseState& p, int k) -> double& {
        Vec3& v = k < 3 ? p.x : p.v;
        const int i = k % 3;
        return i == 0 ? v.x : (i == 1 ? v.y : v.z);
    };
    double jac[6][6];
    for (int k = 0; k < 6; ++k) {
        PhaseState plus = center, minus = center;
        component(plus, k) += delta;
        component(minus, k) -= delta;
        const PhaseState a = trace(history, t, plus, s, dt).state;
        const PhaseState b = trace(history, t, minus, s, dt).state;
        const double inv = 1.0 / (2.0 * delta);
        jac[0][k] = (a.x.x - b.x.x) * inv;
        jac[1][k] = (a.x.y - b.x.y) * inv;
        jac[2][k] = (a.x.z - b.x.z) * inv;
        jac[3][k] = (a.v.x - b.v.x) * inv;
        jac[4][k] = (a.v.y - b.v.y) * inv;
        jac[5][k] = (a.v.z - b.v.z) * inv;
    }
    return determinant6(jac);
}

}  // namespace vpb
