#pragma once

#include <vector>

#include "vpb/coulomb.hpp"
#include "vpb/extfield.hpp"
#include "vpb/vec.hpp"

namespace vpb {

struct PhaseState {
    Vec3 x;
    Vec3 v;
};

/// Stored field snapshots plus the applied field: the total force field
/// along characteristics is E(s, x) + A(s, x), with E linearly
/// interpolated in time between snapshots.
class FieldHistory {
public:
    FieldHistory(std::vector<FieldState> states, ExternalField external);

    /// Zero self-field over [t0, t1] (two empty radial snapshots).
    static FieldHistory zero(double t0, double t1, double r_max = 100.0);

    double t_min() const { return times_.front(); }
    double t_max() const { return times_.back(); }
    const std::vector<FieldState>& states() const { return states_; }
    const ExternalField& external() const { return external_; }
    std::vector<FieldState>& mutable_states() { return states_; }

    /// E(t, x) + A(t, x). Sets *outside when x lies past the sampled
    /// radial domain (the monopole far-field continuation was used).
    Vec3 total_field(double t, const Vec3& x, bool* outside = nullptr) const;

    /// Jacobian of the total field.
    Mat3 total_gradient(double t, const Vec3& x, bool* outside = nullptr) const;

    void locate(double t, std::size_t& index, double& weight) const;

private:
    std::vector<FieldState> states_;
    std::vector<double> times_;
    ExternalField external_;
    bool uniform_times_ = false;
    double inv_dt_ = 0.0;
    bool shared_radial_grid_ = false;
};

struct TraceResult {
    PhaseState state;
    bool used_far_field = false;
};

/// Classical fixed-step RK4 for dX/ds = V, dV/ds = -(E + A)(s, X), forward
/// or backward in time. The step count is ceil(|to - from| / dt) with the
/// step equalized, so aligned requests use exactly dt.
TraceResult trace(const FieldHistory& history, double from_time, const PhaseState& start,
                  double to_time, double dt);

/// As trace, but invokes visit(s, state) at the start point and after
/// every step.
template <class Visitor>
TraceResult trace_visit(const FieldHistory& history, double from_time, const PhaseState& start,
                        double to_time, double dt, Visitor&& visit);

struct DisplacementReport {
    double displacement_bound = 0.0;  // T Qg
    double max_displacement = 0.0;
    bool displacement_ok = false;
    bool radius_band_applicable = false;  // |x| >= 2 T Qg
    bool radius_band_ok = true;
    double min_radius_ratio = 0.0;  // min_s |X(s)| / |x|
    double max_radius_ratio = 0.0;
};

/// Samples the characteristic through (t, state) at every integrator step
/// over [0, horizon] and verifies |X(s) - x| <= horizon * Qg_bound; when
/// |x| >= 2 horizon Qg_bound additionally checks |X(s)| stays within
/// [|x|/2, 3|x|/2].
DisplacementReport displacement_check(const FieldHistory& history, double t,
                                      const PhaseState& state, double horizon,
                                      double qg_bound, double dt);

/// Finite-difference Jacobian determinant of (x, v) -> (X(s), V(s));
/// the flow is measure preserving, so the result should be 1.
double phase_volume_determinant(const FieldHistory& history, double t,
                                const PhaseState& center, double delta, double s, double dt);

// --- implementation ---

template <class Visitor>
TraceResult trace_visit(const FieldHistory& history, double from_time, const PhaseState& start,
                        double to_time, double dt, Visitor&& visit) {
    TraceResult result;
    result.state = start;
    visit(from_time, result.state);
    if (to_time == from_time) return result;

    const double span = to_time - from_time;
    const long n_steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(span) / dt - 1e-9)));
    const double h = span / static_cast<double>(n_steps);

    Vec3 x = start.x, v = start.v;
    bool outside = false, any_outside = false;
    double s = from_time;
    for (long step = 0; step < n_steps; ++step) {
        const double s1 = (step + 1 == n_steps) ? to_time : from_time + h * (step + 1);
        const Vec3 k1v = -1.0 * history.total_field(s, x, &outside);
        any_outside |= outside;
        const Vec3 x2 = x + (0.5 * h) * v;
        const Vec3 k2v = -1.0 * history.total_field(s + 0.5 * h, x2, &outside);
        any_outside |= outside;
        const Vec3 k2x = v + (0.5 * h) * k1v;
        const Vec3 x3 = x + (0.5 * h) * k2x;
        const Vec3 k3v = -1.0 * history.total_field(s + 0.5 * h, x3, &outside);
        any_outside |= outside;
        const Vec3 k3x = v + (0.5 * h) * k2v;
        const Vec3 x4 = x + h * k3x;
        const Vec3 k4v = -1.0 * history.total_field(s1, x4, &outside);
        any_outside |= outside;
        const Vec3 k4x = v + h * k3v;

        x += (h / 6.0) * (v + 2.0 * k2x + 2.0 * k3x + k4x);
        v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        s = s1;
        result.state = {x, v};
        visit(s, result.state);
    }
    result.used_far_field = any_outside;
    return result;
}

}  // namespace vpb
