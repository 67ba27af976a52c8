#pragma once

#include <stdexcept>
#include <vector>

#include "vpb/background.hpp"
#include "vpb/coulomb.hpp"
#include "vpb/extfield.hpp"
#include "vpb/report.hpp"
#include "vpb/traj.hpp"

namespace vpb {

enum class PerturbationFamily { gaussian_bump, algebraic_r6 };

/// Separable initial perturbation g0(x, v) = amplitude * chi(x) * phi(v):
///   chi: gaussian exp(-|x-c|^2/scale^2) or algebraic (1+|x-c|^2/scale^2)^-3,
///   phi: compactly supported C^2 bump (1 - |v|^2/rv^2)^3, rv <= W + 1.
/// With rv <= W the bump is proportional to the background shape at the
/// support edge, so f0 = F - g0 stays nonnegative exactly when
/// amplitude <= F(0) / sup chi.
struct InitialPerturbation {
    PerturbationFamily family = PerturbationFamily::algebraic_r6;
    double amplitude = 0.0;
    Vec3 center{};
    double spatial_scale = 1.0;
    double velocity_support = 1.0;

    double spatial(const Vec3& x) const;   // chi in (0, 1]
    double velocity(const Vec3& v) const;  // phi, compact support
    double value(const Vec3& x, const Vec3& v) const;
    /// Decay exponent of sup_v |g0| in the weight R(x): 6 for the
    /// algebraic family; the gaussian outruns any power (reported large).
    double spatial_tail_exponent() const;
};

/// Everything needed to evaluate g and rho at arbitrary points through a
/// stored field history.
struct KineticState {
    const FieldHistory* history = nullptr;
    BackgroundProfile background;
    InitialPerturbation initial;
    double qg_running = 1.0;  // max{W, measured Qf}, >= W
    double trace_dt = 0.02;
};

struct GEval {
    double g = 0.0;
    double f_direct = 0.0;  // f0 at the foot of the characteristic
    bool used_far_field = false;
};

/// g(t,x,v) = g0(X(0), V(0)) - int_0^t (E+A)(s, X(s)) . grad_v F(V(s)) ds,
/// traced backward with the integral accumulated by the trapezoid rule on
/// the integrator's own steps.
GEval eval_g_full(const KineticState& state, double t, const Vec3& x, const Vec3& v);
double eval_g(const KineticState& state, double t, const Vec3& x, const Vec3& v);

struct FEval {
    double f = 0.0;
    double clipped = 0.0;  // magnitude removed by the nonnegativity clip
};
/// f(t,x,v) = f0(X(0), V(0)); tiny negative interpolation noise is clipped
/// at zero and reported.
FEval eval_f(const KineticState& state, double t, const Vec3& x, const Vec3& v);

/// Tensor Gauss-Legendre velocity quadrature in (|v|, mu) with azimuthal
/// symmetry. The u axis is split at the background support edge W, where
/// the integrand loses smoothness: two thirds of the points go below W.
struct VelocityQuadrature {
    std::vector<double> u_nodes;
    std::vector<double> u_weights;  // carry the 2 pi u^2 factor
    std::vector<double> mu_nodes;
    std::vector<double> mu_weights;

    static VelocityQuadrature build(int n_u, int n_mu, double w_edge, double v_cap);
};

struct SweepOptions {
    bool energies = false;        // accumulate k(t, r) = int S(f, |v|) dv
    double tail_energy_cut = 0.0; // P: accumulate int_{|v|>P} |v|^2 f dv (0 = skip)
};

struct SweepRow {
    double rho = 0.0;      // int g dv
    double k_energy = 0.0;
    double tail_v2f = 0.0;
    double max_clip = 0.0;
};

/// Evaluates the velocity integrals at position r e1 for every node,
/// distributing nodes across workers.
std::vector<SweepRow> sweep_nodes(const KineticState& state, double t,
                                  const std::vector<double>& r_nodes, int n_u, int n_mu,
                                  const SweepOptions& options = {});

/// rho(t, r) on the given nodes; the tail exponent comes from the
/// perturbation family.
RadialDensity compute_rho(const KineticState& state, double t,
                          const std::vector<double>& r_nodes, int n_u, int n_mu);

/// Deterministic probe set launched from the support of f0; the running
/// max of |V| along them is the measurable lower proxy for the velocity
/// support bound Q_f(t).
std::vector<PhaseState> default_qf_probes(const BackgroundProfile& background,
                                          const InitialPerturbation& initial, int n_probes);

/// Running max over probes and tau <= t of |V(tau)| at each requested
/// time (times must be increasing, starting at the history start).
std::vector<double> measure_qf_lower(const FieldHistory& history,
                                     const std::vector<PhaseState>& probes,
                                     const std::vector<double>& times, double dt);

struct PicardParams {
    std::vector<double> r_nodes;
    double t_end = 1.0;
    double dt = 0.02;
    int n_u = 32;
    int n_mu = 16;
    double tolerance = 1e-6;  // absolute sup-norm residual on e(r)
    int max_iterations = 12;
    double v_cap_margin = 0.5;
    int n_probes = 20;
};

struct PicardResult {
    std::vector<FieldState> field_states;  // converged, one per time node
    ExternalField external;
    std::vector<double> times;
    std::vector<double> residuals;  // per iteration
    int iterations = 0;
    std::vector<double> qf_lower;  // per time node
    double qg_final = 0.0;

    FieldHistory make_history() const { return FieldHistory(field_states, external); }
};

class PicardNonConvergence : public std::runtime_error {
public:
    std::vector<double> residuals;
    explicit PicardNonConvergence(std::vector<double> res)
        : std::runtime_error("picard iteration did not converge"), residuals(std::move(res)) {}
};

/// Fixed-point loop: evaluate rho through the current field history at
/// every time node, solve the fields, repeat until the sup-norm field
/// change drops below the tolerance. The first iterate freezes the t = 0
/// field, so one sweep reproduces the frozen-field solve.
PicardResult picard_solve(const BackgroundProfile& background,
                          const InitialPerturbation& initial, const ExternalField& external,
                          const PicardParams& params);

/// Initial-state admissibility: f0 nonnegative, C^1 (bounded finite
/// differences), compact velocity support, and the far-field closeness
/// clause sup_v |F - f0| <= C R^-6 with the measured (N, C).
ConditionReport check_initial_state(const BackgroundProfile& background,
                                    const InitialPerturbation& initial);

}  // namespace vpb
