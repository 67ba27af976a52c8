#include "vpb/kinetic.hpp"

#include <algorithm>
#include <cmath>

#include "vpb/parallel.hpp"
#include "vpb/quad.hpp"

namespace vpb {

double InitialPerturbation::spatial(const Vec3& x) const {
    const Vec3 d = x - center;
    const double s2 = norm2(d) / (spatial_scale * spatial_scale);
    if (family == PerturbationFamily::gaussian_bump) return std::exp(-s2);
    const double w = 1.0 + s2;
    return 1.0 / (w * w * w);
}

double InitialPerturbation::velocity(const Vec3& v) const {
    const double s2 = norm2(v) / (velocity_support * velocity_support);
    if (s2 >= 1.0) return 0.0;
    const double d = 1.0 - s2;
    return d * d * d;
}

double InitialPerturbation::value(const Vec3& x, const Vec3& v) const {
    return amplitude * spatial(x) * velocity(v);
}

double InitialPerturbation::spatial_tail_exponent() const {
    return family == PerturbationFamily::algebraic_r6 ? 6.0 : 40.0;
}

GEval eval_g_full(const KineticState& state, double t, const Vec3& x, const Vec3& v) {
    const FieldHistory& history = *state.history;
    const BackgroundProfile& bg = state.background;

    double integral = 0.0;
    double prev_s = t, prev_src = 0.0;
    bool first = true;
    auto accumulate = [&](double s, const PhaseState& p) {
        double src = 0.0;
        const double speed = norm(p.v);
        if (speed < bg.W && speed > 0.0) {
            const Vec3 field = history.total_field(s, p.x);
            src = dot(field, bg.gradient(p.v));
        }
        if (!first) integral += 0.5 * (prev_s - s) * (prev_src + src);
        first = false;
        prev_s = s;
        prev_src = src;
    };

    TraceResult res = trace_visit(history, t, PhaseState{x, v}, 0.0, state.trace_dt, accumulate);

    GEval out;
    const double g0 = state.initial.value(res.state.x, res.state.v);
    out.g = g0 - integral;
    out.f_direct = bg.density(res.state.v) - g0;
    out.used_far_field = res.used_far_field;
    return out;
}

double eval_g(const KineticState& state, double t, const Vec3& x, const Vec3& v) {
    return eval_g_full(state, t, x, v).g;
}

FEval eval_f(const KineticState& state, double t, const Vec3& x, const Vec3& v) {
    const GEval full = eval_g_full(state, t, x, v);
    FEval out;
    out.f = std::max(0.0, full.f_direct);
    out.clipped = out.f - full.f_direct;
    return out;
}

VelocityQuadrature VelocityQuadrature::build(int n_u, int n_mu, double w_edge, double v_cap) {
    VelocityQuadrature q;
    const auto& gl_mu = gauss_legendre(n_mu);
    q.mu_nodes.resize(n_mu);
    q.mu_weights.resize(n_mu);
    for (int i = 0; i < n_mu; ++i) {
        q.mu_nodes[i] = gl_mu.nodes[i];
        q.mu_weights[i] = gl_mu.weights[i];
    }

    auto add_panel = [&](double a, double b, int n) {
        if (n <= 0 || b <= a) return;
        const auto& gl = gauss_legendre(n);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < n; ++i) {
            const double u = mid + half * gl.nodes[i];
            q.u_nodes.push_back(u);
            q.u_weights.push_back(2.0 * M_PI * u * u * half * gl.weights[i]);
        }
    };

    if (v_cap <= w_edge) {
        add_panel(0.0, v_cap, n_u);
    } else {
        const int n1 = std::max(4, 2 * n_u / 3);
        add_panel(0.0, w_edge, n1);
        add_panel(w_edge, v_cap, std::max(4, n_u - n1));
    }
    return q;
}

std::vector<SweepRow> sweep_nodes(const KineticState& state, double t,
                                  const std::vector<double>& r_nodes, int n_u, int n_mu,
                                  const SweepOptions& options) {
    const double v_cap = state.qg_running + 0.5;
    const VelocityQuadrature quad =
        VelocityQuadrature::build(n_u, n_mu, state.background.W, v_cap);

    // separate coarse panel for the high-velocity tail energy
    VelocityQuadrature tail_quad;
    if (options.tail_energy_cut > 0.0) {
        const double p_cut = options.tail_energy_cut;
        const double v_hi = std::max(v_cap, p_cut + 1.0);
        tail_quad.mu_nodes = quad.mu_nodes;
        tail_quad.mu_weights = quad.mu_weights;
        const auto& gl = gauss_legendre(std::max(8, n_u / 2));
        const double mid = 0.5 * (p_cut + v_hi), half = 0.5 * (v_hi - p_cut);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double u = mid + half * gl.nodes[i];
            tail_quad.u_nodes.push_back(u);
            tail_quad.u_weights.push_back(2.0 * M_PI * u * u * half * gl.weights[i]);
        }
    }

    const EnergyFunctionals energy(state.background);
    std::vector<SweepRow> rows(r_nodes.size());

    parallel_for(r_nodes.size(), [&](std::size_t i) {
        const Vec3 x{r_nodes[i], 0.0, 0.0};
        SweepRow row;
        for (std::size_t a = 0; a < quad.u_nodes.size(); ++a) {
            const double u = quad.u_nodes[a];
            for (std::size_t b = 0; b < quad.mu_nodes.size(); ++b) {
                const double mu = quad.mu_nodes[b];
                const Vec3 v{u * mu, u * std::sqrt(std::max(0.0, 1.0 - mu * mu)), 0.0};
                const GEval ge = eval_g_full(state, t, x, v);
                const double w = quad.u_weights[a] * quad.mu_weights[b];
                row.rho += w * ge.g;
                if (options.energies) {
                    const double f = std::max(0.0, ge.f_direct);
                    row.max_clip = std::max(row.max_clip, f - ge.f_direct);
                    row.k_energy += w * energy.relative_energy(f, u);
                }
            }
        }
        if (options.tail_energy_cut > 0.0) {
            for (std::size_t a = 0; a < tail_quad.u_nodes.size(); ++a) {
                const double u = tail_quad.u_nodes[a];
                for (std::size_t b = 0; b < tail_quad.mu_nodes.size(); ++b) {
                    const double mu = tail_quad.mu_nodes[b];
                    const Vec3 v{u * mu, u * std::sqrt(std::max(0.0, 1.0 - mu * mu)), 0.0};
                    const GEval ge = eval_g_full(state, t, x, v);
                    const double f = std::max(0.0, ge.f_direct);
                    row.tail_v2f += tail_quad.u_weights[a] * tail_quad.mu_weights[b] * u * u * f;
                }
            }
        }
        rows[i] = row;
    });
    return rows;
}

RadialDensity compute_rho(const KineticState& state, double t,
                          const std::vector<double>& r_nodes, int n_u, int n_mu) {
    const std::vector<SweepRow> rows = sweep_nodes(state, t, r_nodes, n_u, n_mu);
    RadialDensity rho;
    rho.nodes = r_nodes;
    rho.values.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rho.values[i] = rows[i].rho;
    rho.tail_exponent = state.initial.spatial_tail_exponent();
    rho.validate();
    return rho;
}

std::vector<PhaseState> default_qf_probes(const BackgroundProfile& background,
                                          const InitialPerturbation& initial, int n_probes) {
    // speeds just inside the support edge, positions across the strong-field
    // region, directions cycling radial/tangential/oblique
    std::vector<PhaseState> probes;
    probes.reserve(n_probes);
    const double r_spread = 4.0 * initial.spatial_scale;
    const Vec3 dirs[4] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0.7071067811865476, 0.7071067811865476, 0}};
    for (int j = 0; j < n_probes; ++j) {
        const double r = n_probes > 1 ? r_spread * j / (n_probes - 1) : 0.0;
        const double speed = (j % 2 == 0 ? 0.999 : 0.9) * std::min(background.W, initial.velocity_support);
        probes.push_back({initial.center + Vec3{r, 0, 0}, speed * dirs[j % 4]});
    }
    return probes;
}

std::vector<double> measure_qf_lower(const FieldHistory& history,
                                     const std::vector<PhaseState>& probes,
                                     const std::vector<double>& times, double dt) {
    std::vector<double> qf(times.size(), 0.0);
    for (const PhaseState& probe : probes) {
        std::size_t next = 0;
        double running = 0.0;
        auto record = [&](double s, const PhaseState& p) {
            running = std::max(running, norm(p.v));
            while (next < times.size() && s >= times[next] - 1e-12) {
                qf[next] = std::max(qf[next], running);
                ++next;
            }
        };
        trace_visit(history, times.front(), probe, times.back(), dt, record);
    }
    // running max across the time axis
    for (std::size_t k = 1; k < qf.size(); ++k) qf[k] = std::max(qf[k], qf[k - 1]);
    return qf;
}

PicardResult picard_solve(const BackgroundProfile& background,
                          const InitialPerturbation& initial, const ExternalField& external,
                          const PicardParams& params) {
    const long n_times = std::lround(params.t_end / params.dt);
    if (n_times < 1 || std::abs(n_times * params.dt - params.t_end) > 1e-9 * params.dt)
        throw std::invalid_argument("picard_solve: t_end must be an integer multiple of dt");

    std::vector<double> times(n_times + 1);
    for (long k = 0; k <= n_times; ++k)
        times[k] = (k == n_times) ? params.t_end : params.dt * static_cast<double>(k);

    // initial iterate: the t = 0 field frozen in time
    KineticState state;
    state.background = background;
    state.initial = initial;
    state.qg_running = std::max(background.W, initial.velocity_support);
    state.trace_dt = params.dt;

    FieldHistory bootstrap = FieldHistory::zero(times.front(), times.back(),
                                                params.r_nodes.back());
    state.history = &bootstrap;
    const RadialDensity rho0 =
        compute_rho(state, 0.0, params.r_nodes, params.n_u, params.n_mu);

    std::vector<FieldState> current(times.size());
    for (std::size_t k = 0; k < times.size(); ++k)
        current[k] = solve_field_radial(rho0, times[k]);

    const std::vector<PhaseState> probes =
        default_qf_probes(background, initial, params.n_probes);

    PicardResult result;
    result.external = external;
    result.times = times;
    result.qf_lower.assign(times.size(), state.qg_running);

    for (int iter = 1; iter <= params.max_iterations; ++iter) {
        FieldHistory history(current, external);
        state.history = &history;

        std::vector<FieldState> next(times.size());
        next[0] = current[0];  // rho(0) does not depend on the field iterate
        for (std::size_t k = 1; k < times.size(); ++k) {
            const RadialDensity rho_k =
                compute_rho(state, times[k], params.r_nodes, params.n_u, params.n_mu);
            next[k] = solve_field_radial(rho_k, times[k]);
        }

        double residual = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k)
            for (std::size_t i = 0; i < params.r_nodes.size(); ++i)
                residual = std::max(residual, std::abs(next[k].radial.values[i] -
                                                       current[k].radial.values[i]));
        current = std::move(next);
        result.residuals.push_back(residual);
        result.iterations = iter;

        FieldHistory updated(current, external);
        result.qf_lower = measure_qf_lower(updated, probes, times, params.dt);
        state.qg_running = std::max(background.W, result.qf_lower.back());

        if (residual < params.tolerance) {
            result.field_states = std::move(current);
            result.qg_final = state.qg_running;
            return result;
        }
    }
    throw PicardNonConvergence(result.residuals);
}

ConditionReport check_initial_state(const BackgroundProfile& background,
                                    const InitialPerturbation& initial) {
    ConditionReport report;
    const double W = background.W;
    const double rv = initial.velocity_support;

    auto f0 = [&](const Vec3& x, const Vec3& v) {
        return background.density(v) - initial.value(x, v);
    };

    // dense nonnegativity sample over radii, directions and speeds
    {
        double min_f0 = INFINITY;
        const Vec3 dirs[4] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.577, 0.577, 0.577}};
        for (int ir = 0; ir <= 40; ++ir)
            for (const Vec3& dx : dirs)
                for (int iu = 0; iu <= 50; ++iu)
                    for (const Vec3& dv : dirs) {
                        const Vec3 x = initial.center + (10.0 * initial.spatial_scale * ir / 40.0) * dx;
                        const Vec3 v = (std::max(W, rv) * 1.02 * iu / 50.0) * dv;
                        min_f0 = std::min(min_f0, f0(x, v));
                    }
        report.clauses.push_back({"nonnegative_f0",
                                  min_f0 >= -1e-14 ? ClauseStatus::pass : ClauseStatus::fail,
                                  min_f0,
                                  "min f0 over the sample"});
    }

    // C^1: bounded central differences in x and v
    {
        double sup_grad = 0.0;
        const double d = 1e-5;
        bool finite = true;
        for (int ir = 0; ir <= 12; ++ir)
            for (int iu = 0; iu <= 12; ++iu) {
                const Vec3 x = initial.center + Vec3{2.0 * initial.spatial_scale * ir / 12.0, 0.3, -0.2};
                const Vec3 v{0.9 * W * iu / 12.0, 0.1, 0.05};
                for (int axis = 0; axis < 3; ++axis) {
                    Vec3 step{axis == 0 ? d : 0.0, axis == 1 ? d : 0.0, axis == 2 ? d : 0.0};
                    const double gx = (f0(x + step, v) - f0(x - step, v)) / (2 * d);
                    const double gv = (f0(x, v + step) - f0(x, v - step)) / (2 * d);
                    if (!std::isfinite(gx) || !std::isfinite(gv)) finite = false;
                    sup_grad = std::max({sup_grad, std::abs(gx), std::abs(gv)});
                }
            }
        report.clauses.push_back({"c1_bounded_derivatives",
                                  finite ? ClauseStatus::pass : ClauseStatus::fail, sup_grad,
                                  "sup |grad f0| over the sample"});
    }

    // compact support of F - f0 in v
    {
        const bool ok = rv <= W + 1.0;
        report.clauses.push_back({"compact_velocity_support",
                                  ok ? ClauseStatus::pass : ClauseStatus::fail,
                                  std::max(W, rv),
                                  "support radius of F - f0 in v"});
    }

    // |F - f0| <= C R^-6 beyond N: measured constant and crossing radius
    {
        double c_meas = 0.0, n_meas = 0.0;
        for (int ir = 0; ir <= 400; ++ir) {
            const double r = 80.0 * ir / 400.0;
            const double sup_v = initial.amplitude *
                                 initial.spatial(initial.center + Vec3{r, 0, 0});
            const double weighted = std::abs(sup_v) * std::pow(decay_weight(r), 6.0);
            if (weighted > c_meas * (1.0 + 1e-12)) {
                c_meas = weighted;
                n_meas = r;
            }
        }
        report.clauses.push_back({"spatial_decay_r6",
                                  std::isfinite(c_meas) ? ClauseStatus::pass : ClauseStatus::fail,
                                  c_meas,
                                  "measured C with crossing radius N = " + std::to_string(n_meas)});
    }
    return report;
}

}  // namespace vpb
