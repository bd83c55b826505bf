#include "lindyn/closed_form.hpp"

#include <cmath>
#include <limits>

namespace lindyn {

ClosedFormParams closed_form_params(const PQState& pq, const EffectiveData& data,
                                    const Hyperparams& hp) {
    hp.validate();
    if (hp.beta != 1) throw config_error("closed form requires beta = 1");
    if (!(data.rho > 0.0)) throw config_error("effective data has rho = 0");

    ClosedFormParams cf;
    const double d = static_cast<double>(hp.d);
    for (int i = 0; i < hp.d; ++i) {
        cf.P += pq.p[i] * pq.p[i];
        cf.Q += pq.q[i] * pq.q[i];
        cf.S += pq.p[i] * pq.q[i];
    }
    cf.P /= d;
    cf.Q /= d;
    cf.S /= d;
    if (!(cf.P > 0.0))
        throw config_error("P = 0 is outside the closed form; use solve_degenerate");

    const double A = hp.gamma * hp.gamma * d * data.rho * data.rho * cf.P;
    const double B = std::sqrt(hp.eta_u * hp.eta_w) * hp.gamma * data.rho * data.y;
    const double C = hp.gamma * hp.gamma * d * data.rho * data.rho * cf.Q;
    cf.A = A;

    const double inv_tc = std::sqrt(B * B + 4.0 * A * C);
    cf.t_c = inv_tc > 0.0 ? 1.0 / inv_tc : std::numeric_limits<double>::infinity();

    // Roots of A r^2 - B r - C: the larger one via the non-cancelling branch,
    // the other from the product alpha_plus alpha_minus = -C/A.
    if (B >= 0.0) {
        cf.alpha_plus = (B + inv_tc) / (2.0 * A);
        cf.alpha_minus = cf.alpha_plus > 0.0 ? -(C / A) / cf.alpha_plus : 0.0;
    } else {
        cf.alpha_minus = (B - inv_tc) / (2.0 * A);
        cf.alpha_plus = cf.alpha_minus < 0.0 ? -(C / A) / cf.alpha_minus : 0.0;
    }
    return cf;
}

double scale_factor(const ClosedFormParams& cf, double t) {
    if (t < 0.0) throw config_error("scale_factor: negative time");
    if (t == 0.0) return 1.0;
    if (cf.alpha_plus == cf.alpha_minus) {
        // Double root (only B = 0, Q = 0): algebraic relaxation toward it.
        const double a = cf.alpha_plus;
        return a + (1.0 - a) / (1.0 + 4.0 * cf.A * (1.0 - a) * t);
    }
    if (cf.alpha_plus == 1.0 || cf.alpha_minus == 1.0) return 1.0;
    const double xi0 = (1.0 - cf.alpha_plus) / (1.0 - cf.alpha_minus);
    const double decay = std::exp(-4.0 * t / cf.t_c);
    if (decay < 1e-300) return cf.alpha_plus;
    const double xi = xi0 * decay;
    return (cf.alpha_plus - xi * cf.alpha_minus) / (1.0 - xi);
}

static Trajectory evaluate_pq_path(const PQState& pq0, const EffectiveData& data,
                                   const Hyperparams& hp, const std::vector<double>& times,
                                   const std::vector<double>& p_scale,
                                   const std::vector<double>& q_scale,
                                   const SolveOptions& opts) {
    Trajectory traj;
    traj.times = times;
    traj.states.reserve(times.size());
    PQState pq = pq0;
    const double su = std::sqrt(hp.eta_u);
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (int i = 0; i < hp.d; ++i) {
            pq.p[i] = pq0.p[i] * p_scale[k];
            pq.q[i] = pq0.q[i] * q_scale[k];
        }
        pq.t = times[k];
        WeightState s = from_pq(pq, data, hp);
        if (opts.inject_reconstruction_fault) {
            for (int i = 0; i < hp.d; ++i) {
                const double aligned0 = (pq0.p[i] + pq0.q[i]) / su;
                for (int j = 0; j < hp.d0; ++j)
                    s.W[i][j] += aligned0 * data.x[j] / data.rho;
            }
        }
        traj.states.push_back(std::move(s));
    }
    fill_derived(traj, data, hp);
    return traj;
}

Trajectory solve_trajectory(const WeightState& s0, const EffectiveData& data,
                            const Hyperparams& hp, const std::vector<double>& times,
                            const SolveOptions& opts) {
    hp.validate();
    if (hp.beta != 1) throw config_error("closed form requires beta = 1");
    PQState pq0 = to_pq(s0, data, hp);

    double P = 0.0, Q = 0.0;
    for (int i = 0; i < hp.d; ++i) {
        P += pq0.p[i] * pq0.p[i];
        Q += pq0.q[i] * pq0.q[i];
    }
    P /= hp.d;
    Q /= hp.d;
    if (P <= opts.degenerate_threshold * Q) {
        for (auto& p : pq0.p) p = 0.0;
        for (int i = 0; i < hp.d; ++i) pq0.c[i] = 0.0;
        return solve_degenerate(pq0, data, hp, times);
    }

    const ClosedFormParams cf = closed_form_params(pq0, data, hp);
    std::vector<double> ps(times.size()), qs(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double a = scale_factor(cf, times[k]);
        const double ra = std::sqrt(a);
        ps[k] = ra;
        qs[k] = a > 0.0 ? 1.0 / ra : 0.0;
    }
    return evaluate_pq_path(pq0, data, hp, times, ps, qs, opts);
}

Trajectory solve_degenerate(const PQState& pq, const EffectiveData& data, const Hyperparams& hp,
                            const std::vector<double>& times) {
    hp.validate();
    if (hp.beta != 1) throw config_error("degenerate solution requires beta = 1");
    for (double p : pq.p)
        if (p != 0.0) throw config_error("solve_degenerate requires p = 0");

    double Q = 0.0;
    for (double q : pq.q) Q += q * q;
    Q /= hp.d;

    const SolveOptions no_fault;
    std::vector<double> ones(times.size(), 1.0);
    if (Q == 0.0) {
        // p = q = 0: the trivial saddle; nothing moves.
        return evaluate_pq_path(pq, data, hp, times, ones, ones, no_fault);
    }

    const double B = std::sqrt(hp.eta_u * hp.eta_w) * hp.gamma * data.rho * data.y;
    if (B == 0.0)
        throw frozen_dynamics_error("P = 0 with y = 0: the solution family is constant");
    const double alpha1 = B / (hp.gamma * hp.gamma * hp.d * data.rho * data.rho * Q);

    // sigma(t) = alpha' xi' / (1 - xi') with 1/xi' = (1 + alpha') e^{4 B t}:
    // sigma(0) = 1, and the exponential is evaluated in the well-posed
    // direction so overflow collapses to the correct limit (0 or -alpha').
    std::vector<double> qs(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double growth = (1.0 + alpha1) * std::exp(4.0 * B * times[k]) - 1.0;
        const double sigma = alpha1 / growth;
        qs[k] = std::sqrt(sigma);
    }
    return evaluate_pq_path(pq, data, hp, times, ones, qs, no_fault);
}

std::vector<double> loss_trajectory(const ClosedFormParams& cf, const EffectiveData& data,
                                    const Hyperparams& hp, const std::vector<double>& times) {
    const double pre = hp.gamma * data.rho / std::sqrt(hp.eta_u * hp.eta_w) * hp.d;
    std::vector<double> out(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double a = scale_factor(cf, times[k]);
        const double s = pre * (cf.P * a - (a > 0.0 ? cf.Q / a : 0.0));
        const double r = s - data.y;
        out[k] = r * r + data.loss_offset;
    }
    return out;
}

double final_loss(const ClosedFormParams& cf, const EffectiveData& data, const Hyperparams& hp) {
    const double pre = hp.gamma * data.rho / std::sqrt(hp.eta_u * hp.eta_w) * hp.d;
    const double a = cf.alpha_plus;
    const double s = pre * (cf.P * a - (a > 0.0 ? cf.Q / a : 0.0));
    const double r = s - data.y;
    return r * r + data.loss_offset;
}

std::vector<double> default_time_grid(double t_c, int n_points, double lo_div, double hi_mult) {
    if (!(t_c > 0.0) || !std::isfinite(t_c))
        throw config_error("default time grid needs a finite positive t_c");
    if (n_points < 2) throw config_error("time grid needs at least 2 points");
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(n_points) + 1);
    times.push_back(0.0);
    const double lo = std::log(t_c / lo_div);
    const double hi = std::log(hi_mult * t_c);
    for (int k = 0; k < n_points; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(n_points - 1);
        times.push_back(std::exp(lo + f * (hi - lo)));
    }
    return times;
}

}  // namespace lindyn
