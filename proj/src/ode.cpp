#include "lindyn/ode.hpp"

#include <cmath>

namespace lindyn {

static double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

void gradient_flow_rhs(const Hyperparams& hp, const EffectiveData& data,
                       const std::vector<double>& y, std::vector<double>& dydt) {
    const int d = hp.d, d0 = hp.d0;
    dydt.resize(y.size());

    double out = 0.0;
    for (int i = 0; i < d; ++i) {
        double wt = 0.0;
        for (int j = 0; j < d0; ++j) wt += y[d + i * d0 + j] * data.x[j];
        out += y[i] * ipow(wt, hp.beta);
    }
    const double r = hp.gamma * out - data.y;
    const double cu = -2.0 * hp.eta_u * hp.gamma * r;
    const double cw = -2.0 * hp.beta * hp.eta_w * hp.gamma * r;
    for (int i = 0; i < d; ++i) {
        double wt = 0.0;
        for (int j = 0; j < d0; ++j) wt += y[d + i * d0 + j] * data.x[j];
        dydt[i] = cu * ipow(wt, hp.beta);
        const double row = cw * y[i] * ipow(wt, hp.beta - 1);
        for (int j = 0; j < d0; ++j) dydt[d + i * d0 + j] = row * data.x[j];
    }
}

std::vector<double> pack_state(const WeightState& s, const Hyperparams& hp) {
    std::vector<double> y(static_cast<std::size_t>(hp.d) * (1 + hp.d0));
    for (int i = 0; i < hp.d; ++i) {
        y[i] = s.u[i];
        for (int j = 0; j < hp.d0; ++j) y[hp.d + i * hp.d0 + j] = s.W[i][j];
    }
    return y;
}

WeightState unpack_state(const std::vector<double>& y, const Hyperparams& hp, double t) {
    WeightState s;
    s.t = t;
    s.u.resize(hp.d);
    s.W.assign(hp.d, std::vector<double>(hp.d0, 0.0));
    for (int i = 0; i < hp.d; ++i) {
        s.u[i] = y[i];
        for (int j = 0; j < hp.d0; ++j) s.W[i][j] = y[hp.d + i * hp.d0 + j];
    }
    return s;
}

Trajectory integrate(const WeightState& s0, const EffectiveData& data, const Hyperparams& hp,
                     const std::vector<double>& times, const IntegratorConfig& cfg) {
    hp.validate();
    if (times.empty()) throw config_error("integrate: empty sample grid");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (times[k] < times[k - 1]) throw config_error("integrate: sample times must ascend");
    if (times.front() < s0.t) throw config_error("integrate: grid starts before the state time");

    Trajectory traj;
    traj.times = times;
    traj.states.reserve(times.size());

    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dydt) {
        gradient_flow_rhs(hp, data, y, dydt);
    };
    auto residual = [&](const std::vector<double>& y) {
        double out = 0.0;
        for (int i = 0; i < hp.d; ++i) {
            double wt = 0.0;
            for (int j = 0; j < hp.d0; ++j) wt += y[hp.d + i * hp.d0 + j] * data.x[j];
            out += y[i] * ipow(wt, hp.beta);
        }
        return hp.gamma * out - data.y;
    };
    integrate_adaptive(
        rhs, pack_state(s0, hp), s0.t, times, cfg,
        [&](double t, const std::vector<double>& y) { traj.states.push_back(unpack_state(y, hp, t)); },
        residual);
    fill_derived(traj, data, hp);
    return traj;
}

}  // namespace lindyn
