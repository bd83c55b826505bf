#include "lindyn/types.hpp"

#include <cmath>

#include "lindyn/alignment.hpp"
#include "lindyn/ntk.hpp"

namespace lindyn {

void Hyperparams::validate() const {
    if (!(eta_u > 0.0) || !(eta_w > 0.0))
        throw config_error("learning rates must be positive");
    if (!(gamma > 0.0)) throw config_error("gamma must be positive");
    if (beta < 1) throw config_error("beta must be a positive integer");
    if (d < 1) throw config_error("width d must be at least 1");
    if (d0 < 1) throw config_error("input dimension d0 must be at least 1");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& v) { return dot(v, v); }

static double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

double model_output(const WeightState& s, const EffectiveData& data, const Hyperparams& hp) {
    double acc = 0.0;
    for (int i = 0; i < hp.d; ++i) acc += s.u[i] * ipow(dot(s.W[i], data.x), hp.beta);
    return hp.gamma * acc;
}

double training_loss(const WeightState& s, const EffectiveData& data, const Hyperparams& hp) {
    const double r = model_output(s, data, hp) - data.y;
    return r * r + data.loss_offset;
}

void fill_derived(Trajectory& traj, const EffectiveData& data, const Hyperparams& hp) {
    const std::size_t n = traj.states.size();
    traj.loss.resize(n);
    traj.output.resize(n);
    traj.ntk.resize(n);
    traj.zeta.resize(n);
    traj.u_norm.resize(n);
    traj.w_norm.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const WeightState& s = traj.states[k];
        const double out = model_output(s, data, hp);
        traj.output[k] = out;
        const double r = out - data.y;
        traj.loss[k] = r * r + data.loss_offset;
        traj.ntk[k] = ntk(s, data.x, data.x, hp);
        traj.zeta[k] = empirical_zeta(s, data);
        traj.u_norm[k] = std::sqrt(norm2(s.u));
        double wf = 0.0;
        for (const auto& row : s.W) wf += norm2(row);
        traj.w_norm[k] = std::sqrt(wf);
    }
}

}  // namespace lindyn
