#pragma once

#include "lindyn/pq.hpp"
#include "lindyn/types.hpp"

namespace lindyn {

struct SolveOptions {
    // Switch to the degenerate (P = 0) solution when P < threshold * Q.
    double degenerate_threshold = 1e-14;
    // Reconstruct W rows around the initial aligned component instead of the
    // orthogonal complement. That variant fails the t = 0 identity (it adds
    // the initial aligned component twice); kept as an injectable fault so
    // the comparison harness can demonstrate it detects a wrong formula.
    bool inject_reconstruction_fault = false;
};

// Solution parameters for beta = 1:
//   A = gamma^2 d rho^2 P,  B = sqrt(eta_u eta_w) gamma rho y,  C = gamma^2 d rho^2 Q
//   1/t_c = sqrt(B^2 + 4 A C),  alpha_{+,-} = (B +- 1/t_c) / (2 A)
// alpha_plus * alpha_minus = -Q/P and alpha_plus + alpha_minus = B/A.
// Requires beta = 1 and P > 0 (use solve_degenerate otherwise).
ClosedFormParams closed_form_params(const PQState& pq, const EffectiveData& data,
                                    const Hyperparams& hp);

// alpha(t) = (alpha_plus - xi alpha_minus) / (1 - xi),
// xi(t) = ((1 - alpha_plus)/(1 - alpha_minus)) e^{-4t/t_c}.
// alpha(0) = 1, alpha is monotone, alpha(inf) = alpha_plus.
double scale_factor(const ClosedFormParams& cf, double t);

// Per-neuron flow p_i(t) = p_i(0) sqrt(alpha), q_i(t) = q_i(0) / sqrt(alpha),
// reconstructed to weight space with derived scalars at the given times.
Trajectory solve_trajectory(const WeightState& s0, const EffectiveData& data,
                            const Hyperparams& hp, const std::vector<double>& times,
                            const SolveOptions& opts = {});

// p == 0 branch: q_i(t) = q_i(0) sqrt(sigma(t)) with
//   sigma(t) = alpha' / ((1 + alpha') e^{4 B t} - 1),  alpha' = B / (gamma^2 d rho^2 Q),
// so the output relaxes to y when y < 0 and decays to the zero-output saddle
// when y > 0. Throws frozen_dynamics_error when y = 0 (and Q > 0 stays put).
Trajectory solve_degenerate(const PQState& pq, const EffectiveData& data,
                            const Hyperparams& hp, const std::vector<double>& times);

// Loss along the closed form without reconstructing weights:
//   s(t) = (gamma rho / sqrt(eta_u eta_w)) d (P alpha - Q / alpha),
//   L(t) = (s(t) - y)^2 + loss_offset.
std::vector<double> loss_trajectory(const ClosedFormParams& cf, const EffectiveData& data,
                                    const Hyperparams& hp, const std::vector<double>& times);
double final_loss(const ClosedFormParams& cf, const EffectiveData& data, const Hyperparams& hp);

// Characteristic-time grid: n_points log-spaced on [t_c/lo_div, hi_mult * t_c],
// with t = 0 prepended.
std::vector<double> default_time_grid(double t_c, int n_points = 200, double lo_div = 100.0,
                                      double hi_mult = 20.0);

}  // namespace lindyn
