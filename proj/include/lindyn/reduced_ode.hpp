#pragma once

#include "lindyn/ode.hpp"
#include "lindyn/pq.hpp"
#include "lindyn/types.hpp"

namespace lindyn {

// Per-neuron reduced coordinate for general beta:
//   F_i(x) = integral from p_i(0) to x of s^{beta-2} / (s^2 + c_i)^{beta-1} ds,
// taken along the monotone branch containing p_i(0). Every neuron shares the
// same shift Delta(t) = F_i(p_i(t)), Delta(0) = 0.
double f_integral(double x, double x_ref, double c, int beta);

// Inverse of F_i on the branch of x_ref. Throws branch_error when `value`
// falls outside the branch's range (x -> 0+, or x^2 -> -c for c < 0).
double f_inverse(double value, double x_ref, double c, int beta);

// Integrates the scalar shift
//   dDelta/dt = -2 gamma sqrt(beta eta_u^{2-beta} eta_w) rho^beta r(Delta),
//   r = gamma rho^beta (beta eta_u^beta eta_w)^{-1/2}
//         sum_j (p_j - c_j/p_j)(p_j + c_j/p_j)^beta  -  y,
// recovering p_j(t) = F_j^{-1}(Delta(t)), q_j = c_j / p_j, and reconstructing
// full weight states on the sample grid. Requires every p_i(0) != 0.
Trajectory integrate_reduced(const PQState& pq0, const EffectiveData& data, const Hyperparams& hp,
                             const std::vector<double>& times, const IntegratorConfig& cfg = {});

}  // namespace lindyn
