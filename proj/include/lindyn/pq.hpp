#pragma once

#include "lindyn/types.hpp"

namespace lindyn {

// Rotation to per-neuron conserved coordinates. With wt_i = (W_i . x)/|x|:
//   p_i = (sqrt(eta_u) wt_i + sqrt(beta eta_w) u_i) / 2
//   q_i = (sqrt(eta_u) wt_i - sqrt(beta eta_w) u_i) / 2
// c_i = p_i q_i is stored at conversion time and conserved by the flow.
PQState to_pq(const WeightState& s, const EffectiveData& data, const Hyperparams& hp);

// Inverse rotation:
//   u_i = (p_i - q_i) / sqrt(beta eta_w)
//   W_i = w_orth_i + (p_i + q_i) x / (sqrt(eta_u) |x|)
WeightState from_pq(const PQState& pq, const EffectiveData& data, const Hyperparams& hp);

}  // namespace lindyn
