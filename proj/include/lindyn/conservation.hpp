#pragma once

#include <string>

#include "lindyn/types.hpp"

namespace lindyn {

struct ConservationReport {
    std::string law;
    double max_drift = 0.0;  // worst absolute deviation from the t = 0 value
    double t_at_max = 0.0;
};

// Audits the three invariants of the flow on a sampled trajectory:
//   pq_product:       p_i(t) q_i(t) - p_i(0) q_i(0)            (per neuron)
//   layer_balance:    eta_u sum_j W_ij^2 - beta eta_w u_i^2    (per neuron)
//   row_collinearity: W_ij/x_j - W_ij'/x_j' for x_j, x_j' != 0,
//                     and W_ij itself frozen where x_j = 0
std::vector<ConservationReport> conservation_audit(const Trajectory& traj,
                                                   const EffectiveData& data,
                                                   const Hyperparams& hp);

}  // namespace lindyn
