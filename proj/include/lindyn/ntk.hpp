#pragma once

#include "lindyn/types.hpp"

namespace lindyn {

// Tangent kernel of the beta = 1 network under per-layer rates:
//   K(x, x') = gamma^2 (eta_w (W x).(W x') + eta_u |u|^2 x.x')
double ntk(const WeightState& s, const std::vector<double>& x1, const std::vector<double>& x2,
           const Hyperparams& hp);

}  // namespace lindyn
