#pragma once

#include "lindyn/types.hpp"

namespace lindyn {

enum class LossConvention {
    mean,  // L = (1/N) sum_k (f(x_k) - y_k)^2
    sum,   // L =       sum_k (f(x_k) - y_k)^2
};

// Collapses a collinear dataset to one effective sample whose gradient-flow
// field equals the full-batch one:
//   |x| = (m_{2b})^{1/(2 beta)},  m_{2b} = mean_k a_k^{2 beta}
//   y   = mean_k(a_k^beta y_k) / sqrt(m_{2b})
//   loss_offset = mean_k y_k^2 - y^2
// (means become sums under LossConvention::sum). Throws config_error when the
// direction is not unit length or every a_k vanishes.
EffectiveData reduce_dataset(const RawDataset& raw, const Hyperparams& hp,
                             LossConvention convention = LossConvention::mean);

}  // namespace lindyn
