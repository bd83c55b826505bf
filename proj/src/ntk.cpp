#include "lindyn/ntk.hpp"

namespace lindyn {

double ntk(const WeightState& s, const std::vector<double>& x1, const std::vector<double>& x2,
           const Hyperparams& hp) {
    double ww = 0.0;
    for (const auto& row : s.W) ww += dot(row, x1) * dot(row, x2);
    const double uu = norm2(s.u);
    return hp.gamma * hp.gamma * (hp.eta_w * ww + hp.eta_u * uu * dot(x1, x2));
}

}  // namespace lindyn
