#include "lindyn/alignment.hpp"

#include <cmath>
#include <limits>

namespace lindyn {

double zeta_of_alpha(double alpha, const ClosedFormParams& cf) {
    if (!(alpha > 0.0)) throw config_error("zeta_of_alpha: alpha must be positive");
    const double num = alpha * cf.P - cf.Q / alpha;
    const double sum = alpha * cf.P + cf.Q / alpha;
    const double disc = sum * sum - 4.0 * cf.S * cf.S;
    if (disc <= 0.0) {
        // Parallel initialization (P Q = S^2): the cosine is exactly +-1.
        return num == 0.0 ? 0.0 : (num > 0.0 ? 1.0 : -1.0);
    }
    return num / std::sqrt(disc);
}

double empirical_zeta(const WeightState& s, const EffectiveData& data) {
    std::vector<double> aligned(s.W.size());
    for (std::size_t i = 0; i < s.W.size(); ++i) aligned[i] = dot(s.W[i], data.x);
    const double nu = norm2(s.u), nw = norm2(aligned);
    if (nu == 0.0 || nw == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return dot(s.u, aligned) / std::sqrt(nu * nw);
}

AlignmentReport alignment_direction(const PQState& pq, const EffectiveData& data,
                                    const Hyperparams& hp) {
    AlignmentReport rep;
    rep.cf = closed_form_params(pq, data, hp);
    rep.parallel_init = std::abs(rep.cf.P * rep.cf.Q - rep.cf.S * rep.cf.S) <=
                        1e-14 * std::max(rep.cf.P * rep.cf.Q, rep.cf.S * rep.cf.S);
    rep.zeta0 = zeta_of_alpha(1.0, rep.cf);
    rep.zeta_inf = rep.cf.alpha_plus > 0.0 ? zeta_of_alpha(rep.cf.alpha_plus, rep.cf) : -1.0;
    if (rep.cf.alpha_plus == 1.0 || rep.parallel_init) {
        rep.direction = 0;
    } else {
        // zeta(alpha) is nondecreasing and alpha runs monotonically from 1
        // toward alpha_plus, so the time direction is sign(alpha_plus - 1).
        rep.direction = rep.cf.alpha_plus > 1.0 ? 1 : -1;
    }
    return rep;
}

RescalingReport norm_trajectories(const PQState& pq, const EffectiveData& data,
                                  const Hyperparams& hp, const std::vector<double>& times) {
    RescalingReport rep;
    rep.cf = closed_form_params(pq, data, hp);
    const double P = rep.cf.P, Q = rep.cf.Q, ap = rep.cf.alpha_plus;
    const double d = static_cast<double>(hp.d);

    const double tie = 1e-12;
    const bool constant = std::abs(ap - 1.0) <= tie;
    {
        const double astar = std::sqrt(Q / P);
        const double lo = std::min(1.0, ap), hi = std::max(1.0, ap);
        rep.boundary_tie = std::abs(ap - 1.0) <= tie || std::abs(astar - lo) <= tie ||
                           std::abs(astar - hi) <= tie;
    }

    if (constant) {
        rep.shape = NormShape::constant;
    } else {
        // h(alpha) = alpha P + Q/alpha has its minimum at sqrt(Q/P); the
        // trajectory dips iff that point is interior to (1, ap) or (ap, 1).
        const double astar = std::sqrt(Q / P);
        const double lo = std::min(1.0, ap), hi = std::max(1.0, ap);
        if (astar > lo + tie && astar < hi - tie) {
            rep.shape = NormShape::dip_then_rise;
            rep.alpha_star = astar;
        } else {
            // Monotone: compare endpoint values of h.
            const double h0 = P + Q;
            const double h1 = ap * P + (ap > 0.0 ? Q / ap : 0.0);
            if (std::abs(h1 - h0) <= tie * std::max(h0, std::abs(h1))) {
                rep.shape = NormShape::constant;
                rep.boundary_tie = true;
            } else {
                rep.shape = h1 > h0 ? NormShape::increasing : NormShape::decreasing;
            }
        }
    }

    rep.alphas.resize(times.size());
    rep.nu.resize(times.size());
    rep.nw.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double a = scale_factor(rep.cf, times[k]);
        const double h = a * P + (a > 0.0 ? Q / a : 0.0);
        rep.alphas[k] = a;
        rep.nu[k] = d * h - 2.0 * d * rep.cf.S;
        rep.nw[k] = d * h + 2.0 * d * rep.cf.S;
    }
    return rep;
}

}  // namespace lindyn
