#pragma once

#include "lindyn/closed_form.hpp"
#include "lindyn/types.hpp"

namespace lindyn {

struct AlignmentReport {
    double zeta0 = 0.0;      // cos angle at t = 0
    double zeta_inf = 0.0;   // limit along alpha -> alpha_plus
    int direction = 0;       // +1 increasing, -1 decreasing, 0 constant
    bool parallel_init = false;  // |zeta| = 1 for all t (P Q = S^2)
    ClosedFormParams cf;
};

// cos angle between u and the data-aligned first-layer weights W x / |x|,
// as a function of the scale factor:
//   zeta(alpha) = (alpha P - Q/alpha) / sqrt((alpha P + Q/alpha)^2 - (2S)^2)
// Monotone in t with sign(d zeta / dt) = sign(alpha_plus - 1).
double zeta_of_alpha(double alpha, const ClosedFormParams& cf);

// Direct cosine from a weight state; NaN when either vector vanishes.
double empirical_zeta(const WeightState& s, const EffectiveData& data);

AlignmentReport alignment_direction(const PQState& pq, const EffectiveData& data,
                                    const Hyperparams& hp);

enum class NormShape {
    increasing,
    decreasing,
    dip_then_rise,
    constant,
};

// Both layer norms move in lockstep: with h(alpha) = alpha P + Q/alpha,
//   eta_w |u|^2       = d h - 2 d S,
//   eta_u |W x|^2/|x|^2 = d h + 2 d S,
// so they differ by a constant and share one shape. The shape over
// alpha: 1 -> alpha_plus is monotone unless sqrt(Q/P) lies strictly between
// the endpoints, which produces the dip-then-rise profile.
struct RescalingReport {
    NormShape shape = NormShape::constant;
    bool boundary_tie = false;  // a case discriminant landed within 1e-12
    double alpha_star = 0.0;    // interior minimum sqrt(Q/P) when dipping, else 0
    ClosedFormParams cf;
    // Prefactor-free profiles evaluated on the requested times.
    std::vector<double> alphas;
    std::vector<double> nu;  // d h(alpha) - 2 d S
    std::vector<double> nw;  // d h(alpha) + 2 d S
};

RescalingReport norm_trajectories(const PQState& pq, const EffectiveData& data,
                                  const Hyperparams& hp, const std::vector<double>& times);

}  // namespace lindyn
