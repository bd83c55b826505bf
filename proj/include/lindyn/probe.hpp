#pragma once

#include <cstdint>
#include <vector>

#include "lindyn/phase.hpp"
#include "lindyn/types.hpp"

namespace lindyn {

enum class ProbeInit {
    // Seeded Gaussian directions rescaled so the init moments hold exactly:
    // sum u^2 = d sigma_u^2, sum wt^2 = d sigma_w^2, sum u wt = 0, hence
    // P = Q = (eta_w sigma_u^2 + eta_u sigma_w^2)/4 and S = (eta_u sigma_w^2
    // - eta_w sigma_u^2)/4 with no sampling fluctuation.
    moment_exact,
    // Plain iid N(0, sigma^2) entries. Finite-width fluctuations of Q/P - 1
    // (order kappa^{-c_d/2}) then enter the measured movement.
    iid,
    // Moment-exact, then the layer whose eta sigma^2 product vanishes
    // fastest is zeroed: the strict kappa -> infinity object.
    limit,
};

struct ProbeOptions {
    ProbeInit init = ProbeInit::moment_exact;
    int d_base = 1;       // d = max(1, round(d_base * kappa^{c_d}))
    int d0 = 1;           // held constant across the sweep
    double y = 1.0;       // effective target of the instantiated instance
    double t_end_factor = 20.0;  // movement measured at t = factor * t_c
};

struct ProbePoint {
    double kappa = 0.0;
    int d = 0;
    double t_c = 0.0;
    double alpha_plus = 0.0;
    double alpha_gap = 0.0;        // |alpha_plus - 1|
    double weight_movement = 0.0;  // |W - W0|_F / |W0|_F at t_end
    double zeta_drift = 0.0;       // |zeta(t_end) - zeta(0)|
    double ntk_drift = 0.0;        // |K(t_end) - K(0)| / |K(0)|
};

struct ProbeResult {
    std::vector<ProbePoint> points;
    double fitted_slope = 0.0;     // least-squares d log(movement) / d log(kappa)
    double predicted_delta = 0.0;  // -delta_exponent when classifiable, else NaN
    Phase phase = Phase::feature_learning;
};

// Instantiates a concrete beta = 1 instance at each kappa and measures the
// finite-size scaling of the closed-form trajectory. Rejects frozen and
// unstable tuples (config_error).
ProbeResult empirical_phase_probe(const ScalingExponents& s, const std::vector<double>& kappas,
                                  std::uint64_t seed, const ProbeOptions& opts = {});

}  // namespace lindyn
