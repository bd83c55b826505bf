#pragma once

#include <vector>

#include "lindyn/errors.hpp"

namespace lindyn {

// Width d, input dimension d0, per-layer learning rates and output scale.
// beta is the integer power applied to each hidden pre-activation.
struct Hyperparams {
    double eta_u = 1.0;
    double eta_w = 1.0;
    double gamma = 1.0;
    int beta = 1;
    int d = 1;
    int d0 = 1;

    void validate() const;
};

// Training set supported on a single direction n: sample k is (a_k * n, y_k).
struct RawDataset {
    std::vector<double> n;  // direction in R^{d0}, unit norm
    std::vector<double> a;  // scalar positions along n
    std::vector<double> y;  // scalar targets
};

// Single effective sample equivalent to the full set under gradient flow.
struct EffectiveData {
    std::vector<double> x;  // effective input, x = rho * n
    double rho = 0.0;       // |x|
    double y = 0.0;         // effective target
    double loss_offset = 0.0;  // irreducible part of the training loss
};

// Network weights at time t: output vector u in R^d, first layer W (d x d0).
struct WeightState {
    std::vector<double> u;
    std::vector<std::vector<double>> W;
    double t = 0.0;
};

// Rotated coordinates: per neuron, p_i and q_i mix the data-aligned first-layer
// component with u_i; their product c_i = p_i q_i is conserved by the flow.
// w_orth holds the frozen orthogonal complement of each W row.
struct PQState {
    std::vector<double> p;
    std::vector<double> q;
    std::vector<double> c;
    std::vector<std::vector<double>> w_orth;
    double t = 0.0;
};

// Everything needed to evaluate the beta = 1 solution at any time.
struct ClosedFormParams {
    double P = 0.0;  // (1/d) sum p_i(0)^2
    double Q = 0.0;  // (1/d) sum q_i(0)^2
    double S = 0.0;  // (1/d) sum p_i(0) q_i(0)
    double A = 0.0;  // gamma^2 d rho^2 P, quadratic coefficient of the flow
    double t_c = 0.0;
    double alpha_plus = 1.0;
    double alpha_minus = 0.0;
};

// Sampled trajectory with per-time derived scalars. states[k].t == times[k].
struct Trajectory {
    std::vector<double> times;
    std::vector<WeightState> states;
    std::vector<double> loss;
    std::vector<double> output;
    std::vector<double> ntk;     // kernel evaluated at (x, x)
    std::vector<double> zeta;    // cos angle between u and W x
    std::vector<double> u_norm;
    std::vector<double> w_norm;  // Frobenius norm of W
};

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& v);  // squared Euclidean norm

// Model output gamma * sum_i u_i (W_i . x)^beta and its derived scalars.
double model_output(const WeightState& s, const EffectiveData& data, const Hyperparams& hp);
double training_loss(const WeightState& s, const EffectiveData& data, const Hyperparams& hp);

// Fills loss/output/ntk/zeta/norm columns from states; times must be set.
void fill_derived(Trajectory& traj, const EffectiveData& data, const Hyperparams& hp);

}  // namespace lindyn
