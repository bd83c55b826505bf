#include "lindyn/conservation.hpp"

#include <cmath>

#include "lindyn/pq.hpp"

namespace lindyn {

std::vector<ConservationReport> conservation_audit(const Trajectory& traj,
                                                   const EffectiveData& data,
                                                   const Hyperparams& hp) {
    hp.validate();
    if (traj.states.empty()) throw config_error("conservation_audit: empty trajectory");
    const int d = hp.d, d0 = hp.d0;

    ConservationReport pq_rep{"pq_product", 0.0, traj.times.front()};
    ConservationReport bal_rep{"layer_balance", 0.0, traj.times.front()};
    ConservationReport row_rep{"row_collinearity", 0.0, traj.times.front()};

    // Reference values at the first sample.
    const PQState pq0 = to_pq(traj.states.front(), data, hp);
    std::vector<double> bal0(d);
    for (int i = 0; i < d; ++i)
        bal0[i] = hp.eta_u * norm2(traj.states.front().W[i]) -
                  hp.beta * hp.eta_w * traj.states.front().u[i] * traj.states.front().u[i];

    // Column pairs for the collinearity law: each nonzero-x column against
    // the largest one; zero-x columns must stay frozen outright.
    int jref = 0;
    for (int j = 1; j < d0; ++j)
        if (std::abs(data.x[j]) > std::abs(data.x[jref])) jref = j;
    const double x_tol = 1e-12 * std::abs(data.x[jref]);
    std::vector<double> ratio0(static_cast<std::size_t>(d) * d0, 0.0);
    const auto& W0 = traj.states.front().W;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d0; ++j)
            if (std::abs(data.x[j]) > x_tol && j != jref)
                ratio0[i * d0 + j] = W0[i][j] / data.x[j] - W0[i][jref] / data.x[jref];

    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const WeightState& s = traj.states[k];
        const double t = traj.times[k];
        const PQState pq = to_pq(s, data, hp);
        for (int i = 0; i < d; ++i) {
            const double dpq = std::abs(pq.p[i] * pq.q[i] - pq0.c[i]);
            if (dpq > pq_rep.max_drift) {
                pq_rep.max_drift = dpq;
                pq_rep.t_at_max = t;
            }
            const double bal =
                hp.eta_u * norm2(s.W[i]) - hp.beta * hp.eta_w * s.u[i] * s.u[i];
            const double dbal = std::abs(bal - bal0[i]);
            if (dbal > bal_rep.max_drift) {
                bal_rep.max_drift = dbal;
                bal_rep.t_at_max = t;
            }
            for (int j = 0; j < d0; ++j) {
                double drow = 0.0;
                if (std::abs(data.x[j]) <= x_tol) {
                    drow = std::abs(s.W[i][j] - W0[i][j]);
                } else if (j != jref) {
                    drow = std::abs(s.W[i][j] / data.x[j] - s.W[i][jref] / data.x[jref] -
                                    ratio0[i * d0 + j]);
                }
                if (drow > row_rep.max_drift) {
                    row_rep.max_drift = drow;
                    row_rep.t_at_max = t;
                }
            }
        }
    }
    return {pq_rep, bal_rep, row_rep};
}

}  // namespace lindyn
