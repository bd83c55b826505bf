#include "lindyn/pq.hpp"

#include <cmath>

namespace lindyn {

PQState to_pq(const WeightState& s, const EffectiveData& data, const Hyperparams& hp) {
    hp.validate();
    if (s.u.size() != static_cast<std::size_t>(hp.d) ||
        s.W.size() != static_cast<std::size_t>(hp.d))
        throw config_error("weight state width does not match d");
    if (!(data.rho > 0.0)) throw config_error("effective data has rho = 0");

    const double su = std::sqrt(hp.eta_u);
    const double sw = std::sqrt(hp.beta * hp.eta_w);
    PQState pq;
    pq.t = s.t;
    pq.p.resize(hp.d);
    pq.q.resize(hp.d);
    pq.c.resize(hp.d);
    pq.w_orth.assign(hp.d, std::vector<double>(hp.d0, 0.0));
    for (int i = 0; i < hp.d; ++i) {
        if (s.W[i].size() != static_cast<std::size_t>(hp.d0))
            throw config_error("weight row dimension does not match d0");
        const double proj = dot(s.W[i], data.x) / data.rho;  // aligned component
        pq.p[i] = 0.5 * (su * proj + sw * s.u[i]);
        pq.q[i] = 0.5 * (su * proj - sw * s.u[i]);
        pq.c[i] = pq.p[i] * pq.q[i];
        for (int j = 0; j < hp.d0; ++j)
            pq.w_orth[i][j] = s.W[i][j] - proj * data.x[j] / data.rho;
    }
    return pq;
}

WeightState from_pq(const PQState& pq, const EffectiveData& data, const Hyperparams& hp) {
    hp.validate();
    const double su = std::sqrt(hp.eta_u);
    const double sw = std::sqrt(hp.beta * hp.eta_w);
    WeightState s;
    s.t = pq.t;
    s.u.resize(hp.d);
    s.W.assign(hp.d, std::vector<double>(hp.d0, 0.0));
    for (int i = 0; i < hp.d; ++i) {
        s.u[i] = (pq.p[i] - pq.q[i]) / sw;
        const double aligned = (pq.p[i] + pq.q[i]) / su;
        for (int j = 0; j < hp.d0; ++j)
            s.W[i][j] = pq.w_orth[i][j] + aligned * data.x[j] / data.rho;
    }
    return s;
}

}  // namespace lindyn
