#include "lindyn/data.hpp"

#include <cmath>

namespace lindyn {

static double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

EffectiveData reduce_dataset(const RawDataset& raw, const Hyperparams& hp,
                             LossConvention convention) {
    hp.validate();
    if (raw.n.size() != static_cast<std::size_t>(hp.d0))
        throw config_error("dataset direction has dimension " + std::to_string(raw.n.size()) +
                           ", expected d0 = " + std::to_string(hp.d0));
    if (raw.a.empty() || raw.a.size() != raw.y.size())
        throw config_error("dataset needs matching, non-empty a and y lists");
    const double nn = norm2(raw.n);
    if (std::abs(nn - 1.0) > 1e-8)
        throw config_error("dataset direction must be unit length (|n|^2 = " +
                           std::to_string(nn) + ")");

    const std::size_t N = raw.a.size();
    double m2b = 0.0, mby = 0.0, myy = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        const double ab = ipow(raw.a[k], hp.beta);
        m2b += ab * ab;
        mby += ab * raw.y[k];
        myy += raw.y[k] * raw.y[k];
    }
    if (convention == LossConvention::mean) {
        m2b /= static_cast<double>(N);
        mby /= static_cast<double>(N);
        myy /= static_cast<double>(N);
    }
    if (!(m2b > 0.0)) throw config_error("degenerate dataset: every sample sits at a = 0");

    EffectiveData eff;
    eff.rho = std::pow(m2b, 1.0 / (2.0 * hp.beta));
    eff.x.resize(raw.n.size());
    // Renormalize so |x| = rho holds exactly even when |n| = 1 only to 1e-8.
    const double scale = eff.rho / std::sqrt(nn);
    for (std::size_t j = 0; j < raw.n.size(); ++j) eff.x[j] = scale * raw.n[j];
    eff.y = mby / std::sqrt(m2b);
    eff.loss_offset = myy - eff.y * eff.y;
    if (eff.loss_offset < 0.0 && eff.loss_offset > -1e-12) eff.loss_offset = 0.0;
    return eff;
}

}  // namespace lindyn
