#include "lindyn/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "lindyn/closed_form.hpp"
#include "lindyn/errors.hpp"
#include "lindyn/rng.hpp"
#include "lindyn/threads.hpp"

namespace lindyn {
namespace {

// Unit Gaussian direction; redraw on the (measure-zero) degenerate draw.
std::vector<double> gaussian_direction(int d, Rng& rng) {
    for (;;) {
        std::vector<double> v = rng.normal_vec(static_cast<std::size_t>(d));
        const double n2 = norm2(v);
        if (n2 <= 0.0) continue;
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& x : v) x *= inv;
        return v;
    }
}

// Gaussian directions orthogonalized and rescaled so the init moments hold
// with no sampling error: sum u^2 = d su2, sum (W n)^2 = d sw2, sum u (Wn) = 0.
void exact_moment_init(WeightState& s0, const std::vector<double>& n, double su2, double sw2,
                       Rng& rng) {
    const int d = static_cast<int>(s0.u.size());
    if (d < 2) throw config_error("probe: exact init moments need d >= 2");
    std::vector<double> a = gaussian_direction(d, rng);
    std::vector<double> b;
    double b2 = 0.0;
    do {
        b = rng.normal_vec(static_cast<std::size_t>(d));
        const double ab = dot(a, b);
        for (int i = 0; i < d; ++i) b[i] -= ab * a[i];
        b2 = norm2(b);
    } while (b2 <= 0.0);
    const double cu = std::sqrt(d * su2);
    const double cw = std::sqrt(d * sw2 / b2);
    for (int i = 0; i < d; ++i) {
        s0.u[i] = cu * a[i];
        const double wt = cw * b[i];
        for (std::size_t j = 0; j < n.size(); ++j) s0.W[i][j] = wt * n[j];
    }
}

ProbePoint measure_point(const ScalingExponents& s, ProbeInit init, double kappa,
                         std::uint64_t seed, const ProbeOptions& opts) {
    Hyperparams hp;
    hp.eta_u = std::pow(kappa, s.c_eta_u.value());
    hp.eta_w = std::pow(kappa, s.c_eta_w.value());
    hp.gamma = std::pow(kappa, s.c_gamma.value());
    hp.beta = 1;
    hp.d = std::max<int>(
        1, static_cast<int>(std::llround(opts.d_base * std::pow(kappa, s.c_d.value()))));
    hp.d0 = opts.d0;
    hp.validate();
    const double su2 = std::pow(kappa, s.c_u.value());
    const double sw2 = std::pow(kappa, s.c_w.value());

    EffectiveData data;
    data.x.assign(static_cast<std::size_t>(hp.d0), 0.0);
    data.x[0] = 1.0;
    data.rho = 1.0;
    data.y = opts.y;

    WeightState s0;
    s0.u.assign(static_cast<std::size_t>(hp.d), 0.0);
    s0.W.assign(static_cast<std::size_t>(hp.d),
                std::vector<double>(static_cast<std::size_t>(hp.d0), 0.0));
    Rng rng(seed);
    if (init == ProbeInit::iid) {
        const double su = std::sqrt(su2);
        const double sw = std::sqrt(sw2);
        for (auto& ui : s0.u) ui = su * rng.normal();
        for (auto& row : s0.W)
            for (auto& wij : row) wij = sw * rng.normal();
    } else {
        exact_moment_init(s0, data.x, su2, sw2, rng);
        if (init == ProbeInit::limit) {
            const Rational pu = s.c_eta_w + s.c_u;  // exponent of eta_w sigma_u^2
            const Rational pw = s.c_eta_u + s.c_w;  // exponent of eta_u sigma_w^2
            if (pu < pw) {
                std::fill(s0.u.begin(), s0.u.end(), 0.0);
            } else if (pw < pu) {
                for (auto& row : s0.W) std::fill(row.begin(), row.end(), 0.0);
            }
        }
    }

    const PQState pq = to_pq(s0, data, hp);
    const ClosedFormParams cf = closed_form_params(pq, data, hp);
    const double t_end = opts.t_end_factor * cf.t_c;
    const Trajectory traj = solve_trajectory(s0, data, hp, {0.0, t_end});

    ProbePoint pt;
    pt.kappa = kappa;
    pt.d = hp.d;
    pt.t_c = cf.t_c;
    pt.alpha_plus = cf.alpha_plus;
    pt.alpha_gap = std::abs(cf.alpha_plus - 1.0);
    if (traj.w_norm[0] <= 0.0)
        throw config_error("probe: relative movement needs a nonzero initial W");
    double move2 = 0.0;
    for (int i = 0; i < hp.d; ++i)
        for (int j = 0; j < hp.d0; ++j) {
            const double dw = traj.states[1].W[i][j] - traj.states[0].W[i][j];
            move2 += dw * dw;
        }
    pt.weight_movement = std::sqrt(move2) / traj.w_norm[0];
    pt.zeta_drift = std::abs(traj.zeta[1] - traj.zeta[0]);
    pt.ntk_drift = std::abs(traj.ntk[1] - traj.ntk[0]) / std::abs(traj.ntk[0]);
    return pt;
}

}  // namespace

ProbeResult empirical_phase_probe(const ScalingExponents& s, const std::vector<double>& kappas,
                                  std::uint64_t seed, const ProbeOptions& opts) {
    if (kappas.size() < 2) throw config_error("probe needs at least two kappa values");
    for (double k : kappas)
        if (!(std::isfinite(k) && k > 0.0)) throw config_error("probe: kappa must be positive");

    const PqCase pc = opts.init == ProbeInit::iid ? PqCase::infinite_width_independent
                                                  : PqCase::zero_output_init;
    PhaseLabel label = classify_phase(s, pc);
    if (opts.init != ProbeInit::iid)
        label.pq_justification = "probe init pins P = Q exactly at every width";
    if (label.phase == Phase::frozen || label.phase == Phase::unstable)
        throw config_error("probe needs a stable tuple, got " + phase_name(label.phase));

    ProbeResult res;
    res.phase = label.phase;
    res.points.resize(kappas.size());
    parallel_for(kappas.size(), [&](std::size_t j) {
        res.points[j] = measure_point(s, opts.init, kappas[j], derive_seed(seed, j), opts);
    });

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (const auto& pt : res.points) {
        if (!(pt.weight_movement > 0.0) || !std::isfinite(pt.weight_movement)) continue;
        const double lx = std::log(pt.kappa);
        const double ly = std::log(pt.weight_movement);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    const double det = m * sxx - sx * sx;
    res.fitted_slope =
        (m >= 2 && det != 0.0) ? (m * sxy - sx * sy) / det : std::nan("");
    res.predicted_delta = -delta_exponent(s, label).value();
    return res;
}

}  // namespace lindyn
