#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "lindyn/errors.hpp"
#include "lindyn/types.hpp"

namespace lindyn {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0 -> heuristic from the first derivative
    double min_step = 0.0;      // 0 -> 32 eps max(|t|, 1); underflow throws stiffness_error
    double max_step = 0.0;      // 0 -> unbounded
    std::size_t max_steps = 50'000'000;
    double residual_stop = 1e-12;  // freeze once |residual| drops below; <= 0 disables
    bool use_rk4 = false;          // fixed-step classic RK4 cross-check mode
    double rk4_step = 1e-3;
};

namespace detail {

inline double error_norm(const std::vector<double>& y0, const std::vector<double>& y1,
                         const std::vector<double>& err, double atol, double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / scale;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace detail

// Dormand-Prince 5(4) with FSAL, PI-free simple controller, and step clamping
// so every requested sample time is hit exactly. rhs(t, y, dydt); observer is
// called at each entry of sample_times in order (sample_times must be
// non-decreasing and start at >= t0; t0 itself is observed if present).
// residual, when provided, enables early stopping: once |residual(y)| <
// cfg.residual_stop the state is frozen and remaining samples reuse it.
template <class Rhs, class Observer>
void integrate_adaptive(Rhs&& rhs, std::vector<double> y, double t0,
                        const std::vector<double>& sample_times, const IntegratorConfig& cfg,
                        Observer&& observer,
                        const std::function<double(const std::vector<double>&)>& residual = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

    double t = t0;
    std::size_t next_sample = 0;
    bool frozen = false;

    auto emit_due = [&](double tol_window) {
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t + tol_window) {
            observer(sample_times[next_sample], y);
            ++next_sample;
        }
    };

    emit_due(0.0);
    if (next_sample >= sample_times.size()) return;

    auto freeze_rest = [&]() {
        while (next_sample < sample_times.size()) {
            observer(sample_times[next_sample], y);
            ++next_sample;
        }
    };

    if (residual && cfg.residual_stop > 0.0 && std::abs(residual(y)) < cfg.residual_stop) {
        freeze_rest();
        return;
    }

    if (cfg.use_rk4) {
        const double h0 = cfg.rk4_step;
        if (!(h0 > 0.0)) throw config_error("integrator: rk4_step must be positive");
        std::size_t steps = 0;
        while (next_sample < sample_times.size()) {
            if (++steps > cfg.max_steps) throw stiffness_error("max step count exceeded", t);
            double h = std::min(h0, sample_times[next_sample] - t);
            rhs(t, y, k1);
            for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
            rhs(t + 0.5 * h, ytmp, k2);
            for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
            rhs(t + 0.5 * h, ytmp, k3);
            for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * k3[i];
            rhs(t + h, ytmp, k4);
            for (std::size_t i = 0; i < n; ++i)
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            t += h;
            emit_due(1e-12 * std::max(1.0, std::abs(t)));
        }
        return;
    }

    rhs(t, y, k1);
    double h = cfg.initial_step;
    if (h <= 0.0) {
        double ynorm = 0.0, fnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(k1[i]));
        }
        const double span = sample_times.back() - t;
        h = (fnorm > 0.0 && ynorm > cfg.abs_tol) ? 0.01 * ynorm / fnorm : 1e-3 * span;
        h = std::min(h, 0.1 * span);
        if (!(h > 0.0)) h = 1e-6;
    }

    std::size_t steps = 0;
    while (next_sample < sample_times.size() && !frozen) {
        if (++steps > cfg.max_steps) throw stiffness_error("max step count exceeded", t);
        const double target = sample_times[next_sample];
        bool clamped = false;
        if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);
        if (t + h >= target) {
            h = target - t;
            clamped = true;
        }
        const double min_h = cfg.min_step > 0.0 ? cfg.min_step
                                                : 32.0 * 2.220446049250313e-16 * std::max(std::abs(t), 1.0);
        if (h < min_h && !clamped) throw stiffness_error("step size underflow", t);

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);
        for (std::size_t i = 0; i < n; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);

        const double e = detail::error_norm(y, ynew, err, cfg.abs_tol, cfg.rel_tol);
        if (e <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            if (clamped) {
                emit_due(0.0);
                if (next_sample >= sample_times.size()) break;
            }
            if (residual && cfg.residual_stop > 0.0 &&
                std::abs(residual(y)) < cfg.residual_stop) {
                frozen = true;
                freeze_rest();
                break;
            }
            const double grow = e > 0.0 ? 0.9 * std::pow(e, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            const double shrink = std::max(0.2, 0.9 * std::pow(e, -0.2));
            h *= shrink;
            if (h < min_h) throw stiffness_error("step size underflow after rejection", t);
        }
    }
}

// Full gradient flow on (u, W) for the mean-square loss at the effective
// sample. State layout: y = [u_0..u_{d-1}, W_00..W_{0,d0-1}, W_10, ...].
//   du_i/dt    = -2 eta_u  gamma wt_i^beta r
//   dw_ij/dt   = -2 beta eta_w gamma u_i wt_i^{beta-1} x_j r
// with wt_i = W_i . x and r = gamma sum_i u_i wt_i^beta - y.
void gradient_flow_rhs(const Hyperparams& hp, const EffectiveData& data,
                       const std::vector<double>& y, std::vector<double>& dydt);

std::vector<double> pack_state(const WeightState& s, const Hyperparams& hp);
WeightState unpack_state(const std::vector<double>& y, const Hyperparams& hp, double t);

// Numerical reference trajectory on the requested sample grid.
Trajectory integrate(const WeightState& s0, const EffectiveData& data, const Hyperparams& hp,
                     const std::vector<double>& times, const IntegratorConfig& cfg = {});

}  // namespace lindyn
