#include "lindyn/reduced_ode.hpp"

#include <cmath>
#include <limits>

#include "lindyn/numerics.hpp"

namespace lindyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

// Monotone branch of F for one neuron: the open interval around x_ref
// delimited by 0, +-sqrt(-c) (when the (s^2+c) factor is actually present,
// i.e. beta >= 2), or infinity. Endpoints where F diverges get an fp floor:
// past it, s^2 + c is pure cancellation noise and the root is pinned to the
// floor, which matches the true dynamics (the neuron freezes there) to
// working precision.
struct Branch {
    double lo = 0.0;
    double hi = kInf;
    bool lo_div = false;  // F unbounded toward lo
    bool hi_div = false;  // F unbounded toward hi
    double floor_lo = -kInf;
    double floor_hi = kInf;

    static Branch around(double x_ref, double c, int beta) {
        if (x_ref == 0.0) throw branch_error("reduction requires nonzero initial p");
        Branch b;
        const double s = (beta >= 2 && c < 0.0) ? std::sqrt(-c) : 0.0;
        if (x_ref > 0.0) {
            if (s == 0.0) {
                b.lo = 0.0;
                b.hi = kInf;
                b.lo_div = beta == 1;  // the 1/s integrand has a log divergence at 0
            } else if (x_ref > s) {
                b.lo = s;
                b.hi = kInf;
                b.lo_div = true;
            } else if (x_ref < s) {
                b.lo = 0.0;
                b.hi = s;
                b.hi_div = true;
            } else {
                throw branch_error("initial p sits on the c < 0 singularity");
            }
        } else {
            if (s == 0.0) {
                b.lo = -kInf;
                b.hi = 0.0;
                b.hi_div = beta == 1;
            } else if (x_ref < -s) {
                b.lo = -kInf;
                b.hi = -s;
                b.hi_div = true;
            } else if (x_ref > -s) {
                b.lo = -s;
                b.hi = 0.0;
                b.lo_div = true;
            } else {
                throw branch_error("initial p sits on the c < 0 singularity");
            }
        }
        constexpr double eps = 2.220446049250313e-16;
        if (b.lo_div) b.floor_lo = b.lo == 0.0 ? 1e-300 : b.lo + 32.0 * eps * std::abs(b.lo);
        if (b.hi_div) b.floor_hi = b.hi == 0.0 ? -1e-300 : b.hi - 32.0 * eps * std::abs(b.hi);
        return b;
    }

    bool inside(double x) const { return x > lo && x < hi; }
};

double f_prime(double s, double c, int beta) {
    const double denom = ipow(s * s + c, beta - 1);
    const double numer = beta >= 2 ? ipow(s, beta - 2) : 1.0 / s;
    return numer / denom;
}

double quad_f(double a, double b, double c, int beta) {
    return adaptive_simpson([c, beta](double s) { return f_prime(s, c, beta); }, a, b, 1e-13);
}

// Incremental evaluation state: F relative to x_ref, cached at the last
// queried point so successive inversions only integrate short intervals.
class NeuronBranch {
  public:
    NeuronBranch(double x_ref, double c, int beta)
        : branch_(Branch::around(x_ref, c, beta)), x_ref_(x_ref), c_(c), beta_(beta) {}

    double invert(double v) {
        double x = x_cache_, fx = f_cache_;
        const double tol = 1e-13 * (1.0 + std::abs(v));
        for (int it = 0; it < 80; ++it) {
            const double g = fx - v;
            if (std::abs(g) <= tol) {
                x_cache_ = x;
                f_cache_ = fx;
                return x;
            }
            const double fp = f_prime(x, c_, beta_);
            double xn = x - g / fp;
            // Near a divergent finite endpoint the root distance shrinks
            // exponentially with the shift, so plain Newton crawls; step in
            // the log of the distance instead.
            if (branch_.lo_div && std::isfinite(branch_.lo)) {
                const double dx = x - branch_.lo;
                if (xn - branch_.lo < 0.5 * dx) {
                    const double expo = std::clamp(-g / (fp * dx), -40.0, 40.0);
                    xn = branch_.lo + dx * std::exp(expo);
                }
            }
            if (branch_.hi_div && std::isfinite(branch_.hi)) {
                const double dx = branch_.hi - x;
                if (branch_.hi - xn < 0.5 * dx) {
                    const double expo = std::clamp(g / (fp * dx), -40.0, 40.0);
                    xn = branch_.hi - dx * std::exp(expo);
                }
            }
            const double cap = 1.0 + std::abs(x);
            if (std::abs(xn - x) > cap) xn = x + (xn > x ? cap : -cap);
            if (!(xn > branch_.lo)) xn = std::isfinite(branch_.lo) ? 0.5 * (x + branch_.lo) : xn;
            if (!(xn < branch_.hi)) xn = std::isfinite(branch_.hi) ? 0.5 * (x + branch_.hi) : xn;
            if (xn < branch_.floor_lo) xn = branch_.floor_lo;
            if (xn > branch_.floor_hi) xn = branch_.floor_hi;
            if (!branch_.inside(xn) || !std::isfinite(xn)) break;
            if (xn == x) {
                // Pinned at the floor of a divergent endpoint, or Newton hit
                // the resolution limit: best representable root.
                x_cache_ = x;
                f_cache_ = fx;
                return x;
            }
            fx += quad_f(x, xn, c_, beta_);
            x = xn;
        }
        // Warm start failed (huge jump or boundary crowding): full solve.
        x_cache_ = x_ref_;
        f_cache_ = 0.0;
        const double solved = f_inverse(v, x_ref_, c_, beta_);
        x_cache_ = solved;
        f_cache_ = quad_f(x_ref_, solved, c_, beta_);
        return solved;
    }

  private:
    Branch branch_;
    double x_ref_;
    double c_;
    int beta_;
    double x_cache_ = x_ref_;
    double f_cache_ = 0.0;
};

}  // namespace

double f_integral(double x, double x_ref, double c, int beta) {
    if (beta < 1) throw config_error("f_integral: beta must be a positive integer");
    const Branch b = Branch::around(x_ref, c, beta);
    if (!b.inside(x) && x != x_ref)
        throw branch_error("f_integral: x leaves the branch of x_ref");
    return quad_f(x_ref, x, c, beta);
}

double f_inverse(double value, double x_ref, double c, int beta) {
    if (beta < 1) throw config_error("f_inverse: beta must be a positive integer");
    const Branch b = Branch::around(x_ref, c, beta);
    if (value == 0.0) return x_ref;

    const bool increasing = f_prime(x_ref, c, beta) > 0.0;
    // F(x) - value is negative at x_ref iff we must search toward larger F.
    const bool go_up = (value > 0.0) == increasing;

    // Expand the bracket one doubling at a time, accumulating F by short
    // quadratures: a single quadrature across an enormous span loses the
    // mass near x_ref and fabricates a crossing.
    double far = x_ref, g_far = -value;
    double step = 0.5 * std::max(std::abs(x_ref), 1e-6);
    for (int it = 0; it < 400; ++it) {
        double candidate;
        if (go_up) {
            candidate = std::isfinite(b.hi) ? b.hi - 0.5 * (b.hi - far) : far + step;
            if (candidate > b.floor_hi) candidate = b.floor_hi;
        } else {
            candidate = std::isfinite(b.lo) ? b.lo + 0.5 * (far - b.lo) : far - step;
            if (candidate < b.floor_lo) candidate = b.floor_lo;
        }
        step *= 2.0;
        if (candidate == far) {
            // Resolution exhausted at a finite endpoint: toward a divergent
            // limit the root is pinned there to working precision; toward a
            // finite limit the requested shift is out of range.
            if (go_up && b.hi_div) return std::min(far, b.floor_hi);
            if (!go_up && b.lo_div) return std::max(far, b.floor_lo);
            break;
        }
        const double inc = quad_f(far, candidate, c, beta);
        const double g = g_far + inc;
        if ((g > 0.0) != (g_far > 0.0) || g == 0.0) {
            const double lo = std::min(far, candidate), hi = std::max(far, candidate);
            const double from = far, base = g_far;
            return newton_bisect([&](double x) { return base + quad_f(from, x, c, beta); },
                                 [&](double x) { return f_prime(x, c, beta); },
                                 0.5 * (lo + hi), lo, hi);
        }
        // No sign change and a vanishing increment: the integral saturates
        // toward a finite branch limit that value exceeds.
        if (std::abs(inc) < 1e-15 * (1.0 + std::abs(value)) && it > 8)
            throw branch_error("f_inverse: value beyond the branch range");
        far = candidate;
        g_far = g;
    }
    throw branch_error("f_inverse: could not bracket the target shift");
}

Trajectory integrate_reduced(const PQState& pq0, const EffectiveData& data, const Hyperparams& hp,
                             const std::vector<double>& times, const IntegratorConfig& cfg) {
    hp.validate();
    if (times.empty()) throw config_error("integrate_reduced: empty sample grid");
    if (!(data.rho > 0.0)) throw config_error("effective data has rho = 0");

    const int d = hp.d;
    std::vector<NeuronBranch> neurons;
    neurons.reserve(d);
    for (int i = 0; i < d; ++i) neurons.emplace_back(pq0.p[i], pq0.c[i], hp.beta);

    const double rate =
        2.0 * hp.gamma *
        std::sqrt(hp.beta * std::pow(hp.eta_u, 2 - hp.beta) * hp.eta_w) * ipow(data.rho, hp.beta);
    const double out_pre = hp.gamma * ipow(data.rho, hp.beta) /
                           std::sqrt(hp.beta * ipow(hp.eta_u, hp.beta) * hp.eta_w);

    std::vector<double> p(d), q(d);
    auto eval_residual = [&](double delta) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) {
            p[i] = neurons[i].invert(delta);
            q[i] = pq0.c[i] / p[i];
            acc += (p[i] - q[i]) * ipow(p[i] + q[i], hp.beta);
        }
        return out_pre * acc - data.y;
    };

    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dydt) {
        dydt.resize(1);
        dydt[0] = -rate * eval_residual(y[0]);
    };
    auto residual = [&](const std::vector<double>& y) { return eval_residual(y[0]); };

    Trajectory traj;
    traj.times = times;
    traj.states.reserve(times.size());
    PQState pq = pq0;
    auto observe = [&](double t, const std::vector<double>& y) {
        eval_residual(y[0]);
        pq.p = p;
        pq.q = q;
        pq.t = t;
        traj.states.push_back(from_pq(pq, data, hp));
        traj.states.back().t = t;
    };
    integrate_adaptive(rhs, std::vector<double>{0.0}, pq0.t, times, cfg, observe, residual);
    fill_derived(traj, data, hp);
    return traj;
}

}  // namespace lindyn
