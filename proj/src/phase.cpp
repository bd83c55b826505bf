#include "lindyn/phase.hpp"

#include "lindyn/errors.hpp"

namespace lindyn {

std::string phase_name(Phase p) {
    switch (p) {
        case Phase::frozen: return "frozen";
        case Phase::unstable: return "unstable";
        case Phase::kernel: return "kernel";
        case Phase::feature_learning: return "feature_learning";
    }
    return "?";
}

std::string pq_case_name(PqCase c) {
    switch (c) {
        case PqCase::infinite_width_independent: return "infinite_width_independent";
        case PqCase::zero_output_init: return "zero_output_init";
        case PqCase::rate_imbalance_auto: return "rate_imbalance_auto";
        case PqCase::assume_not_converging: return "assume_not_converging";
    }
    return "?";
}

std::optional<PqCase> pq_case_from_name(const std::string& name) {
    if (name == "infinite_width_independent") return PqCase::infinite_width_independent;
    if (name == "zero_output_init") return PqCase::zero_output_init;
    if (name == "rate_imbalance_auto") return PqCase::rate_imbalance_auto;
    if (name == "assume_not_converging") return PqCase::assume_not_converging;
    return {};
}

Rational stability_exponent(const ScalingExponents& s) {
    const Rational two_cg = s.c_gamma + s.c_gamma;
    const Rational term1 = two_cg + s.c_eta_u + s.c_eta_w;
    const Rational term2 =
        two_cg + s.c_d + rational_max(s.c_eta_w + s.c_u, s.c_eta_u + s.c_w);
    return rational_max(term1, term2);
}

PhaseLabel classify_phase(const ScalingExponents& s, PqCase pq_case) {
    PhaseLabel label;
    label.stability = stability_exponent(s);
    label.kernel_margin =
        s.c_d + rational_max(s.c_eta_w + s.c_u, s.c_eta_u + s.c_w) - s.c_eta_u - s.c_eta_w;

    const Rational zero(0);
    const bool wide = s.c_d > zero;
    const bool imbalanced = s.c_u + s.c_eta_w != s.c_w + s.c_eta_u;
    switch (pq_case) {
        case PqCase::infinite_width_independent:
            label.pq_ratio_converges = wide;
            label.pq_justification =
                wide ? "iid init concentrates P/Q -> 1 as d -> infinity (c_d > 0)"
                     : "iid init at fixed width (c_d = 0) leaves P/Q fluctuating";
            break;
        case PqCase::zero_output_init:
            label.pq_ratio_converges = true;
            label.pq_justification = "u(0) = 0 gives P = Q identically at every width";
            break;
        case PqCase::rate_imbalance_auto:
            if (wide) {
                label.pq_ratio_converges = true;
                label.pq_justification =
                    "c_d > 0: the independent-init width limit governs P/Q -> 1";
            } else if (imbalanced) {
                label.pq_ratio_converges = true;
                label.pq_justification =
                    "c_d = 0 with c_u + c_eta_w != c_w + c_eta_u: the dominant "
                    "eta sigma^2 product drives P/Q -> 1";
            } else {
                label.pq_ratio_converges = false;
                label.pq_justification =
                    "c_d = 0 with balanced eta sigma^2 products: P/Q keeps an O(1) spread";
            }
            break;
        case PqCase::assume_not_converging:
            label.pq_ratio_converges = false;
            label.pq_justification = "declared: P/Q does not converge to 1";
            break;
    }

    if (label.stability < zero) {
        label.phase = Phase::frozen;
    } else if (label.stability > zero) {
        label.phase = Phase::unstable;
    } else if (label.kernel_margin > zero && label.pq_ratio_converges) {
        label.phase = Phase::kernel;
    } else {
        label.phase = Phase::feature_learning;
    }
    return label;
}

Rational stable_learning_rate(const ScalingExponents& s) {
    const Rational a = -s.c_gamma;
    const Rational b = -(s.c_gamma + s.c_gamma) - s.c_d - rational_max(s.c_u, s.c_w);
    return rational_min(a, b);
}

RateChoice force_feature_learning(const ScalingExponents& s) {
    RateChoice rc;
    rc.c_eta = s.c_d + rational_max(s.c_u, s.c_w);
    rc.c_gamma = -rc.c_eta;
    return rc;
}

RateChoice force_kernel(const ScalingExponents& s, std::optional<Rational> c_eta) {
    const Rational m = s.c_d + rational_max(s.c_u, s.c_w);
    RateChoice rc;
    const Rational one(1);
    rc.c_eta = c_eta ? *c_eta : rational_min(m - one, (m - one) + (m - one));
    if (!(rc.c_eta < m))
        throw config_error("force_kernel needs c_eta < c_d + max{c_u, c_w}");
    rc.c_gamma = -(m + rc.c_eta) / Rational(2);
    return rc;
}

Rational delta_exponent(const ScalingExponents& s, const PhaseLabel& label) {
    if (label.phase == Phase::feature_learning) return Rational(0);
    if (label.phase != Phase::kernel)
        throw config_error("delta_exponent needs a kernel or feature_learning label");
    const Rational e =
        -(s.c_gamma + s.c_gamma + s.c_eta_u + s.c_eta_w) / Rational(2);
    return s.c_u == s.c_w ? e : e + e;
}

ScalingExponents abc_transform(const ScalingExponents& s, const Rational& theta) {
    const Rational two_theta = theta + theta;
    ScalingExponents out = s;
    out.c_u = s.c_u + two_theta;
    out.c_w = s.c_w + two_theta;
    out.c_gamma = s.c_gamma - two_theta;
    out.c_eta_u = s.c_eta_u + two_theta;
    out.c_eta_w = s.c_eta_w + two_theta;
    return out;
}

}  // namespace lindyn
