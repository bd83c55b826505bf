#pragma once

#include <optional>
#include <string>

#include "lindyn/rational.hpp"

namespace lindyn {

// Width-indexed family: d ~ kappa^{c_d}, gamma ~ kappa^{c_gamma},
// init variances sigma_u^2 ~ kappa^{c_u}, sigma_w^2 ~ kappa^{c_w},
// learning rates eta ~ kappa^{c_eta_*}. Exponents are exact rationals.
struct ScalingExponents {
    Rational c_d;
    Rational c_gamma;
    Rational c_u;
    Rational c_w;
    Rational c_eta_u;
    Rational c_eta_w;
};

enum class Phase {
    frozen,
    unstable,
    kernel,
    feature_learning,
};

// How the ratio Q/P behaves as kappa -> infinity; decides kernel vs feature
// on the margin > 0 boundary.
enum class PqCase {
    infinite_width_independent,  // iid init, ratio concentrates iff c_d > 0
    zero_output_init,            // u(0) = 0 exactly, P = Q identically
    rate_imbalance_auto,         // concentrates if c_d > 0, or the eta sigma^2
                                 // products are asymmetric at c_d = 0
    assume_not_converging,       // worst case: never concentrates
};

struct PhaseLabel {
    Phase phase = Phase::frozen;
    Rational stability;      // exponent of the update magnitude
    Rational kernel_margin;  // relative-movement exponent gap
    bool pq_ratio_converges = false;
    std::string pq_justification;
};

std::string phase_name(Phase p);
std::optional<PqCase> pq_case_from_name(const std::string& name);
std::string pq_case_name(PqCase c);

// stability = max{ 2c_g + c_eu + c_ew,  2c_g + c_d + max{c_ew + c_u, c_eu + c_w} }.
// Negative: updates vanish (frozen). Positive: diverge (unstable). Zero: trained.
Rational stability_exponent(const ScalingExponents& s);

// On the stability = 0 set, kernel_margin = c_d + max{c_ew + c_u, c_eu + c_w}
//                                          - c_eu - c_ew;
// margin > 0 with a concentrating Q/P ratio is the kernel phase, margin = 0
// is feature learning, margin > 0 without concentration stays feature.
PhaseLabel classify_phase(const ScalingExponents& s, PqCase pq_case);

// Largest c_eta (applied to both rates) keeping the family stable:
//   c_eta* = min{ -c_g, -2c_g - c_d - max{c_u, c_w} }.
Rational stable_learning_rate(const ScalingExponents& s);

// Smallest uniform rate exponent forcing feature learning, with the output
// scale that stabilizes it: c_eta+ = c_d + max{c_u, c_w}, c_gamma+ = -c_eta+.
struct RateChoice {
    Rational c_eta;
    Rational c_gamma;
};
RateChoice force_feature_learning(const ScalingExponents& s);

// Output scale forcing the kernel phase at a chosen uniform rate exponent:
//   c_gamma = -(c_d + max{c_u, c_w} + c_eta)/2, valid for c_eta < c_d + max{c_u, c_w}.
// Default rate: c_eta- = min{m - 1, 2(m - 1)} with m = c_d + max{c_u, c_w}.
RateChoice force_kernel(const ScalingExponents& s, std::optional<Rational> c_eta = {});

// Relative first-layer movement exponent delta (movement ~ kappa^{-delta}):
// 0 in feature learning; in the kernel phase, with e = -(2c_g + c_eu + c_ew)/2
// (the decay rate of |alpha_plus - 1|): delta = e if c_u = c_w, else 2e.
// Requires label.phase in {kernel, feature_learning}.
Rational delta_exponent(const ScalingExponents& s, const PhaseLabel& label);

// Exact symmetry of the dynamics (u -> l u, w -> l w, gamma -> gamma / l^2,
// eta -> l^2 eta with l = kappa^theta): shifts variance exponents by 2 theta,
// rate exponents by 2 theta, c_gamma by -2 theta. Phase labels are invariant.
ScalingExponents abc_transform(const ScalingExponents& s, const Rational& theta);

}  // namespace lindyn
