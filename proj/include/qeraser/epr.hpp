// epr.hpp
//
// The entanglement quantum eraser and its EPR-Bohm twin: a polarization
// singlet feeding two independently configured Mach-Zehnder interferometers.
// Joint and conditional click statistics, plus CHSH machinery.
//
// Sign convention: the correlator of the singlet is E(n1, n2) = -n1.n2.
// CHSH literature varies on this; everything here is consistent with the
// singlet convention.

#pragma once

#include "qeraser/interferometer.hpp"
#include "qeraser/qstate.hpp"

namespace qeraser {

// Alice's and Bob's interferometer settings.
struct JointConfig {
    InterferometerConfig alice;
    InterferometerConfig bob;
};

// (|01> - |10>)/sqrt(2) over {horizontal, vertical} x {horizontal, vertical}.
inline PureState4 singlet_state() {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    PureState4 s;
    s.a = {Amplitude{0.0, 0.0}, Amplitude{inv_sqrt2, 0.0}, Amplitude{-inv_sqrt2, 0.0},
           Amplitude{0.0, 0.0}};
    return s;
}

// The same singlet expanded through an arbitrary spinor basis,
//   -e^{i varphi}/sqrt(2) (|n,+>|n,-> - |n,->|n,+>),
// including the global phase. Re-expansion at any (vartheta, varphi) must
// reproduce singlet_state() up to global phase; tests rely on that.
inline PureState4 singlet_state_in_basis(double vartheta, double varphi) {
    const auto [plus, minus] = spinor_basis(vartheta, varphi);
    const PureState4 pm = tensor(plus, minus);
    const PureState4 mp = tensor(minus, plus);
    const Amplitude scale = -std::polar(1.0 / std::sqrt(2.0), varphi);
    PureState4 out;
    for (int i = 0; i < 4; ++i) out.a[i] = scale * (pm.a[i] - mp.a[i]);
    return out;
}

// Detection probabilities on Alice's side within the subensembles defined
// by Bob's outcome:
//   P(D+-|D'+) = (1 -+ n1.n2)/2,   P(D+-|D'-) = (1 +- n1.n2)/2.
struct ConditionalProbabilities {
    DetectionProbabilities given_idler_plus;
    DetectionProbabilities given_idler_minus;
};

inline ConditionalProbabilities conditional_probabilities(const JointConfig& jc) {
    const BlochDirection n1 = bloch_of(jc.alice.theta, jc.alice.phi);
    const BlochDirection n2 = bloch_of(jc.bob.theta, jc.bob.phi);
    const double c = dot(n1, n2);
    return {{0.5 * (1.0 - c), 0.5 * (1.0 + c)}, {0.5 * (1.0 + c), 0.5 * (1.0 - c)}};
}

// Joint click distribution over (D+,D'+), (D+,D'-), (D-,D'+), (D-,D'-).
struct JointDistribution {
    double pp, pm, mp, mm;

    JointDistribution(double pp_, double pm_, double mp_, double mm_)
        : pp(pp_), pm(pm_), mp(mp_), mm(mm_) {
        for (double p : {pp, pm, mp, mm})
            if (!std::isfinite(p) || p < -kTol)
                throw ValidationError("JointDistribution: negative or non-finite cell");
        if (std::abs(pp + pm + mp + mm - 1.0) > kTol)
            throw ValidationError("JointDistribution: cells do not sum to 1");
    }

    std::array<double, 4> cells() const { return {pp, pm, mp, mm}; }

    double signal_plus_marginal() const { return pp + pm; }
    double idler_plus_marginal() const { return pp + mp; }
};

// Each idler outcome carries weight 1/2 regardless of either side's
// settings (no-signaling), so the joint cells are half the conditionals.
inline JointDistribution joint_distribution(const JointConfig& jc) {
    const ConditionalProbabilities cond = conditional_probabilities(jc);
    return JointDistribution(0.5 * cond.given_idler_plus.d_plus,
                             0.5 * cond.given_idler_minus.d_plus,
                             0.5 * cond.given_idler_plus.d_minus,
                             0.5 * cond.given_idler_minus.d_minus);
}

// E = P(++) + P(--) - P(+-) - P(-+), evaluated from the joint
// distribution of the settings aimed along the two directions.
// For the singlet this equals -n1.n2.
inline double correlator(const BlochDirection& n1, const BlochDirection& n2) {
    const JointConfig jc{config_toward(n1), config_toward(n2)};
    const JointDistribution j = joint_distribution(jc);
    return j.pp + j.mm - j.pm - j.mp;
}

// S = E(a,b) - E(a,b') + E(a',b) + E(a',b'). Quantum mechanics bounds |S|
// by 2 sqrt(2); any |S| > 2 rules out local hidden variables.
inline double chsh_s(const BlochDirection& a, const BlochDirection& a_prime,
                     const BlochDirection& b, const BlochDirection& b_prime) {
    return correlator(a, b) - correlator(a, b_prime) + correlator(a_prime, b) +
           correlator(a_prime, b_prime);
}

} // namespace qeraser
