// scully_druhl.hpp
//
// The Scully-Druhl-type eraser: two spatially separated emitters record
// the which-way information of the signal photon. Everything the fringe
// and which-way formulas need from the emitters and their environment is
// one complex number, the source overlap mu e^{i delta}. Includes the
// unambiguous-state-discrimination POVM used to read the record, the
// distinguishability/visibility complementarity, and the erasure
// conditionals in both the optimal (bare idler) and nonoptimal
// (environment-decohered) cases.

#pragma once

#include <variant>

#include "qeraser/epr.hpp"
#include "qeraser/interferometer.hpp"
#include "qeraser/qstate.hpp"

namespace qeraser {

// Polar form of the overlap between the two after-emission record states.
struct SourceOverlap {
    double mu;    // magnitude, in [0, 1]
    double delta; // phase, radians

    SourceOverlap(double mu_, double delta_) : mu(mu_), delta(delta_) {
        if (!std::isfinite(mu_) || mu_ < 0.0 || mu_ > 1.0)
            throw ValidationError("SourceOverlap: mu must lie in [0, 1]");
        if (!std::isfinite(delta_))
            throw ValidationError("SourceOverlap: delta must be finite");
    }

    Amplitude value() const { return std::polar(mu, delta); }
};

// Emitter scenarios. Each variant induces a definite overlap between the
// two record states:
//   IdenticalEmitters  - emitters return to their initial state; mu = 1.
//   OrthogonalRecorders- emitters end in orthogonal states; mu = 0.
//   IdealIdler         - the record is a free idler photon; the emitters
//                        themselves are reset, so the source-level overlap
//                        is 0 while the idler carries the which-way record.
//   Spacs              - two seeded coherent states, one raised to a
//                        single-photon-added coherent state.
//   CustomSource       - overlap given directly.
struct IdenticalEmitters {};
struct OrthogonalRecorders {};
struct IdealIdler {};
struct Spacs {
    Amplitude alpha1;
    Amplitude alpha2;
};
struct CustomSource {
    SourceOverlap overlap;
};

using SourceModel =
    std::variant<IdenticalEmitters, OrthogonalRecorders, IdealIdler, Spacs, CustomSource>;

// Overlap of the two record states for a given emitter scenario. For the
// SPACS source,
//   mu = |a1||a2| / (sqrt(1+|a1|^2) sqrt(1+|a2|^2)),
// with delta = arg(conj(a1) a2).
inline SourceOverlap purity(const SourceModel& model) {
    struct Visitor {
        SourceOverlap operator()(const IdenticalEmitters&) const { return {1.0, 0.0}; }
        SourceOverlap operator()(const OrthogonalRecorders&) const { return {0.0, 0.0}; }
        SourceOverlap operator()(const IdealIdler&) const { return {0.0, 0.0}; }
        SourceOverlap operator()(const Spacs& s) const {
            const Amplitude overlap = std::conj(s.alpha1) * s.alpha2 /
                                      std::sqrt((1.0 + std::norm(s.alpha1)) *
                                                (1.0 + std::norm(s.alpha2)));
            return {std::abs(overlap), std::arg(overlap)};
        }
        SourceOverlap operator()(const CustomSource& c) const { return c.overlap; }
    };
    return std::visit(Visitor{}, model);
}

// Which-way distinguishability D = 2 P_succ - 1 = 1 - mu: the advantage of
// the best unambiguous readout over a blind guess.
inline double distinguishability(const SourceOverlap& overlap) { return 1.0 - overlap.mu; }

// Fringe contrast of the total ensemble, V = mu |sin theta1|.
inline double visibility(const SourceOverlap& overlap, double theta1) {
    if (!std::isfinite(theta1) || theta1 < 0.0 || theta1 > kPi)
        throw ValidationError("visibility: theta1 must lie in [0, pi]");
    return overlap.mu * std::abs(std::sin(theta1));
}

// Total-ensemble click probabilities,
//   P(D+-) = (1 +- mu sin(theta1) cos(phi1 + delta)) / 2.
inline DetectionProbabilities ensemble_probabilities(const SourceOverlap& overlap, double theta1,
                                                     double phi1) {
    if (!std::isfinite(theta1) || theta1 < 0.0 || theta1 > kPi)
        throw ValidationError("ensemble_probabilities: theta1 must lie in [0, pi]");
    if (!std::isfinite(phi1))
        throw ValidationError("ensemble_probabilities: phi1 must be finite");
    const double fringe = overlap.mu * std::sin(theta1) * std::cos(phi1 + overlap.delta);
    return {0.5 * (1.0 + fringe), 0.5 * (1.0 - fringe)};
}

struct DualityTerms {
    double d_squared;
    double v_squared;
    double sum; // (1-mu)^2 + mu^2 sin^2(theta1), never above 1
};

inline DualityTerms duality_check(const SourceOverlap& overlap, double theta1) {
    const double d = distinguishability(overlap);
    const double v = visibility(overlap, theta1);
    return {d * d, v * v, d * d + v * v};
}

// Three-outcome POVM for unambiguous discrimination of |psi1> vs |psi2>:
//   F1 = |psi2_perp><psi2_perp| / (1 + |<psi1|psi2>|)   certifies psi1,
//   F2 = |psi1_perp><psi1_perp| / (1 + |<psi1|psi2>|)   certifies psi2,
//   F? = I - F1 - F2                                     inconclusive.
// Misidentification probability is exactly zero; the conclusive rate
// 1 - |<psi1|psi2>| is the optimum over all unambiguous strategies.
struct DiscriminationPOVM {
    Mat2 conclusive_1; // F1
    Mat2 conclusive_2; // F2
    Mat2 inconclusive; // F?
    PureState2 psi1;
    PureState2 psi2;

    DiscriminationPOVM(const Mat2& f1, const Mat2& f2, const Mat2& fq, const PureState2& s1,
                       const PureState2& s2)
        : conclusive_1(f1), conclusive_2(f2), inconclusive(fq), psi1(s1), psi2(s2) {
        for (const Mat2* f : {&conclusive_1, &conclusive_2, &inconclusive})
            if (!is_positive_semidefinite(*f))
                throw ValidationError("DiscriminationPOVM: element is not positive semidefinite");
        if (max_abs_diff(conclusive_1 + conclusive_2 + inconclusive, Mat2::identity()) > kTol)
            throw ValidationError("DiscriminationPOVM: elements do not sum to identity");
        if (std::abs(expectation(conclusive_1, psi2)) > kTol ||
            std::abs(expectation(conclusive_2, psi1)) > kTol)
            throw ValidationError("DiscriminationPOVM: unambiguity violated");
    }
};

// Degenerate case: for identical (same-ray) inputs no conclusive outcome
// exists; the POVM collapses to F1 = F2 = 0, F? = I.
inline DiscriminationPOVM uqsd_build(const PureState2& psi1, const PureState2& psi2) {
    require_normalized(psi1, "uqsd_build(psi1)");
    require_normalized(psi2, "uqsd_build(psi2)");
    const double s = std::abs(inner(psi1, psi2));
    if (s >= 1.0 - kTol)
        return DiscriminationPOVM(Mat2::zero(), Mat2::zero(), Mat2::identity(), psi1, psi2);
    const Amplitude scale{1.0 / (1.0 + s), 0.0};
    const Mat2 f1 = scale * outer(perp(psi2), perp(psi2));
    const Mat2 f2 = scale * outer(perp(psi1), perp(psi1));
    const Mat2 fq = Mat2::identity() - f1 - f2;
    return DiscriminationPOVM(f1, f2, fq, psi1, psi2);
}

inline double conclusive_probability(const DiscriminationPOVM& povm) {
    return 1.0 - std::abs(inner(povm.psi1, povm.psi2));
}

enum class PreparedState { psi1, psi2 };

struct OutcomeDistribution {
    double p_1;            // conclusive "it was psi1"
    double p_2;            // conclusive "it was psi2"
    double p_inconclusive; // "?"
};

inline OutcomeDistribution uqsd_outcome_distribution(const DiscriminationPOVM& povm,
                                                     PreparedState prepared) {
    const PureState2& psi = (prepared == PreparedState::psi1) ? povm.psi1 : povm.psi2;
    return {expectation(povm.conclusive_1, psi).real(),
            expectation(povm.conclusive_2, psi).real(),
            expectation(povm.inconclusive, psi).real()};
}

namespace detail {

// Joint click distribution of the ideal-idler eraser, computed by evolving
// the path-doublet pair state through both interferometers and reading the
// squared amplitudes. The doublet convention is
//   signal: |+> = |path 1>, |-> = |path 2>
//   idler : |+> = -|path y>, |-> = |path x>
// under which (|path1, path x> + |path2, path y>)/sqrt(2) is the singlet.
inline JointDistribution ideal_idler_joint(const JointConfig& jc) {
    const PureState2 path1{Amplitude{1.0, 0.0}, Amplitude{0.0, 0.0}, Basis2::signal_path};
    const PureState2 path2{Amplitude{0.0, 0.0}, Amplitude{1.0, 0.0}, Basis2::signal_path};
    const PureState2 path_x{Amplitude{0.0, 0.0}, Amplitude{1.0, 0.0}, Basis2::idler_path};
    const PureState2 path_y{Amplitude{-1.0, 0.0}, Amplitude{0.0, 0.0}, Basis2::idler_path};

    const PureState4 term1 = tensor(path1, path_x);
    const PureState4 term2 = tensor(path2, path_y);
    PureState4 source;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < 4; ++i) source.a[i] = inv_sqrt2 * (term1.a[i] + term2.a[i]);

    const Unitary2 t_signal(beam_splitter(jc.alice.theta).m * phase_shifter(jc.alice.phi).m);
    const Unitary2 t_idler(beam_splitter(jc.bob.theta).m * phase_shifter(jc.bob.phi).m);
    const PureState4 out = apply_unitary_pair(t_signal, t_idler, source);

    return JointDistribution(std::norm(out.a[0]), std::norm(out.a[1]), std::norm(out.a[2]),
                             std::norm(out.a[3]));
}

} // namespace detail

// Erasure conditionals of the ideal-idler source. Computed through the
// state-vector pipeline rather than the closed form, so agreement with
// epr::conditional_probabilities is a genuine cross-check of the analogy.
inline ConditionalProbabilities optimal_conditionals(const JointConfig& jc) {
    const JointDistribution j = detail::ideal_idler_joint(jc);
    const double idler_plus = j.pp + j.mp;
    const double idler_minus = j.pm + j.mm;
    return {{j.pp / idler_plus, j.mp / idler_plus}, {j.pm / idler_minus, j.mm / idler_minus}};
}

// Erasure conditionals when the emission leaves a footprint |m>/|n> on the
// environment with <m|n> = mu e^{i delta}:
//   P(D+|D'+) = cos^2(t1/2) sin^2(t2/2) + sin^2(t1/2) cos^2(t2/2)
//               - (mu/2) sin t1 sin t2 cos(phi1 - phi2 - delta)
// and cyclic variants. mu = 1 recovers the optimal case; mu = 0 kills the
// phi1 modulation for good.
inline ConditionalProbabilities nonoptimal_conditionals(const SourceOverlap& overlap,
                                                        const JointConfig& jc) {
    const double c1 = std::cos(0.5 * jc.alice.theta), s1 = std::sin(0.5 * jc.alice.theta);
    const double c2 = std::cos(0.5 * jc.bob.theta), s2 = std::sin(0.5 * jc.bob.theta);
    const double cross = 0.5 * overlap.mu * std::sin(jc.alice.theta) * std::sin(jc.bob.theta) *
                         std::cos(jc.alice.phi - jc.bob.phi - overlap.delta);
    const double pp = c1 * c1 * s2 * s2 + s1 * s1 * c2 * c2 - cross;
    const double mp = s1 * s1 * s2 * s2 + c1 * c1 * c2 * c2 + cross;
    const double pm = c1 * c1 * c2 * c2 + s1 * s1 * s2 * s2 + cross;
    const double mm = s1 * s1 * c2 * c2 + c1 * c1 * s2 * s2 - cross;
    return {{pp, mp}, {pm, mm}};
}

} // namespace qeraser
