// mwi.hpp
//
// Many-worlds bookkeeping for the two-interferometer eraser: the universal
// wavefunction (photon pair plus detector registers) evolves unitarily in
// three displayed stages -- source state, post-interferometer state, fully
// branched state -- and the branch squared norms must reproduce the
// Copenhagen joint distribution cell for cell.

#pragma once

#include "qeraser/epr.hpp"
#include "qeraser/interferometer.hpp"
#include "qeraser/qstate.hpp"

namespace qeraser {

// Requested a branch readout from a state that still has amplitude on the
// unresolved detector registers.
class StateNotFinalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Branch order: (D+,D'+), (D+,D'-), (D-,D'+), (D-,D'-).
struct UniversalState {
    std::array<Amplitude, 4> branch{};
    Amplitude unresolved{1.0, 0.0}; // amplitude on the "no signal registered" registers
    PureState4 photons;             // photon pair state carried while unresolved

    double total_norm_sq() const {
        double n = std::norm(unresolved) * norm_sq(photons);
        for (const auto& b : branch) n += std::norm(b);
        return n;
    }

    double unresolved_norm_sq() const { return std::norm(unresolved) * norm_sq(photons); }
};

struct BranchDistribution {
    std::array<double, 4> p{}; // same branch order as UniversalState

    BranchDistribution(double pp, double pm, double mp, double mm) : p{pp, pm, mp, mm} {
        double sum = 0.0;
        for (double v : p) {
            if (!std::isfinite(v) || v < -kTol)
                throw ValidationError("BranchDistribution: negative or non-finite entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kTol)
            throw ValidationError("BranchDistribution: entries do not sum to 1");
    }
};

// Source stage: path-doublet singlet, detectors unresolved.
inline UniversalState initial_universal_state() {
    UniversalState u;
    u.photons = singlet_state();
    return u;
}

// Post-interferometer stage: both photons transferred onto their detector
// modes, registers still unresolved.
inline UniversalState after_interferometers(const JointConfig& jc) {
    UniversalState u = initial_universal_state();
    const Unitary2 t_signal(beam_splitter(jc.alice.theta).m * phase_shifter(jc.alice.phi).m);
    const Unitary2 t_idler(beam_splitter(jc.bob.theta).m * phase_shifter(jc.bob.phi).m);
    u.photons = apply_unitary_pair(t_signal, t_idler, u.photons);
    return u;
}

// Detector coupling: each photon detector-mode amplitude is carried onto
// the matching pointer state, emptying the unresolved register. This is a
// relabeling of orthonormal components, hence unitary.
inline UniversalState couple_detectors(const UniversalState& state) {
    UniversalState u = state;
    for (int i = 0; i < 4; ++i) u.branch[i] += u.unresolved * u.photons.a[i];
    u.unresolved = Amplitude{0.0, 0.0};
    for (auto& c : u.photons.a) c = Amplitude{0.0, 0.0};
    return u;
}

// Full evolution to the branched state. The four branch amplitudes equal
// the antisymmetric combinations of the two arms' spinor overlaps up to one
// global phase.
inline UniversalState evolve_universal(const JointConfig& jc) {
    return couple_detectors(after_interferometers(jc));
}

// Relative frequencies of the four worlds: squared norms of the branch
// amplitudes.
inline BranchDistribution branch_frequencies(const UniversalState& u) {
    if (u.unresolved_norm_sq() > kTol)
        throw StateNotFinalError("branch_frequencies: state still has unresolved amplitude");
    return BranchDistribution(std::norm(u.branch[0]), std::norm(u.branch[1]),
                              std::norm(u.branch[2]), std::norm(u.branch[3]));
}

// Weight of each signal-path origin in each signal detector mode of the
// post-interferometer state: weight[path][mode] with paths {1, 2} and modes
// {D+, D-}. All four are nonzero exactly when theta1 is away from 0 and pi,
// which is the sense in which the signal photon keeps traveling both paths.
struct SignalPathContributions {
    std::array<std::array<double, 2>, 2> weight{};
};

inline SignalPathContributions signal_path_contributions(const JointConfig& jc) {
    const Unitary2 t_signal(beam_splitter(jc.alice.theta).m * phase_shifter(jc.alice.phi).m);
    const Unitary2 t_idler(beam_splitter(jc.bob.theta).m * phase_shifter(jc.bob.phi).m);

    // Evolve the two path-origin terms of the singlet separately and read
    // how much each feeds either signal detector mode.
    const PureState2 path1{Amplitude{1.0, 0.0}, Amplitude{0.0, 0.0}, Basis2::signal_path};
    const PureState2 path2{Amplitude{0.0, 0.0}, Amplitude{1.0, 0.0}, Basis2::signal_path};
    const PureState2 partner1{Amplitude{0.0, 0.0}, Amplitude{1.0, 0.0}, Basis2::idler_path};
    const PureState2 partner2{Amplitude{1.0, 0.0}, Amplitude{0.0, 0.0}, Basis2::idler_path};

    SignalPathContributions out;
    const PureState4 from1 = apply_unitary_pair(t_signal, t_idler, tensor(path1, partner1));
    const PureState4 from2 = apply_unitary_pair(t_signal, t_idler, tensor(path2, partner2));
    // Each origin term carries singlet weight 1/2; sum out the idler modes.
    for (int mode = 0; mode < 2; ++mode) {
        out.weight[0][mode] =
            0.5 * (std::norm(from1.a[2 * mode + 0]) + std::norm(from1.a[2 * mode + 1]));
        out.weight[1][mode] =
            0.5 * (std::norm(from2.a[2 * mode + 0]) + std::norm(from2.a[2 * mode + 1]));
    }
    return out;
}

} // namespace qeraser
