// interferometer.hpp
//
// A single modified Mach-Zehnder interferometer: polarizing split, phase
// shift phi on path 1, nonsymmetric beam splitter with mixing angle theta,
// and detection at D+/D-. The device acts on a 2-level input exactly like
// a Stern-Gerlach apparatus oriented along the Bloch direction n(theta,phi),
// which is what makes every probability below a closed form.

#pragma once

#include <numbers>
#include <utility>

#include "qeraser/qstate.hpp"

namespace qeraser {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double reduce_mod_2pi(double angle) {
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

// Beam-splitter mixing angle theta in [0, pi] and path phase shift phi,
// stored reduced to [0, 2pi). Out-of-range theta is rejected, not clamped.
struct InterferometerConfig {
    double theta;
    double phi;

    InterferometerConfig(double theta_, double phi_) : theta(theta_), phi(reduce_mod_2pi(phi_)) {
        if (!std::isfinite(theta_) || !std::isfinite(phi_))
            throw ValidationError("InterferometerConfig: angles must be finite");
        if (theta_ < 0.0 || theta_ > kPi)
            throw ValidationError("InterferometerConfig: theta must lie in [0, pi]");
    }
};

// Unit 3-vector on the Bloch sphere.
struct BlochDirection {
    double x, y, z;

    BlochDirection(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
        const double n = std::sqrt(x * x + y * y + z * z);
        if (!std::isfinite(n) || std::abs(n - 1.0) > kTol)
            throw ValidationError("BlochDirection: vector is not unit length");
    }

    // Rescales a nearly-unit vector; rejects anything farther than `tol`
    // from unit length.
    static BlochDirection normalized(double x_, double y_, double z_, double tol = 1e-6) {
        const double n = std::sqrt(x_ * x_ + y_ * y_ + z_ * z_);
        if (!std::isfinite(n) || std::abs(n - 1.0) > tol)
            throw ValidationError("BlochDirection: vector norm deviates from 1 by more than tolerance");
        return BlochDirection(x_ / n, y_ / n, z_ / n);
    }
};

inline double dot(const BlochDirection& a, const BlochDirection& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

// Orthonormal "spinor" basis of elliptical polarizations:
//   |n,+> = (cos(t/2), e^{i p} sin(t/2))
//   |n,-> = (sin(t/2), -e^{i p} cos(t/2))
inline std::pair<PureState2, PureState2> spinor_basis(double vartheta, double varphi,
                                                      Basis2 basis = Basis2::polarization) {
    if (!std::isfinite(vartheta) || vartheta < 0.0 || vartheta > kPi)
        throw ValidationError("spinor_basis: vartheta must lie in [0, pi]");
    const double c = std::cos(0.5 * vartheta);
    const double s = std::sin(0.5 * vartheta);
    const Amplitude phase = std::polar(1.0, varphi);
    PureState2 plus{Amplitude{c, 0.0}, phase * s, basis};
    PureState2 minus{Amplitude{s, 0.0}, -phase * c, basis};
    return {plus, minus};
}

// n(t,p) = (sin t cos p, sin t sin p, cos t)
inline BlochDirection bloch_of(double vartheta, double varphi) {
    if (!std::isfinite(vartheta) || vartheta < 0.0 || vartheta > kPi)
        throw ValidationError("bloch_of: vartheta must lie in [0, pi]");
    return BlochDirection(std::sin(vartheta) * std::cos(varphi),
                          std::sin(vartheta) * std::sin(varphi), std::cos(vartheta));
}

// Inverse of bloch_of: the interferometer setting whose measurement axis
// points along the given direction.
inline InterferometerConfig config_toward(const BlochDirection& n) {
    const double z = std::min(1.0, std::max(-1.0, n.z));
    const double theta = std::acos(z);
    const double phi = std::atan2(n.y, n.x);
    return InterferometerConfig(theta, reduce_mod_2pi(phi));
}

// Lossless beam splitter with transmission cos^2(theta/2) and reflection
// sin^2(theta/2); both amplitudes real by convention (their phases are
// absorbable into phi and the detector states).
inline Unitary2 beam_splitter(double theta) {
    const double a = std::cos(0.5 * theta);
    const double b = std::sin(0.5 * theta);
    Mat2 m;
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = b;
    m(1, 1) = -a;
    return Unitary2(m);
}

// Phase plate on path 1: diag(e^{i phi}, 1).
inline Unitary2 phase_shifter(double phi) {
    Mat2 m;
    m(0, 0) = std::polar(1.0, phi);
    m(1, 1) = 1.0;
    return Unitary2(m);
}

// Full device transfer onto the detector basis {D+, D-}. Equals
// e^{i phi} (<n(theta,phi),+|in>, <n(theta,phi),-|in>); the global phase is
// kept in the state and ignored by every probability query.
inline PureState2 transfer(const InterferometerConfig& config, const PureState2& input) {
    require_normalized(input, "transfer");
    PureState2 out = apply_unitary(beam_splitter(config.theta),
                                   apply_unitary(phase_shifter(config.phi), input));
    out.basis = Basis2::detector;
    return out;
}

struct DetectionProbabilities {
    double d_plus;
    double d_minus;
};

inline DetectionProbabilities detect_probabilities(const InterferometerConfig& config,
                                                   const PureState2& input) {
    const PureState2 out = transfer(config, input);
    return {std::norm(out.a0), std::norm(out.a1)};
}

inline DetectionProbabilities detect_probabilities(const InterferometerConfig& config,
                                                   const Density2& input) {
    const Unitary2 t(beam_splitter(config.theta).m * phase_shifter(config.phi).m);
    const Density2 out = conjugate(t, input);
    return {out.m(0, 0).real(), out.m(1, 1).real()};
}

// Input classes with a closed-form fringe contrast.
enum class InputClass { equatorial_pure, unpolarized };

// Contrast (max-min)/(max+min) of P(D+) over a full phi sweep:
// |sin theta| for any equatorial pure input, 0 for the unpolarized mixture.
inline double fringe_visibility(double theta, InputClass input_class) {
    if (!std::isfinite(theta) || theta < 0.0 || theta > kPi)
        throw ValidationError("fringe_visibility: theta must lie in [0, pi]");
    switch (input_class) {
    case InputClass::equatorial_pure: return std::abs(std::sin(theta));
    case InputClass::unpolarized: return 0.0;
    }
    throw ValidationError("fringe_visibility: unknown input class");
}

} // namespace qeraser
