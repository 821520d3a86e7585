// qstate.hpp
//
// Exact complex linear algebra for 2-level and 4-level systems: state
// vectors, density operators, 2x2 unitaries, tensor products, partial
// trace. Dimensions are fixed at 2 and 4 on purpose; nothing in the
// toolkit needs more.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qeraser {

using Amplitude = std::complex<double>;

// Single tolerance used by every exact-math check in the library.
inline constexpr double kTol = 1e-12;

// Thrown when a precondition on operation inputs is violated.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Label for the ordered 2-element basis a state's coordinates refer to.
// The algebra itself is basis-agnostic; the label only documents which
// physical pair of modes the coordinates mean:
//   polarization : {horizontal, vertical}
//   signal_path  : {path 1, path 2}
//   idler_path   : {-path y, path x}  (doublet convention of the idler arm)
//   detector     : {D+, D-}
enum class Basis2 { polarization, signal_path, idler_path, detector };

struct PureState2 {
    Amplitude a0{1.0, 0.0};
    Amplitude a1{0.0, 0.0};
    Basis2 basis = Basis2::polarization;
};

struct PureState4 {
    // Ordered product basis (signal tensor idler); index = 2*s + i.
    std::array<Amplitude, 4> a{Amplitude{1.0, 0.0}, {}, {}, {}};
};

inline double norm_sq(const PureState2& s) {
    return std::norm(s.a0) + std::norm(s.a1);
}

inline double norm_sq(const PureState4& s) {
    double n = 0.0;
    for (const auto& c : s.a) n += std::norm(c);
    return n;
}

// <a|b>
inline Amplitude inner(const PureState2& a, const PureState2& b) {
    return std::conj(a.a0) * b.a0 + std::conj(a.a1) * b.a1;
}

inline Amplitude inner(const PureState4& a, const PureState4& b) {
    Amplitude acc{0.0, 0.0};
    for (int i = 0; i < 4; ++i) acc += std::conj(a.a[i]) * b.a[i];
    return acc;
}

inline bool is_normalized(const PureState2& s, double tol = kTol) {
    return std::abs(norm_sq(s) - 1.0) <= tol;
}

inline bool is_normalized(const PureState4& s, double tol = kTol) {
    return std::abs(norm_sq(s) - 1.0) <= tol;
}

inline void require_normalized(const PureState2& s, const char* what) {
    if (!is_normalized(s))
        throw ValidationError(std::string(what) + ": state is not normalized");
}

inline void require_normalized(const PureState4& s, const char* what) {
    if (!is_normalized(s))
        throw ValidationError(std::string(what) + ": state is not normalized");
}

// Equality of states as rays: |<a|b>| = 1 within tolerance. Global phase is
// never compared component-wise anywhere in the toolkit; only relative
// phases carry physics.
inline bool same_ray(const PureState2& a, const PureState2& b, double tol = kTol) {
    return std::abs(std::abs(inner(a, b)) - 1.0) <= tol;
}

inline bool same_ray(const PureState4& a, const PureState4& b, double tol = kTol) {
    return std::abs(std::abs(inner(a, b)) - 1.0) <= tol;
}

// State orthogonal to |s| in the same 2-dim space: (-conj(a1), conj(a0)).
inline PureState2 perp(const PureState2& s) {
    return PureState2{-std::conj(s.a1), std::conj(s.a0), s.basis};
}

// General 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<Amplitude, 4> m{};

    Amplitude& operator()(int r, int c) { return m[2 * r + c]; }
    const Amplitude& operator()(int r, int c) const { return m[2 * r + c]; }

    static Mat2 identity() {
        Mat2 e;
        e(0, 0) = 1.0;
        e(1, 1) = 1.0;
        return e;
    }
    static Mat2 zero() { return Mat2{}; }
};

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.m[i] = a.m[i] + b.m[i];
    return r;
}

inline Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.m[i] = a.m[i] - b.m[i];
    return r;
}

inline Mat2 operator*(const Amplitude& c, const Mat2& a) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.m[i] = c * a.m[i];
    return r;
}

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

inline Mat2 adjoint(const Mat2& a) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = std::conj(a(j, i));
    return r;
}

inline Amplitude trace(const Mat2& a) { return a(0, 0) + a(1, 1); }

// |ket><bra|
inline Mat2 outer(const PureState2& ket, const PureState2& bra) {
    Mat2 r;
    r(0, 0) = ket.a0 * std::conj(bra.a0);
    r(0, 1) = ket.a0 * std::conj(bra.a1);
    r(1, 0) = ket.a1 * std::conj(bra.a0);
    r(1, 1) = ket.a1 * std::conj(bra.a1);
    return r;
}

inline double max_abs_diff(const Mat2& a, const Mat2& b) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a.m[i] - b.m[i]));
    return d;
}

// <psi|op|psi>
inline Amplitude expectation(const Mat2& op, const PureState2& psi) {
    const Amplitude r0 = op(0, 0) * psi.a0 + op(0, 1) * psi.a1;
    const Amplitude r1 = op(1, 0) * psi.a0 + op(1, 1) * psi.a1;
    return std::conj(psi.a0) * r0 + std::conj(psi.a1) * r1;
}

inline bool is_hermitian(const Mat2& a, double tol = kTol) {
    return max_abs_diff(a, adjoint(a)) <= tol;
}

// Positive semidefiniteness of a Hermitian 2x2: both eigenvalues
// (tr +- sqrt(tr^2 - 4 det)) / 2 must be >= -tol. For Hermitian input the
// trace and determinant are real.
inline bool is_positive_semidefinite(const Mat2& a, double tol = kTol) {
    if (!is_hermitian(a, tol)) return false;
    const double tr = trace(a).real();
    const Amplitude detc = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double det = detc.real();
    const double disc = std::max(tr * tr - 4.0 * det, 0.0);
    const double lo = 0.5 * (tr - std::sqrt(disc));
    return lo >= -tol;
}

// 2x2 unitary; validated at construction (U Udag = I within kTol).
struct Unitary2 {
    Mat2 m;

    explicit Unitary2(const Mat2& candidate) : m(candidate) {
        if (max_abs_diff(m * adjoint(m), Mat2::identity()) > kTol)
            throw ValidationError("Unitary2: matrix is not unitary");
    }

    static Unitary2 identity() { return Unitary2(Mat2::identity()); }
};

// 2x2 density operator; Hermitian, unit trace, positive semidefinite.
struct Density2 {
    Mat2 m;

    explicit Density2(const Mat2& candidate) : m(candidate) {
        if (!is_hermitian(m))
            throw ValidationError("Density2: matrix is not Hermitian");
        if (std::abs(trace(m).real() - 1.0) > kTol || std::abs(trace(m).imag()) > kTol)
            throw ValidationError("Density2: trace is not 1");
        if (!is_positive_semidefinite(m))
            throw ValidationError("Density2: matrix has a negative eigenvalue");
    }

    static Density2 maximally_mixed() {
        Mat2 half = Amplitude{0.5, 0.0} * Mat2::identity();
        return Density2(half);
    }
};

// 4x4 density operator over the (signal tensor idler) product basis,
// row-major. Validated Hermitian with unit trace; positivity of 4x4
// spectra is not policed here (the partial-trace contract only needs
// Hermiticity and trace).
struct Density4 {
    std::array<Amplitude, 16> m{};

    Density4() = default;

    explicit Density4(const std::array<Amplitude, 16>& entries) : m(entries) {
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                if (std::abs(m[4 * r + c] - std::conj(m[4 * c + r])) > kTol)
                    throw ValidationError("Density4: matrix is not Hermitian");
        Amplitude tr{0.0, 0.0};
        for (int i = 0; i < 4; ++i) tr += m[4 * i + i];
        if (std::abs(tr - Amplitude{1.0, 0.0}) > kTol)
            throw ValidationError("Density4: trace is not 1");
    }

    const Amplitude& operator()(int r, int c) const { return m[4 * r + c]; }
};

inline Density2 density_of(const PureState2& s) {
    require_normalized(s, "density_of");
    return Density2(outer(s, s));
}

inline Density4 density_of(const PureState4& s) {
    require_normalized(s, "density_of");
    std::array<Amplitude, 16> e{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) e[4 * r + c] = s.a[r] * std::conj(s.a[c]);
    return Density4(e);
}

// Which tensor factor survives a partial trace.
enum class Subsystem { signal, idler };

// --- Operations ---------------------------------------------------------

// Product state of a signal and an idler 2-level state.
inline PureState4 tensor(const PureState2& signal, const PureState2& idler) {
    require_normalized(signal, "tensor(signal)");
    require_normalized(idler, "tensor(idler)");
    PureState4 out;
    out.a = {signal.a0 * idler.a0, signal.a0 * idler.a1,
             signal.a1 * idler.a0, signal.a1 * idler.a1};
    return out;
}

// Reduced density operator of the kept subsystem.
inline Density2 partial_trace(const Density4& rho, Subsystem keep) {
    Mat2 r;
    if (keep == Subsystem::signal) {
        // rho_s(a,b) = sum_i rho(2a+i, 2b+i)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                r(a, b) = rho(2 * a + 0, 2 * b + 0) + rho(2 * a + 1, 2 * b + 1);
    } else {
        // rho_i(a,b) = sum_s rho(2s+a, 2s+b)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                r(a, b) = rho(0 + a, 0 + b) + rho(2 + a, 2 + b);
    }
    return Density2(r);
}

inline PureState2 apply_unitary(const Unitary2& u, const PureState2& s) {
    require_normalized(s, "apply_unitary");
    return PureState2{u.m(0, 0) * s.a0 + u.m(0, 1) * s.a1,
                      u.m(1, 0) * s.a0 + u.m(1, 1) * s.a1, s.basis};
}

// (U tensor V) acting on a joint state.
inline PureState4 apply_unitary_pair(const Unitary2& u_signal, const Unitary2& u_idler,
                                     const PureState4& s) {
    require_normalized(s, "apply_unitary_pair");
    PureState4 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Amplitude acc{0.0, 0.0};
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    acc += u_signal.m(a, p) * u_idler.m(b, q) * s.a[2 * p + q];
            out.a[2 * a + b] = acc;
        }
    return out;
}

// rho -> U rho Udag
inline Density2 conjugate(const Unitary2& u, const Density2& rho) {
    return Density2(u.m * rho.m * adjoint(u.m));
}

} // namespace qeraser
