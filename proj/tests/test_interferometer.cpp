#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qeraser/interferometer.hpp"

using namespace qeraser;

namespace {
bool close(double a, double b, double tol = kTol) { return std::abs(a - b) <= tol; }
} // namespace

TEST_CASE("spinor basis at the pole and on the equator") {
    SECTION("pole: vartheta = 0") {
        const auto [plus, minus] = spinor_basis(0.0, 1.7);
        REQUIRE(close(std::abs(plus.a0 - Amplitude{1.0, 0.0}), 0.0));
        REQUIRE(close(std::abs(plus.a1), 0.0));
        REQUIRE(close(std::abs(minus.a0), 0.0));
        REQUIRE(close(std::abs(minus.a1 + std::polar(1.0, 1.7)), 0.0));
    }
    SECTION("equator, varphi = 0: (1, 1)/sqrt(2)") {
        const auto [plus, minus] = spinor_basis(kPi / 2, 0.0);
        (void)minus;
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        REQUIRE(close(std::abs(plus.a0 - Amplitude{inv_sqrt2, 0.0}), 0.0));
        REQUIRE(close(std::abs(plus.a1 - Amplitude{inv_sqrt2, 0.0}), 0.0));
    }
    SECTION("equator, varphi = pi/2: (1, i)/sqrt(2)") {
        const auto [plus, minus] = spinor_basis(kPi / 2, kPi / 2);
        (void)minus;
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        REQUIRE(close(std::abs(plus.a0 - Amplitude{inv_sqrt2, 0.0}), 0.0));
        REQUIRE(close(std::abs(plus.a1 - Amplitude{0.0, inv_sqrt2}), 0.0));
    }
}

TEST_CASE("spinor basis states are orthonormal everywhere") {
    oracles::Rng rng(606);
    for (int i = 0; i < 1000; ++i) {
        const auto [plus, minus] = spinor_basis(rng.polar(), rng.azimuth());
        REQUIRE(close(norm_sq(plus), 1.0));
        REQUIRE(close(norm_sq(minus), 1.0));
        REQUIRE(close(std::abs(inner(plus, minus)), 0.0));
    }
}

TEST_CASE("spinor basis rejects vartheta outside [0, pi]") {
    REQUIRE_THROWS_AS(spinor_basis(-0.1, 0.0), ValidationError);
    REQUIRE_THROWS_AS(spinor_basis(kPi + 0.1, 0.0), ValidationError);
}

TEST_CASE("bloch_of evaluates the unit direction") {
    const BlochDirection pole = bloch_of(0.0, 0.0);
    REQUIRE(close(pole.x, 0.0));
    REQUIRE(close(pole.y, 0.0));
    REQUIRE(close(pole.z, 1.0));

    const BlochDirection x_axis = bloch_of(kPi / 2, 0.0);
    REQUIRE(close(x_axis.x, 1.0));
    REQUIRE(close(x_axis.z, 0.0));

    const BlochDirection generic = bloch_of(kPi / 3, kPi / 4);
    REQUIRE(close(generic.x, std::sin(kPi / 3) * std::cos(kPi / 4)));
    REQUIRE(close(generic.y, std::sin(kPi / 3) * std::sin(kPi / 4)));
    REQUIRE(close(generic.z, std::cos(kPi / 3)));
}

TEST_CASE("inner-product identity over 1e4 random angle quadruples") {
    oracles::Rng rng(707);
    for (int i = 0; i < 10000; ++i) {
        const double t1 = rng.polar(), p1 = rng.azimuth();
        const double t2 = rng.polar(), p2 = rng.azimuth();
        const auto [plus1, minus1] = spinor_basis(t1, p1);
        const auto [plus2, minus2] = spinor_basis(t2, p2);
        (void)minus2;
        const double c = dot(bloch_of(t1, p1), bloch_of(t2, p2));
        REQUIRE(close(std::norm(inner(plus1, plus2)), 0.5 * (1.0 + c)));
        REQUIRE(close(std::norm(inner(minus1, plus2)), 0.5 * (1.0 - c)));
    }
}

TEST_CASE("transfer at the beam-splitter extremes") {
    const PureState2 horizontal{Amplitude{1.0, 0.0}, Amplitude{0.0, 0.0}};
    const PureState2 vertical{Amplitude{0.0, 0.0}, Amplitude{1.0, 0.0}};

    SECTION("theta = 0: paths hit the detectors separately") {
        const InterferometerConfig device(0.0, 0.9);
        const PureState2 h_out = transfer(device, horizontal);
        REQUIRE(close(std::abs(h_out.a0), 1.0));
        REQUIRE(close(std::abs(h_out.a1), 0.0));
        const PureState2 v_out = transfer(device, vertical);
        REQUIRE(close(std::abs(v_out.a0), 0.0));
        REQUIRE(close(std::abs(v_out.a1 + Amplitude{1.0, 0.0}), 0.0)); // -|D->
        REQUIRE(h_out.basis == Basis2::detector);
    }
    SECTION("symmetric splitter aligned with an equatorial input") {
        const InterferometerConfig device(kPi / 2, 0.0);
        const auto [input, unused] = spinor_basis(kPi / 2, 0.0);
        (void)unused;
        const DetectionProbabilities p = detect_probabilities(device, input);
        REQUIRE(close(p.d_plus, 1.0));
        REQUIRE(close(p.d_minus, 0.0));
    }
}

TEST_CASE("eigenstates of the device register sharply") {
    oracles::Rng rng(808);
    for (int i = 0; i < 1000; ++i) {
        const InterferometerConfig device(rng.polar(), rng.azimuth());
        const auto [plus, minus] = spinor_basis(device.theta, device.phi);
        const DetectionProbabilities p_plus = detect_probabilities(device, plus);
        REQUIRE(close(p_plus.d_plus, 1.0));
        REQUIRE(close(p_plus.d_minus, 0.0));
        const DetectionProbabilities p_minus = detect_probabilities(device, minus);
        REQUIRE(close(p_minus.d_plus, 0.0));
        REQUIRE(close(p_minus.d_minus, 1.0));
    }
}

TEST_CASE("transfer is unitary: inner products preserved") {
    oracles::Rng rng(909);
    for (int i = 0; i < 1000; ++i) {
        const InterferometerConfig device(rng.polar(), rng.azimuth());
        const PureState2 a = rng.spinor();
        const PureState2 b = rng.spinor();
        const Amplitude before = inner(a, b);
        const Amplitude after = inner(transfer(device, a), transfer(device, b));
        REQUIRE(std::abs(before - after) <= kTol);
    }
}

TEST_CASE("detection probabilities") {
    SECTION("unpolarized input is flat for any setting") {
        oracles::Rng rng(1010);
        for (int i = 0; i < 200; ++i) {
            const DetectionProbabilities p =
                detect_probabilities(rng.config(), Density2::maximally_mixed());
            REQUIRE(close(p.d_plus, 0.5));
            REQUIRE(close(p.d_minus, 0.5));
        }
    }
    SECTION("equatorial input follows the fringe law") {
        oracles::Rng rng(1111);
        for (int i = 0; i < 1000; ++i) {
            const InterferometerConfig device(rng.polar(), rng.azimuth());
            const double varphi = rng.azimuth();
            const auto [input, unused] = spinor_basis(kPi / 2, varphi);
            (void)unused;
            const DetectionProbabilities p = detect_probabilities(device, input);
            const double expected =
                0.5 * (1.0 + std::sin(device.theta) * std::cos(device.phi - varphi));
            REQUIRE(close(p.d_plus, expected));
            REQUIRE(close(p.d_plus + p.d_minus, 1.0));
        }
    }
    SECTION("horizontal input sees only the splitting ratio") {
        const PureState2 horizontal{Amplitude{1.0, 0.0}, Amplitude{0.0, 0.0}};
        oracles::Rng rng(1212);
        for (int i = 0; i < 200; ++i) {
            const InterferometerConfig device(rng.polar(), rng.azimuth());
            const DetectionProbabilities p = detect_probabilities(device, horizontal);
            REQUIRE(close(p.d_plus, std::cos(device.theta / 2) * std::cos(device.theta / 2)));
            REQUIRE(close(p.d_minus, std::sin(device.theta / 2) * std::sin(device.theta / 2)));
        }
    }
}

TEST_CASE("density-operator inputs behave like their pure counterparts") {
    oracles::Rng rng(1414);
    SECTION("a pure density reproduces the pure-state probabilities") {
        for (int i = 0; i < 500; ++i) {
            const InterferometerConfig device(rng.polar(), rng.azimuth());
            const PureState2 psi = rng.spinor();
            const DetectionProbabilities from_state = detect_probabilities(device, psi);
            const DetectionProbabilities from_density =
                detect_probabilities(device, density_of(psi));
            REQUIRE(std::abs(from_state.d_plus - from_density.d_plus) <= kTol);
            REQUIRE(std::abs(from_state.d_minus - from_density.d_minus) <= kTol);
        }
    }
    SECTION("probabilities of random mixtures are normalized and nonnegative") {
        for (int i = 0; i < 500; ++i) {
            const double w = rng.in(0.0, 1.0);
            const Mat2 a = density_of(rng.spinor()).m;
            const Mat2 b = density_of(rng.spinor()).m;
            const Density2 rho(Amplitude{w, 0.0} * a + Amplitude{1.0 - w, 0.0} * b);
            const DetectionProbabilities p =
                detect_probabilities(InterferometerConfig(rng.polar(), rng.azimuth()), rho);
            REQUIRE(p.d_plus >= -kTol);
            REQUIRE(p.d_minus >= -kTol);
            REQUIRE(std::abs(p.d_plus + p.d_minus - 1.0) <= kTol);
        }
    }
}

TEST_CASE("fringe visibility matches a dense phase scan") {
    SECTION("closed-form values") {
        REQUIRE(close(fringe_visibility(kPi / 2, InputClass::equatorial_pure), 1.0));
        REQUIRE(close(fringe_visibility(0.0, InputClass::equatorial_pure), 0.0));
        REQUIRE(close(fringe_visibility(kPi / 3, InputClass::equatorial_pure),
                      std::sin(kPi / 3)));
        REQUIRE(close(fringe_visibility(kPi / 3, InputClass::unpolarized), 0.0));
    }
    SECTION("scan oracle") {
        for (double theta : {0.3, kPi / 3, kPi / 2, 2.9}) {
            const auto scan = oracles::scan_fringe([&](double phi) {
                const auto [input, unused] = spinor_basis(kPi / 2, 0.25);
                (void)unused;
                return detect_probabilities(InterferometerConfig(theta, phi), input).d_plus;
            });
            // Grid resolution bounds the scan, not kTol.
            REQUIRE(std::abs(scan.visibility() -
                             fringe_visibility(theta, InputClass::equatorial_pure)) < 1e-6);
        }
    }
}

TEST_CASE("config validation") {
    REQUIRE_THROWS_AS(InterferometerConfig(-0.2, 0.0), ValidationError);
    REQUIRE_THROWS_AS(InterferometerConfig(kPi + 1e-6, 0.0), ValidationError);
    const InterferometerConfig wrapped(1.0, -kPi);
    REQUIRE(wrapped.phi >= 0.0);
    REQUIRE(wrapped.phi < kTwoPi);
    REQUIRE(close(wrapped.phi, kPi));
}

TEST_CASE("config_toward inverts bloch_of") {
    oracles::Rng rng(1313);
    for (int i = 0; i < 1000; ++i) {
        const double theta = rng.polar(), phi = rng.azimuth();
        const InterferometerConfig round = config_toward(bloch_of(theta, phi));
        const BlochDirection back = bloch_of(round.theta, round.phi);
        const BlochDirection original = bloch_of(theta, phi);
        REQUIRE(close(dot(back, original), 1.0, 1e-9));
    }
}
