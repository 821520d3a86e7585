// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Every tolerance is pinned here, in code. Statistical criteria use fixed
// seeds; their bands are stated in binomial sigma units.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "oracles.hpp"
#include "qeraser/epr.hpp"
#include "qeraser/mwi.hpp"
#include "qeraser/scully_druhl.hpp"
#include "qeraser/shots.hpp"

using namespace qeraser;

namespace {

int failures = 0;

void criterion(int number, const char* description, double budget_seconds,
               const std::function<bool()>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body();
    } catch (const std::exception& e) {
        std::printf("[FAIL] criterion %d: %s -- exception: %s\n", number, description, e.what());
        ++failures;
        return;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_seconds > 0.0 && elapsed > budget_seconds) {
        std::printf("[FAIL] criterion %d: %s -- exceeded %.0f s budget (%.2f s)\n", number,
                    description, budget_seconds, elapsed);
        ++failures;
        return;
    }
    std::printf("[%s] criterion %d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", number, description,
                elapsed);
    if (!ok) ++failures;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

} // namespace

int main() {
    criterion(1, "inner-product identity on 1e4 random quadruples, 1e-12", 1.0, [] {
        oracles::Rng rng(1001);
        for (int i = 0; i < 10000; ++i) {
            const double t1 = rng.polar(), p1 = rng.azimuth();
            const double t2 = rng.polar(), p2 = rng.azimuth();
            const auto [plus1, minus1] = spinor_basis(t1, p1);
            const auto [plus2, minus2] = spinor_basis(t2, p2);
            (void)minus2;
            const double c = dot(bloch_of(t1, p1), bloch_of(t2, p2));
            if (!close(std::norm(inner(plus1, plus2)), 0.5 * (1.0 + c), 1e-12)) return false;
            if (!close(std::norm(inner(minus1, plus2)), 0.5 * (1.0 - c), 1e-12)) return false;
        }
        return true;
    });

    criterion(2, "erasure fringe: exact 64-point sweep 1e-12, sampled within 4 sigma", 10.0, [] {
        const double phi2 = 0.0;
        for (int k = 0; k < 64; ++k) {
            const double phi1 = kTwoPi * k / 64;
            const JointConfig jc{InterferometerConfig(kPi / 2, phi1),
                                 InterferometerConfig(kPi / 2, phi2)};
            const double exact = 0.5 * (1.0 - std::cos(phi1 - phi2));
            const ConditionalProbabilities cond = conditional_probabilities(jc);
            if (!close(cond.given_idler_plus.d_plus, exact, 1e-12)) return false;

            const auto records = sample(joint_distribution(jc), jc, 10000,
                                        derive_stream(20240208u, k));
            const SubensembleCounts counts = accumulate(records);
            const std::uint64_t conditioned = counts.idler_total(Outcome::d_plus);
            if (conditioned == 0) return false;
            const double empirical =
                static_cast<double>(counts.count(Outcome::d_plus, Outcome::d_plus)) /
                static_cast<double>(conditioned);
            const double sigma =
                std::sqrt(exact * (1.0 - exact) / static_cast<double>(conditioned));
            if (std::abs(empirical - exact) > 4.0 * sigma + 1e-15) return false;
        }
        return true;
    });

    criterion(3, "which-way marking: theta2 = 0, theta1 = pi/3 gives P(D+|D'+) = 1/4", 0.0, [] {
        const JointConfig jc{InterferometerConfig(kPi / 3, 0.8), InterferometerConfig(0.0, 0.0)};
        const double from_epr = conditional_probabilities(jc).given_idler_plus.d_plus;
        const double from_pipeline = optimal_conditionals(jc).given_idler_plus.d_plus;
        return close(from_epr, 0.25, 1e-12) && close(from_pipeline, 0.25, 1e-12);
    });

    criterion(4, "duality inequality on a 100x100 grid, equality exactly on the boundary", 0.0, [] {
        for (int i = 0; i < 100; ++i)
            for (int k = 0; k < 100; ++k) {
                const double mu = i / 99.0;
                const double theta1 = kPi * (k / 99.0);
                const double sum = duality_check(SourceOverlap{mu, 0.0}, theta1).sum;
                if (sum > 1.0 + 1e-12) return false;
                const bool boundary =
                    mu == 0.0 || (mu == 1.0 && close(std::abs(std::sin(theta1)), 1.0, 1e-12));
                if (boundary != close(sum, 1.0, 1e-12)) return false;
            }
        // Boundary point the grid misses: mu = 1 with a symmetric splitter.
        return close(duality_check(SourceOverlap{1.0, 0.0}, kPi / 2).sum, 1.0, 1e-12);
    });

    criterion(5, "UQSD POVM invariants and conclusive rate on 1e4 random pairs, 1e-12", 0.0, [] {
        oracles::Rng rng(1005);
        for (int i = 0; i < 10000; ++i) {
            const PureState2 psi1 = rng.spinor();
            const PureState2 psi2 = rng.spinor();
            DiscriminationPOVM povm = uqsd_build(psi1, psi2); // ctor checks the invariants
            const double expected_conclusive = 1.0 - std::abs(inner(psi1, psi2));
            if (!close(conclusive_probability(povm), expected_conclusive, 1e-12)) return false;
            const OutcomeDistribution d1 = uqsd_outcome_distribution(povm, PreparedState::psi1);
            const OutcomeDistribution d2 = uqsd_outcome_distribution(povm, PreparedState::psi2);
            if (std::abs(d1.p_2) > 1e-12 || std::abs(d2.p_1) > 1e-12) return false;
            if (!close(d1.p_1, expected_conclusive, 1e-12)) return false;
        }
        return true;
    });

    criterion(6, "nonoptimal erasure matches the 8-dim oracle (1e-10); mu = 1 is optimal", 0.0, [] {
        oracles::Rng rng(1006);
        for (int i = 0; i < 1000; ++i) {
            const SourceOverlap overlap{rng.in(0.0, 1.0), rng.azimuth()};
            const JointConfig jc = rng.joint();
            const ConditionalProbabilities cond = nonoptimal_conditionals(overlap, jc);
            const oracles::EnvOracleResult brute = oracles::env_oracle(overlap, jc);
            if (!close(brute.idler_marginal[0], 0.5, 1e-10)) return false;
            if (!close(cond.given_idler_plus.d_plus, brute.conditional[0][0], 1e-10) ||
                !close(cond.given_idler_plus.d_minus, brute.conditional[1][0], 1e-10) ||
                !close(cond.given_idler_minus.d_plus, brute.conditional[0][1], 1e-10) ||
                !close(cond.given_idler_minus.d_minus, brute.conditional[1][1], 1e-10))
                return false;
        }
        for (int i = 0; i < 1000; ++i) {
            const JointConfig jc = rng.joint();
            const ConditionalProbabilities reduced =
                nonoptimal_conditionals(SourceOverlap{1.0, 0.0}, jc);
            const ConditionalProbabilities optimal = conditional_probabilities(jc);
            if (!close(reduced.given_idler_plus.d_plus, optimal.given_idler_plus.d_plus, 1e-12) ||
                !close(reduced.given_idler_minus.d_plus, optimal.given_idler_minus.d_plus, 1e-12))
                return false;
        }
        return true;
    });

    criterion(7, "many-worlds branch frequencies equal the joint distribution on 1e4 configs",
              5.0, [] {
                  oracles::Rng rng(1007);
                  for (int i = 0; i < 10000; ++i) {
                      const JointConfig jc = rng.joint();
                      const BranchDistribution b = branch_frequencies(evolve_universal(jc));
                      const auto cells = joint_distribution(jc).cells();
                      for (int k = 0; k < 4; ++k)
                          if (!close(b.p[k], cells[k], 1e-12)) return false;
                  }
                  return true;
              });

    criterion(8, "CHSH: S = 2 sqrt(2) at the optimum, never above, and violated somewhere", 0.0, [] {
        const double bound = 2.0 * std::sqrt(2.0);
        const auto coplanar = [](double deg) {
            const double rad = deg * kPi / 180.0;
            return BlochDirection(std::sin(rad), 0.0, std::cos(rad));
        };
        const double s_optimal = chsh_s(coplanar(0), coplanar(90), coplanar(225), coplanar(315));
        if (!close(s_optimal, bound, 1e-9)) return false;
        if (!close(std::abs(chsh_s(coplanar(0), coplanar(90), coplanar(45), coplanar(135))),
                   bound, 1e-9))
            return false;

        oracles::Rng rng(1008);
        double sampled_max = std::abs(s_optimal); // include the known optimum
        bool violated = false;
        for (int i = 0; i < 100000; ++i) {
            const double s = std::abs(
                chsh_s(rng.direction(), rng.direction(), rng.direction(), rng.direction()));
            if (s > bound + 1e-9) return false;
            sampled_max = std::max(sampled_max, s);
            violated = violated || s > 2.0;
        }
        return violated && sampled_max >= bound - 1e-3 && sampled_max <= bound + 1e-9;
    });

    criterion(9, "no-signaling: both marginals are 1/2 on 1e4 random joint configs, 1e-12", 0.0,
              [] {
                  oracles::Rng rng(1009);
                  for (int i = 0; i < 10000; ++i) {
                      const JointDistribution j = joint_distribution(rng.joint());
                      if (!close(j.signal_plus_marginal(), 0.5, 1e-12)) return false;
                      if (!close(j.idler_plus_marginal(), 0.5, 1e-12)) return false;
                  }
                  return true;
              });

    if (failures == 0) std::printf("all acceptance criteria passed\n");
    else std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
