// runner.hpp
//
// Turns a validated ExperimentConfig into rows of numbers: exact
// probabilities, derived quantities, and (when shots > 0) empirical
// frequencies from the seeded sampler. Sweep rows are computed in parallel
// and always emitted in sweep order; identical config and seed give
// byte-identical CSV output.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "qeraser/epr.hpp"
#include "qeraser/experiment_config.hpp"
#include "qeraser/mwi.hpp"
#include "qeraser/scully_druhl.hpp"
#include "qeraser/shots.hpp"

namespace qeraser {

struct RunResult {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    bool stat_check_failed = false;

    // 0 on success, 3 when a sampled column drifted outside its 5-sigma
    // band (config errors never reach a RunResult; they exit with 2).
    int exit_code() const { return stat_check_failed ? 3 : 0; }
};

namespace detail {

// 17 significant digits: enough for double round-trips.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) body(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// |empirical - exact| must stay within 5 sigma of the binomial width.
// Documented flakiness budget: P(|z| > 5) ~ 6e-7 per checked cell.
inline bool within_band(double empirical, double exact, std::uint64_t n) {
    if (n == 0) return true;
    const double sigma = std::sqrt(std::max(exact * (1.0 - exact), 0.0) / static_cast<double>(n));
    return std::abs(empirical - exact) <= 5.0 * sigma + 1e-15;
}

struct RowCheck {
    std::vector<double>& row;
    bool ok = true;

    void push(double v) { row.push_back(v); }
    void push_checked(double empirical, double exact, std::uint64_t n) {
        row.push_back(empirical);
        ok = ok && within_band(empirical, exact, n);
    }
};

// Applies one sweep step to a copy of the config.
inline ExperimentConfig at_sweep_value(const ExperimentConfig& base, double value) {
    ExperimentConfig cfg = base;
    const std::string& p = base.sweep->parameter;
    if (p == "theta1") cfg.theta1 = value;
    else if (p == "phi1") cfg.phi1 = value;
    else if (p == "theta2") cfg.theta2 = value;
    else if (p == "phi2") cfg.phi2 = value;
    else if (p == "vartheta") cfg.vartheta = value;
    else if (p == "varphi") cfg.varphi = value;
    else if (p == "mu" || p == "delta") {
        if (std::holds_alternative<CustomSource>(cfg.source)) {
            SourceOverlap o = std::get<CustomSource>(cfg.source).overlap;
            cfg.source = CustomSource{p == "mu" ? SourceOverlap{value, o.delta}
                                                : SourceOverlap{o.mu, value}};
        } else {
            cfg.environment = p == "mu" ? SourceOverlap{value, cfg.environment.delta}
                                        : SourceOverlap{cfg.environment.mu, value};
        }
    }
    return cfg;
}

inline JointConfig joint_config_of(const ExperimentConfig& cfg) {
    return JointConfig{InterferometerConfig(cfg.theta1, cfg.phi1),
                       InterferometerConfig(cfg.theta2, cfg.phi2)};
}

// Sampled joint frequencies plus the two D'-conditioned D+ rates.
inline bool append_joint_empirics(std::vector<double>& row, const JointDistribution& dist,
                                  const JointConfig& jc, std::uint64_t shots,
                                  std::uint64_t stream) {
    const auto records = sample(dist, jc, shots, stream);
    const SubensembleCounts counts = accumulate(records);
    RowCheck check{row};
    const double n = static_cast<double>(counts.total);
    check.push_checked(counts.count(Outcome::d_plus, Outcome::d_plus) / n, dist.pp, counts.total);
    check.push_checked(counts.count(Outcome::d_plus, Outcome::d_minus) / n, dist.pm, counts.total);
    check.push_checked(counts.count(Outcome::d_minus, Outcome::d_plus) / n, dist.mp, counts.total);
    check.push_checked(counts.count(Outcome::d_minus, Outcome::d_minus) / n, dist.mm,
                       counts.total);
    for (Outcome idler : {Outcome::d_plus, Outcome::d_minus}) {
        const std::uint64_t denom = counts.idler_total(idler);
        const double exact_plus =
            (idler == Outcome::d_plus ? dist.pp / (dist.pp + dist.mp)
                                      : dist.pm / (dist.pm + dist.mm));
        if (denom == 0) {
            check.push(0.0);
        } else {
            check.push_checked(
                static_cast<double>(counts.count(Outcome::d_plus, idler)) / denom, exact_plus,
                denom);
        }
    }
    return check.ok;
}

struct RowBuilder {
    std::vector<std::string> header;
    // Fills one row; returns false when a sampled column failed its band.
    std::function<bool(const ExperimentConfig&, std::uint64_t stream, std::vector<double>&)> fill;
};

inline RowBuilder single_mzi_builder(bool sampled) {
    RowBuilder b;
    b.header = {"theta1", "phi1", "vartheta", "varphi", "p_dplus", "p_dminus"};
    if (sampled) {
        b.header.push_back("emp_dplus");
        b.header.push_back("emp_dminus");
    }
    b.fill = [sampled](const ExperimentConfig& cfg, std::uint64_t stream,
                       std::vector<double>& row) {
        const InterferometerConfig device(cfg.theta1, cfg.phi1);
        const auto [plus, minus] = spinor_basis(cfg.vartheta, cfg.varphi);
        (void)minus;
        const DetectionProbabilities p = detect_probabilities(device, plus);
        row.insert(row.end(), {cfg.theta1, cfg.phi1, cfg.vartheta, cfg.varphi, p.d_plus,
                               p.d_minus});
        if (!sampled) return true;
        const auto records = sample(p, device, cfg.shots, stream);
        std::uint64_t hits = 0;
        for (const auto& r : records) hits += r.signal == Outcome::d_plus;
        const double emp = static_cast<double>(hits) / static_cast<double>(cfg.shots);
        RowCheck check{row};
        check.push_checked(emp, p.d_plus, cfg.shots);
        check.push_checked(1.0 - emp, p.d_minus, cfg.shots);
        return check.ok;
    };
    return b;
}

inline RowBuilder eraser_builder(bool sampled) {
    RowBuilder b;
    b.header = {"theta1", "phi1", "theta2", "phi2",
                "p_pp",   "p_pm", "p_mp",   "p_mm",
                "p_dplus_given_idler_plus", "p_dminus_given_idler_plus",
                "p_dplus_given_idler_minus", "p_dminus_given_idler_minus", "correlator"};
    if (sampled)
        b.header.insert(b.header.end(),
                        {"emp_pp", "emp_pm", "emp_mp", "emp_mm", "emp_dplus_given_idler_plus",
                         "emp_dplus_given_idler_minus"});
    b.fill = [sampled](const ExperimentConfig& cfg, std::uint64_t stream,
                       std::vector<double>& row) {
        const JointConfig jc = joint_config_of(cfg);
        const JointDistribution dist = joint_distribution(jc);
        const ConditionalProbabilities cond = conditional_probabilities(jc);
        const double e = dist.pp + dist.mm - dist.pm - dist.mp;
        row.insert(row.end(), {cfg.theta1, cfg.phi1, cfg.theta2, cfg.phi2, dist.pp, dist.pm,
                               dist.mp, dist.mm, cond.given_idler_plus.d_plus,
                               cond.given_idler_plus.d_minus, cond.given_idler_minus.d_plus,
                               cond.given_idler_minus.d_minus, e});
        if (!sampled) return true;
        return append_joint_empirics(row, dist, jc, cfg.shots, stream);
    };
    return b;
}

inline RowBuilder scully_druhl_builder(const ExperimentConfig& base, bool sampled) {
    const bool idler_arm = std::holds_alternative<IdealIdler>(base.source);
    RowBuilder b;
    b.header = {"theta1", "phi1"};
    if (idler_arm) b.header.insert(b.header.end(), {"theta2", "phi2"});
    b.header.insert(b.header.end(),
                    {"mu_source", "delta_source", "distinguishability", "visibility",
                     "duality_sum", "p_dplus", "p_dminus"});
    if (idler_arm)
        b.header.insert(b.header.end(),
                        {"mu_env", "delta_env", "p_dplus_given_idler_plus",
                         "p_dminus_given_idler_plus", "p_dplus_given_idler_minus",
                         "p_dminus_given_idler_minus"});
    if (sampled) {
        if (idler_arm)
            b.header.insert(b.header.end(),
                            {"emp_pp", "emp_pm", "emp_mp", "emp_mm",
                             "emp_dplus_given_idler_plus", "emp_dplus_given_idler_minus"});
        else
            b.header.insert(b.header.end(), {"emp_dplus", "emp_dminus"});
    }
    b.fill = [idler_arm, sampled](const ExperimentConfig& cfg, std::uint64_t stream,
                                  std::vector<double>& row) {
        const SourceOverlap source_overlap = purity(cfg.source);
        const DualityTerms duality = duality_check(source_overlap, cfg.theta1);
        const DetectionProbabilities ensemble =
            ensemble_probabilities(source_overlap, cfg.theta1, cfg.phi1);
        row.insert(row.end(), {cfg.theta1, cfg.phi1});
        if (idler_arm) row.insert(row.end(), {cfg.theta2, cfg.phi2});
        row.insert(row.end(),
                   {source_overlap.mu, source_overlap.delta, distinguishability(source_overlap),
                    visibility(source_overlap, cfg.theta1), duality.sum, ensemble.d_plus,
                    ensemble.d_minus});
        if (idler_arm) {
            const JointConfig jc = joint_config_of(cfg);
            const ConditionalProbabilities cond = nonoptimal_conditionals(cfg.environment, jc);
            row.insert(row.end(),
                       {cfg.environment.mu, cfg.environment.delta, cond.given_idler_plus.d_plus,
                        cond.given_idler_plus.d_minus, cond.given_idler_minus.d_plus,
                        cond.given_idler_minus.d_minus});
            if (!sampled) return true;
            const JointDistribution dist(
                0.5 * cond.given_idler_plus.d_plus, 0.5 * cond.given_idler_minus.d_plus,
                0.5 * cond.given_idler_plus.d_minus, 0.5 * cond.given_idler_minus.d_minus);
            return append_joint_empirics(row, dist, jc, cfg.shots, stream);
        }
        if (!sampled) return true;
        const InterferometerConfig device(cfg.theta1, cfg.phi1);
        const auto records = sample(ensemble, device, cfg.shots, stream);
        std::uint64_t hits = 0;
        for (const auto& r : records) hits += r.signal == Outcome::d_plus;
        const double emp = static_cast<double>(hits) / static_cast<double>(cfg.shots);
        RowCheck check{row};
        check.push_checked(emp, ensemble.d_plus, cfg.shots);
        check.push_checked(1.0 - emp, ensemble.d_minus, cfg.shots);
        return check.ok;
    };
    return b;
}

inline RowBuilder mwi_check_builder() {
    RowBuilder b;
    b.header = {"theta1",    "phi1",      "theta2",    "phi2",
                "branch_pp", "branch_pm", "branch_mp", "branch_mm",
                "joint_pp",  "joint_pm",  "joint_mp",  "joint_mm",
                "max_abs_diff"};
    b.fill = [](const ExperimentConfig& cfg, std::uint64_t, std::vector<double>& row) {
        const JointConfig jc = joint_config_of(cfg);
        const BranchDistribution branches = branch_frequencies(evolve_universal(jc));
        const JointDistribution joint = joint_distribution(jc);
        const auto cells = joint.cells();
        double diff = 0.0;
        for (int i = 0; i < 4; ++i) diff = std::max(diff, std::abs(branches.p[i] - cells[i]));
        row.insert(row.end(), {cfg.theta1, cfg.phi1, cfg.theta2, cfg.phi2});
        row.insert(row.end(), branches.p.begin(), branches.p.end());
        row.insert(row.end(), cells.begin(), cells.end());
        row.push_back(diff);
        return true;
    };
    return b;
}

} // namespace detail

// Runs the experiment described by a validated config. Deterministic for a
// fixed (config, seed); sweep rows are computed in parallel but returned in
// sweep order.
inline RunResult run(const ExperimentConfig& cfg) {
    RunResult result;
    const bool sampled = cfg.shots > 0;

    if (cfg.experiment == Experiment::chsh) {
        if (!cfg.chsh) throw ValidationError("run: chsh experiment without directions");
        const auto& d = *cfg.chsh;
        result.header = {"e_ab", "e_ab_prime", "e_aprime_b", "e_aprime_bprime", "s"};
        if (sampled)
            result.header.insert(result.header.end(), {"emp_e_ab", "emp_e_ab_prime",
                                                       "emp_e_aprime_b", "emp_e_aprime_bprime",
                                                       "emp_s"});
        std::vector<double> row;
        const std::array<std::pair<const BlochDirection*, const BlochDirection*>, 4> settings{
            {{&d.a, &d.b}, {&d.a, &d.b_prime}, {&d.a_prime, &d.b}, {&d.a_prime, &d.b_prime}}};
        std::array<double, 4> exact{};
        for (int i = 0; i < 4; ++i)
            exact[i] = correlator(*settings[i].first, *settings[i].second);
        for (double e : exact) row.push_back(e);
        row.push_back(exact[0] - exact[1] + exact[2] + exact[3]);
        if (sampled) {
            bool ok = true;
            std::array<double, 4> empirical{};
            for (int i = 0; i < 4; ++i) {
                const JointConfig jc{config_toward(*settings[i].first),
                                     config_toward(*settings[i].second)};
                const JointDistribution dist = joint_distribution(jc);
                const auto records =
                    sample(dist, jc, cfg.shots, derive_stream(cfg.seed, static_cast<std::uint64_t>(i)));
                const SubensembleCounts counts = accumulate(records);
                const double n = static_cast<double>(counts.total);
                empirical[i] = (static_cast<double>(counts.count(Outcome::d_plus, Outcome::d_plus)) +
                                counts.count(Outcome::d_minus, Outcome::d_minus) -
                                counts.count(Outcome::d_plus, Outcome::d_minus) -
                                counts.count(Outcome::d_minus, Outcome::d_plus)) /
                               n;
                const double sigma =
                    std::sqrt(std::max(1.0 - exact[i] * exact[i], 0.0) / n);
                ok = ok && std::abs(empirical[i] - exact[i]) <= 5.0 * sigma + 1e-15;
                row.push_back(empirical[i]);
            }
            row.push_back(empirical[0] - empirical[1] + empirical[2] + empirical[3]);
            result.stat_check_failed = !ok;
        }
        result.rows.push_back(std::move(row));
        return result;
    }

    // Sweep values; a single exact/sampled evaluation is a 1-row "sweep".
    std::vector<ExperimentConfig> steps;
    if (cfg.sweep) {
        const SweepSpec& sw = *cfg.sweep;
        for (int k = 0; k < sw.steps; ++k) {
            const double value =
                sw.from + (sw.to - sw.from) * static_cast<double>(k) /
                              static_cast<double>(sw.steps - 1);
            steps.push_back(detail::at_sweep_value(cfg, value));
        }
    } else if (cfg.experiment == Experiment::mwi_check) {
        // No sweep given: spot-check 100 seeded random configurations.
        for (int k = 0; k < 100; ++k) {
            ExperimentConfig random_cfg = cfg;
            const std::uint64_t stream = derive_stream(cfg.seed, 0x3c0ff1e5ull + k);
            random_cfg.theta1 = kPi * uniform_unit(stream, 0);
            random_cfg.phi1 = kTwoPi * uniform_unit(stream, 1);
            random_cfg.theta2 = kPi * uniform_unit(stream, 2);
            random_cfg.phi2 = kTwoPi * uniform_unit(stream, 3);
            steps.push_back(random_cfg);
        }
    } else {
        steps.push_back(cfg);
    }

    detail::RowBuilder builder;
    switch (cfg.experiment) {
    case Experiment::single_mzi: builder = detail::single_mzi_builder(sampled); break;
    case Experiment::entanglement_eraser:
    case Experiment::epr_bohm: builder = detail::eraser_builder(sampled); break;
    case Experiment::scully_druhl: builder = detail::scully_druhl_builder(cfg, sampled); break;
    case Experiment::mwi_check: builder = detail::mwi_check_builder(); break;
    case Experiment::chsh: break; // handled above
    }

    result.header = builder.header;
    result.rows.assign(steps.size(), {});
    std::vector<char> ok(steps.size(), 1);
    detail::parallel_for(steps.size(), [&](std::size_t i) {
        ok[i] = builder.fill(steps[i], derive_stream(cfg.seed, i), result.rows[i]);
    });
    for (char c : ok) result.stat_check_failed = result.stat_check_failed || !c;
    return result;
}

// CSV with one header row; floating point serialized to 17 significant
// digits so a re-parse reproduces the numbers exactly.
inline void write_csv(std::ostream& out, const RunResult& result, bool include_timestamp) {
    if (include_timestamp) {
        const std::time_t now = std::time(nullptr);
        char stamp[64];
        std::tm tm_utc{};
        gmtime_r(&now, &tm_utc);
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        out << "# generated " << stamp << "\n";
    }
    for (std::size_t c = 0; c < result.header.size(); ++c)
        out << (c ? "," : "") << result.header[c];
    out << "\n";
    for (const auto& row : result.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << detail::format_double(row[c]);
        out << "\n";
    }
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!have_header) {
            table.header = fields;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(std::strtod(f.c_str(), nullptr));
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace qeraser
