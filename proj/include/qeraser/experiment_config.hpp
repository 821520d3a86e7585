// experiment_config.hpp
//
// JSON experiment configuration: schema, defaults, and validation. Parsing
// reports every violation it can find, not just the first, so a config can
// be fixed in one pass. Angles are radians only.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qeraser/interferometer.hpp"
#include "qeraser/scully_druhl.hpp"

namespace qeraser {

class ConfigError : public std::runtime_error {
public:
    std::vector<std::string> violations;

    explicit ConfigError(std::vector<std::string> v)
        : std::runtime_error(join(v)), violations(std::move(v)) {}

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid configuration:";
        for (const auto& s : v) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }
};

enum class Experiment { single_mzi, entanglement_eraser, epr_bohm, scully_druhl, mwi_check, chsh };

struct SweepSpec {
    std::string parameter;
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
};

struct ChshDirections {
    BlochDirection a;
    BlochDirection a_prime;
    BlochDirection b;
    BlochDirection b_prime;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::single_mzi;
    double theta1 = 0.0, phi1 = 0.0;
    double theta2 = 0.0, phi2 = 0.0;
    double vartheta = 0.0, varphi = 0.0; // single-mzi input polarization
    SourceModel source = IdealIdler{};
    SourceOverlap environment{1.0, 0.0}; // record-state overlap for ideal-idler erasure
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::optional<SweepSpec> sweep;
    std::optional<ChshDirections> chsh;

    bool has_idler_arm() const {
        return experiment == Experiment::entanglement_eraser || experiment == Experiment::epr_bohm ||
               experiment == Experiment::mwi_check ||
               (experiment == Experiment::scully_druhl &&
                std::holds_alternative<IdealIdler>(source));
    }
};

namespace detail {

inline bool key_in(const std::string& key, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
        if (key == k) return true;
    return false;
}

inline std::string degrees_hint(double value) {
    if (std::abs(value) > kTwoPi && std::abs(value) <= 360.0)
        return " (value looks like degrees; angles are accepted in radians only)";
    return "";
}

struct ConfigReader {
    const nlohmann::json& j;
    std::vector<std::string>& violations;

    bool has(const char* key) const { return j.contains(key); }

    double number(const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(key);
        if (!v.is_number()) {
            violations.push_back(std::string(key) + ": expected a number");
            return fallback;
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            violations.push_back(std::string(key) + ": must be finite");
            return fallback;
        }
        return d;
    }

    // Polar angle in [0, pi]; reports the legal range (and a degrees hint
    // when the value looks like one).
    double polar_angle(const char* key, double fallback) {
        const double d = number(key, fallback);
        if (d < 0.0 || d > kPi) {
            violations.push_back(std::string(key) + " = " + std::to_string(d) +
                                 ": legal range is [0, pi] radians" + degrees_hint(d));
            return fallback;
        }
        return d;
    }

    // Azimuthal angle; any finite value, reduced mod 2 pi downstream.
    double azimuth(const char* key, double fallback) { return number(key, fallback); }

    std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(key);
        if (!v.is_number_integer() ||
            (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            violations.push_back(std::string(key) + ": expected a nonnegative integer");
            return fallback;
        }
        return v.get<std::uint64_t>();
    }
};

inline std::optional<Experiment> experiment_from(const std::string& name) {
    if (name == "single-mzi") return Experiment::single_mzi;
    if (name == "entanglement-eraser") return Experiment::entanglement_eraser;
    if (name == "epr-bohm") return Experiment::epr_bohm;
    if (name == "scully-druhl") return Experiment::scully_druhl;
    if (name == "mwi-check") return Experiment::mwi_check;
    if (name == "chsh") return Experiment::chsh;
    return std::nullopt;
}

inline const char* experiment_name(Experiment e) {
    switch (e) {
    case Experiment::single_mzi: return "single-mzi";
    case Experiment::entanglement_eraser: return "entanglement-eraser";
    case Experiment::epr_bohm: return "epr-bohm";
    case Experiment::scully_druhl: return "scully-druhl";
    case Experiment::mwi_check: return "mwi-check";
    case Experiment::chsh: return "chsh";
    }
    return "?";
}

inline std::optional<BlochDirection> read_direction(const nlohmann::json& j, const char* key,
                                                    std::vector<std::string>& violations) {
    if (!j.contains(key)) {
        violations.push_back(std::string(key) + ": required for chsh (unit 3-vector [x, y, z])");
        return std::nullopt;
    }
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
        violations.push_back(std::string(key) + ": expected an array of 3 numbers");
        return std::nullopt;
    }
    const double x = v[0].get<double>(), y = v[1].get<double>(), z = v[2].get<double>();
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
        violations.push_back(std::string(key) + ": norm deviates from 1 by more than 1e-6");
        return std::nullopt;
    }
    return BlochDirection::normalized(x, y, z);
}

inline std::optional<Amplitude> read_complex(const nlohmann::json& v, const char* key,
                                             std::vector<std::string>& violations) {
    if (v.is_number()) return Amplitude{v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return Amplitude{v[0].get<double>(), v[1].get<double>()};
    violations.push_back(std::string(key) + ": expected a number or [re, im]");
    return std::nullopt;
}

// Reads "source" for scully-druhl. Returns the model plus the optional
// record-state overlap ("environment") used by the ideal-idler eraser.
inline void read_source(const nlohmann::json& src, ExperimentConfig& cfg,
                        std::vector<std::string>& violations) {
    if (!src.is_object() || !src.contains("variant") || !src.at("variant").is_string()) {
        violations.push_back("source: expected an object with a string \"variant\"");
        return;
    }
    const std::string variant = src.at("variant").get<std::string>();
    auto check_keys = [&](std::initializer_list<const char*> allowed) {
        for (const auto& item : src.items())
            if (!key_in(item.key(), allowed))
                violations.push_back("source." + item.key() + ": unknown key for variant \"" +
                                     variant + "\"");
    };
    auto read_overlap = [&](const nlohmann::json& node, const std::string& prefix,
                            bool allow_variant_key) -> std::optional<SourceOverlap> {
        if (!node.is_object() || !node.contains("mu") || !node.at("mu").is_number()) {
            violations.push_back(prefix + ": expected an object with numeric \"mu\"");
            return std::nullopt;
        }
        const double mu = node.at("mu").get<double>();
        double delta = 0.0;
        if (node.contains("delta")) {
            if (!node.at("delta").is_number()) {
                violations.push_back(prefix + ".delta: expected a number");
                return std::nullopt;
            }
            delta = node.at("delta").get<double>();
        }
        for (const auto& item : node.items())
            if (!key_in(item.key(), {"mu", "delta"}) &&
                !(allow_variant_key && item.key() == "variant"))
                violations.push_back(prefix + "." + item.key() + ": unknown key");
        if (!std::isfinite(mu) || mu < 0.0 || mu > 1.0) {
            violations.push_back(prefix + ".mu = " + std::to_string(mu) +
                                 ": legal range is [0, 1]");
            return std::nullopt;
        }
        if (!std::isfinite(delta)) {
            violations.push_back(prefix + ".delta: must be finite");
            return std::nullopt;
        }
        return SourceOverlap{mu, delta};
    };

    if (variant == "identical") {
        check_keys({"variant"});
        cfg.source = IdenticalEmitters{};
    } else if (variant == "orthogonal") {
        check_keys({"variant"});
        cfg.source = OrthogonalRecorders{};
    } else if (variant == "ideal-idler") {
        check_keys({"variant", "environment"});
        cfg.source = IdealIdler{};
        if (src.contains("environment")) {
            if (auto env = read_overlap(src.at("environment"), "source.environment", false))
                cfg.environment = *env;
        }
    } else if (variant == "spacs") {
        check_keys({"variant", "alpha1", "alpha2"});
        if (!src.contains("alpha1") || !src.contains("alpha2")) {
            violations.push_back("source: spacs requires \"alpha1\" and \"alpha2\"");
            return;
        }
        const auto a1 = read_complex(src.at("alpha1"), "source.alpha1", violations);
        const auto a2 = read_complex(src.at("alpha2"), "source.alpha2", violations);
        if (a1 && a2) cfg.source = Spacs{*a1, *a2};
    } else if (variant == "custom") {
        check_keys({"variant", "mu", "delta"});
        if (auto overlap = read_overlap(src, "source", true)) cfg.source = CustomSource{*overlap};
    } else {
        violations.push_back("source.variant: unknown variant \"" + variant +
                             "\" (expected identical | orthogonal | ideal-idler | spacs | custom)");
    }
}

} // namespace detail

// Parses and validates a JSON experiment configuration. Throws ConfigError
// carrying every violation found.
inline ExperimentConfig parse_config(std::string_view text) {
    std::vector<std::string> violations;

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    if (!j.is_object()) throw ConfigError({"top level must be a JSON object"});

    ExperimentConfig cfg;

    if (!j.contains("experiment") || !j.at("experiment").is_string())
        throw ConfigError({"\"experiment\" is required and must be a string"});
    const std::string name = j.at("experiment").get<std::string>();
    const auto experiment = detail::experiment_from(name);
    if (!experiment)
        throw ConfigError({"experiment: unknown experiment \"" + name +
                           "\" (expected single-mzi | entanglement-eraser | epr-bohm | "
                           "scully-druhl | mwi-check | chsh)"});
    cfg.experiment = *experiment;

    // Per-experiment key allowlist; unknown keys are named individually.
    std::vector<const char*> allowed = {"experiment", "shots", "seed", "sweep"};
    std::vector<const char*> sweepable;
    switch (cfg.experiment) {
    case Experiment::single_mzi:
        allowed.insert(allowed.end(), {"theta1", "phi1", "vartheta", "varphi"});
        sweepable = {"theta1", "phi1", "vartheta", "varphi"};
        break;
    case Experiment::entanglement_eraser:
    case Experiment::epr_bohm:
    case Experiment::mwi_check:
        allowed.insert(allowed.end(), {"theta1", "phi1", "theta2", "phi2"});
        sweepable = {"theta1", "phi1", "theta2", "phi2"};
        break;
    case Experiment::scully_druhl:
        allowed.insert(allowed.end(), {"theta1", "phi1", "theta2", "phi2", "source"});
        sweepable = {"theta1", "phi1", "theta2", "phi2", "mu", "delta"};
        break;
    case Experiment::chsh:
        allowed.insert(allowed.end(), {"a", "a_prime", "b", "b_prime"});
        sweepable = {};
        break;
    }
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known)
            violations.push_back("unknown key \"" + item.key() + "\" for experiment " +
                                 detail::experiment_name(cfg.experiment));
    }

    detail::ConfigReader reader{j, violations};
    cfg.theta1 = reader.polar_angle("theta1", 0.0);
    cfg.phi1 = reader.azimuth("phi1", 0.0);
    cfg.theta2 = reader.polar_angle("theta2", 0.0);
    cfg.phi2 = reader.azimuth("phi2", 0.0);
    cfg.vartheta = reader.polar_angle("vartheta", 0.0);
    cfg.varphi = reader.azimuth("varphi", 0.0);
    cfg.shots = reader.unsigned_integer("shots", 0);
    cfg.seed = reader.unsigned_integer("seed", 0);

    if (cfg.experiment == Experiment::scully_druhl && j.contains("source"))
        detail::read_source(j.at("source"), cfg, violations);

    if (cfg.experiment == Experiment::chsh) {
        const auto a = detail::read_direction(j, "a", violations);
        const auto ap = detail::read_direction(j, "a_prime", violations);
        const auto b = detail::read_direction(j, "b", violations);
        const auto bp = detail::read_direction(j, "b_prime", violations);
        if (a && ap && b && bp) cfg.chsh = ChshDirections{*a, *ap, *b, *bp};
    }

    if (j.contains("sweep")) {
        const auto& sw = j.at("sweep");
        if (!sw.is_object()) {
            violations.push_back("sweep: expected an object");
        } else {
            SweepSpec spec;
            for (const auto& item : sw.items())
                if (!detail::key_in(item.key(), {"parameter", "from", "to", "steps"}))
                    violations.push_back("sweep." + item.key() + ": unknown key");
            if (!sw.contains("parameter") || !sw.at("parameter").is_string()) {
                violations.push_back("sweep.parameter: required string");
            } else {
                spec.parameter = sw.at("parameter").get<std::string>();
                bool ok = false;
                for (const char* p : sweepable) ok = ok || spec.parameter == p;
                if (!ok)
                    violations.push_back("sweep.parameter: \"" + spec.parameter +
                                         "\" does not exist for experiment " +
                                         detail::experiment_name(cfg.experiment));
                if ((spec.parameter == "mu" || spec.parameter == "delta") &&
                    cfg.experiment == Experiment::scully_druhl &&
                    !std::holds_alternative<IdealIdler>(cfg.source) &&
                    !std::holds_alternative<CustomSource>(cfg.source))
                    violations.push_back("sweep.parameter: \"" + spec.parameter +
                                         "\" requires an ideal-idler or custom source");
            }
            detail::ConfigReader sweep_reader{sw, violations};
            spec.from = sweep_reader.number("from", 0.0);
            spec.to = sweep_reader.number("to", 0.0);
            if (!sw.contains("steps") || !sw.at("steps").is_number_integer()) {
                violations.push_back("sweep.steps: required integer >= 2");
            } else {
                spec.steps = sw.at("steps").get<int>();
                if (spec.steps < 2) violations.push_back("sweep.steps: must be at least 2");
            }
            const bool polar = spec.parameter == "theta1" || spec.parameter == "theta2" ||
                               spec.parameter == "vartheta";
            if (polar) {
                for (double v : {spec.from, spec.to})
                    if (v < 0.0 || v > kPi)
                        violations.push_back("sweep range " + std::to_string(v) + " for " +
                                             spec.parameter + ": legal range is [0, pi] radians" +
                                             detail::degrees_hint(v));
            }
            if (spec.parameter == "mu") {
                for (double v : {spec.from, spec.to})
                    if (v < 0.0 || v > 1.0)
                        violations.push_back("sweep range " + std::to_string(v) +
                                             " for mu: legal range is [0, 1]");
            }
            cfg.sweep = spec;
        }
        if (cfg.experiment == Experiment::chsh)
            violations.push_back("sweep: not supported for the chsh experiment");
    }

    if (!violations.empty()) throw ConfigError(std::move(violations));
    return cfg;
}

} // namespace qeraser
