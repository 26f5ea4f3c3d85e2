#pragma once

// JSON run configuration: one "model" block plus optional "sim", "oracle",
// "sweep" blocks and output settings. Unknown keys are rejected with the path
// of the offending field.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "retrial/ctmc_oracle.hpp"
#include "retrial/distributions.hpp"
#include "retrial/errors.hpp"
#include "retrial/model.hpp"
#include "retrial/simulator.hpp"

namespace retrial::cli {

using json = nlohmann::json;

enum class Engine { analytic, simulate, oracle };

inline const char* engine_name(Engine e) {
    switch (e) {
        case Engine::analytic: return "analytic";
        case Engine::simulate: return "simulate";
        case Engine::oracle: return "oracle";
    }
    return "?";
}

/// Accepts "a"/"analytic", "s"/"sim"/"simulate", "o"/"oracle".
inline Engine parse_engine(const std::string& s, const std::string& path) {
    if (s == "a" || s == "analytic") return Engine::analytic;
    if (s == "s" || s == "sim" || s == "simulate") return Engine::simulate;
    if (s == "o" || s == "oracle") return Engine::oracle;
    throw ConfigError(path, "unknown engine '" + s + "' (expected analytic, simulate or oracle)");
}

/// Comma-separated engine list, e.g. "a,s,o". Order is preserved, duplicates dropped.
inline std::vector<Engine> parse_engine_list(const std::string& s) {
    std::vector<Engine> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) {
            const Engine e = parse_engine(item, "--engines");
            if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("--engines", "no engines given");
    return out;
}

inline const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names = {"lambda", "alpha", "nu", "beta1",
                                                   "beta2", "mu11", "gamma11"};
    return names;
}

struct SweepSpec {
    std::string param;
    std::vector<double> values;
    std::vector<Engine> engines{Engine::analytic};
};

struct RunConfig {
    ModelParams model;
    std::optional<sim::SimConfig> sim;
    ctmc::OracleOptions oracle;
    std::optional<SweepSpec> sweep;
    std::string format = "csv";
    std::string output;  ///< empty: standard output
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* a : allowed) known = known || it.key() == a;
        if (!known) throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
}

inline const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    return j;
}

inline double number(const json& obj, const char* key, const std::string& path) {
    const std::string field = path + "." + key;
    if (!obj.contains(key)) throw ConfigError(field, "required field missing");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    return v.get<double>();
}

inline double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
    return obj.contains(key) ? number(obj, key, path) : fallback;
}

inline std::uint64_t seed_value(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    throw ConfigError(path, "expected a non-negative integer");
}

template <class F>
auto wrap(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace detail

inline Distribution parse_distribution(const json& j, const std::string& path) {
    detail::require_object(j, path);
    if (!j.contains("kind") || !j.at("kind").is_string()) {
        throw ConfigError(path + ".kind", "required string field missing (exp, erlang2 or hyperexp)");
    }
    const std::string kind = j.at("kind").get<std::string>();
    return detail::wrap(path, [&]() -> Distribution {
        if (kind == "exp") {
            detail::reject_unknown(j, path, {"kind", "rate"});
            return Distribution::exponential(detail::number(j, "rate", path));
        }
        if (kind == "erlang2") {
            detail::reject_unknown(j, path, {"kind", "rate"});
            return Distribution::erlang2(detail::number(j, "rate", path));
        }
        if (kind == "hyperexp") {
            detail::reject_unknown(j, path, {"kind", "a", "rate1", "rate2"});
            return Distribution::hyperexponential(detail::number(j, "a", path),
                                                  detail::number(j, "rate1", path),
                                                  detail::number(j, "rate2", path));
        }
        throw ConfigError(path + ".kind", "unknown distribution kind '" + kind + "'");
    });
}

inline json distribution_to_json(const Distribution& d) {
    return std::visit(
        [](const auto& law) -> json {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return {{"kind", "exp"}, {"rate", law.rate}};
            } else if constexpr (std::is_same_v<T, Erlang2>) {
                return {{"kind", "erlang2"}, {"rate", law.rate}};
            } else {
                return {{"kind", "hyperexp"}, {"a", law.weight}, {"rate1", law.rate1}, {"rate2", law.rate2}};
            }
        },
        d.law());
}

inline ModelParams parse_model(const json& j) {
    const std::string path = "model";
    detail::require_object(j, path);
    detail::reject_unknown(j, path, {"lambda", "alpha", "nu", "beta1", "beta2", "service1",
                                     "service2", "repair1", "repair2"});
    ModelParams p;
    p.lambda = detail::number(j, "lambda", path);
    p.alpha = detail::number_or(j, "alpha", path, 0.0);
    p.nu = detail::number_or(j, "nu", path, 1.0);
    p.beta1 = detail::number_or(j, "beta1", path, 0.0);
    p.beta2 = detail::number_or(j, "beta2", path, 0.0);
    for (const char* key : {"service1", "service2", "repair1", "repair2"}) {
        if (!j.contains(key)) throw ConfigError(path + "." + key, "required field missing");
    }
    p.service1 = parse_distribution(j.at("service1"), path + ".service1");
    p.service2 = parse_distribution(j.at("service2"), path + ".service2");
    p.repair1 = parse_distribution(j.at("repair1"), path + ".repair1");
    p.repair2 = parse_distribution(j.at("repair2"), path + ".repair2");
    detail::wrap(path, [&] {
        p.validate();
        return 0;
    });
    return p;
}

inline json model_to_json(const ModelParams& p) {
    return {{"lambda", p.lambda},
            {"alpha", p.alpha},
            {"nu", p.nu},
            {"beta1", p.beta1},
            {"beta2", p.beta2},
            {"service1", distribution_to_json(p.service1)},
            {"service2", distribution_to_json(p.service2)},
            {"repair1", distribution_to_json(p.repair1)},
            {"repair2", distribution_to_json(p.repair2)}};
}

inline sim::SimConfig parse_sim(const json& j) {
    const std::string path = "sim";
    detail::require_object(j, path);
    detail::reject_unknown(j, path, {"warmup", "horizon", "replications", "seed", "confidence"});
    sim::SimConfig c;
    c.horizon = detail::number_or(j, "horizon", path, c.horizon);
    c.warmup = detail::number_or(j, "warmup", path, c.warmup);
    if (j.contains("replications")) {
        if (!j.at("replications").is_number_integer()) {
            throw ConfigError(path + ".replications", "expected an integer");
        }
        c.replications = j.at("replications").get<int>();
    }
    if (j.contains("seed")) c.seed = detail::seed_value(j.at("seed"), path + ".seed");
    c.confidence = detail::number_or(j, "confidence", path, c.confidence);
    c.validate();
    return c;
}

inline ctmc::OracleOptions parse_oracle(const json& j) {
    const std::string path = "oracle";
    detail::require_object(j, path);
    detail::reject_unknown(j, path, {"n_max", "max_n_max", "tol"});
    ctmc::OracleOptions o;
    if (j.contains("n_max")) {
        if (!j.at("n_max").is_number_integer() || j.at("n_max").get<int>() < 1) {
            throw ConfigError(path + ".n_max", "expected a positive integer");
        }
        o.initial_n_max = j.at("n_max").get<int>();
    }
    if (j.contains("max_n_max")) {
        if (!j.at("max_n_max").is_number_integer()) throw ConfigError(path + ".max_n_max", "expected an integer");
        o.max_n_max = j.at("max_n_max").get<int>();
    }
    o.tol = detail::number_or(j, "tol", path, o.tol);
    if (!(o.tol > 0.0)) throw ConfigError(path + ".tol", "must be > 0");
    return o;
}

inline SweepSpec parse_sweep(const json& j) {
    const std::string path = "sweep";
    detail::require_object(j, path);
    detail::reject_unknown(j, path, {"param", "values", "engines"});
    SweepSpec s;
    if (!j.contains("param") || !j.at("param").is_string()) {
        throw ConfigError(path + ".param", "required string field missing");
    }
    s.param = j.at("param").get<std::string>();
    const auto& names = sweep_parameters();
    if (std::find(names.begin(), names.end(), s.param) == names.end()) {
        throw ConfigError(path + ".param", "unknown sweep parameter '" + s.param + "'");
    }
    if (!j.contains("values") || !j.at("values").is_array()) {
        throw ConfigError(path + ".values", "required array field missing");
    }
    for (std::size_t i = 0; i < j.at("values").size(); ++i) {
        const json& v = j.at("values").at(i);
        if (!v.is_number()) throw ConfigError(path + ".values[" + std::to_string(i) + "]", "expected a number");
        s.values.push_back(v.get<double>());
    }
    if (j.contains("engines")) {
        if (!j.at("engines").is_array()) throw ConfigError(path + ".engines", "expected an array");
        s.engines.clear();
        for (std::size_t i = 0; i < j.at("engines").size(); ++i) {
            const std::string ep = path + ".engines[" + std::to_string(i) + "]";
            if (!j.at("engines").at(i).is_string()) throw ConfigError(ep, "expected a string");
            const Engine e = parse_engine(j.at("engines").at(i).get<std::string>(), ep);
            if (std::find(s.engines.begin(), s.engines.end(), e) == s.engines.end()) s.engines.push_back(e);
        }
    }
    return s;
}

inline void check_format(const std::string& f, const std::string& path) {
    if (f != "csv" && f != "json") throw ConfigError(path, "format must be csv or json");
}

inline RunConfig parse_config(const json& root) {
    detail::require_object(root, "");
    detail::reject_unknown(root, "", {"model", "sim", "oracle", "sweep", "format", "output"});
    if (!root.contains("model")) throw ConfigError("model", "required block missing");
    RunConfig cfg;
    cfg.model = parse_model(root.at("model"));
    if (root.contains("sim")) cfg.sim = parse_sim(root.at("sim"));
    if (root.contains("oracle")) cfg.oracle = parse_oracle(root.at("oracle"));
    if (root.contains("sweep")) cfg.sweep = parse_sweep(root.at("sweep"));
    if (root.contains("format")) {
        if (!root.at("format").is_string()) throw ConfigError("format", "expected a string");
        cfg.format = root.at("format").get<std::string>();
        check_format(cfg.format, "format");
    }
    if (root.contains("output")) {
        if (!root.at("output").is_string()) throw ConfigError("output", "expected a string");
        cfg.output = root.at("output").get<std::string>();
    }
    return cfg;
}

inline RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed config document: ") + e.what());
    }
    return parse_config(root);
}

/// Model with one sweep parameter replaced. "mu11"/"gamma11" rescale the inbound
/// service/repair law to the requested mean, keeping its shape.
inline ModelParams with_parameter(ModelParams p, const std::string& name, double value) {
    if (name == "lambda") p.lambda = value;
    else if (name == "alpha") p.alpha = value;
    else if (name == "nu") p.nu = value;
    else if (name == "beta1") p.beta1 = value;
    else if (name == "beta2") p.beta2 = value;
    else if (name == "mu11") p.service1 = p.service1.with_mean(value);
    else if (name == "gamma11") p.repair1 = p.repair1.with_mean(value);
    else throw ConfigError("sweep.param", "unknown sweep parameter '" + name + "'");
    p.validate();
    return p;
}

}  // namespace retrial::cli
