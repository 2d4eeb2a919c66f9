// SPDX-License-Identifier: MIT
#include "emweak/config.hpp"

#include "emweak/error.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>

namespace emweak {

using nlohmann::json;

std::string_view to_string(Pipeline p) {
    switch (p) {
        case Pipeline::weak_order: return "weak_order";
        case Pipeline::identity_check: return "identity_check";
        case Pipeline::reflected_law: return "reflected_law";
        case Pipeline::killed_bias: return "killed_bias";
        case Pipeline::weight_diagnostic: return "weight_diagnostic";
    }
    return "weak_order";
}

Pipeline pipeline_from_string(std::string_view s) {
    for (auto p : {Pipeline::weak_order, Pipeline::identity_check, Pipeline::reflected_law, Pipeline::killed_bias,
                   Pipeline::weight_diagnostic}) {
        if (to_string(p) == s) return p;
    }
    throw ConfigError("unknown pipeline '" + std::string(s) + "'");
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> keys, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto k : keys) known = known || k == key;
        if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

const json& require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    return j;
}

template <class T>
T read(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("invalid or missing '" + std::string(key) + "' in " + where);
    }
}

template <class T>
std::optional<T> read_opt(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    return read<T>(obj, key, where);
}

template <class T>
void read_into(const json& obj, const char* key, T& out, const std::string& where) {
    if (obj.contains(key)) out = read<T>(obj, key, where);
}

template <class T>
void write_opt(json& obj, const char* key, const std::optional<T>& v) {
    if (v) obj[key] = *v;
}

InlineProblem parse_problem(const json& j) {
    const std::string where = "problem";
    require_object(j, where);
    reject_unknown(j, {"drift", "x0", "T", "sigma", "kind", "domain", "holder_alpha", "growth", "class_a"}, where);
    InlineProblem p;
    if (!j.contains("drift")) throw ConfigError("problem needs a 'drift'");
    const json& drift = require_object(j.at("drift"), "problem.drift");
    reject_unknown(drift, {"name", "param"}, "problem.drift");
    p.drift.name = read<std::string>(drift, "name", "problem.drift");
    p.drift.param = read_opt<double>(drift, "param", "problem.drift");
    p.x0 = read<std::vector<double>>(j, "x0", where);
    read_into(j, "T", p.horizon, where);
    read_into(j, "sigma", p.sigma, where);
    read_into(j, "kind", p.kind, where);
    if (j.contains("domain")) {
        const json& dj = require_object(j.at("domain"), "problem.domain");
        reject_unknown(dj, {"interval", "epsilon", "p"}, "problem.domain");
        const auto iv = read<std::vector<double>>(dj, "interval", "problem.domain");
        if (iv.size() != 2) throw ConfigError("problem.domain.interval must have two entries");
        DomainChoice d;
        d.lower = iv[0];
        d.upper = iv[1];
        read_into(dj, "epsilon", d.epsilon, "problem.domain");
        read_into(dj, "p", d.p, "problem.domain");
        p.domain = d;
    }
    p.holder_alpha = read_opt<double>(j, "holder_alpha", where);
    p.growth = read_opt<std::string>(j, "growth", where);
    p.class_a = read_opt<std::vector<bool>>(j, "class_a", where);
    return p;
}

json write_problem(const InlineProblem& p) {
    json drift = {{"name", p.drift.name}};
    write_opt(drift, "param", p.drift.param);
    json j = {{"drift", drift}, {"x0", p.x0}, {"T", p.horizon}, {"kind", p.kind}};
    if (!p.sigma.empty()) j["sigma"] = p.sigma;
    if (p.domain) {
        j["domain"] = {{"interval", {p.domain->lower, p.domain->upper}},
                       {"epsilon", p.domain->epsilon},
                       {"p", p.domain->p}};
    }
    write_opt(j, "holder_alpha", p.holder_alpha);
    write_opt(j, "growth", p.growth);
    write_opt(j, "class_a", p.class_a);
    return j;
}

FunctionalChoice parse_functional(const json& j) {
    const std::string where = "functional";
    require_object(j, where);
    reject_unknown(j, {"kind", "g", "g_param", "f", "beta"}, where);
    FunctionalChoice f;
    read_into(j, "kind", f.kind, where);
    read_into(j, "g", f.g, where);
    f.g_param = read_opt<double>(j, "g_param", where);
    f.f = read_opt<std::string>(j, "f", where);
    f.beta = read_opt<double>(j, "beta", where);
    return f;
}

json write_functional(const FunctionalChoice& f) {
    json j = {{"kind", f.kind}, {"g", f.g}};
    write_opt(j, "g_param", f.g_param);
    write_opt(j, "f", f.f);
    write_opt(j, "beta", f.beta);
    return j;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    const std::string where = "config";
    require_object(j, where);
    reject_unknown(j,
                   {"problem", "functional", "pipeline", "ladder", "h_ref", "h", "reference_mode", "n_paths",
                    "n_batches", "seed", "moment_p", "moment_schedule", "reference_value", "min_slope", "max_slope",
                    "tolerance", "output"},
                   where);

    ExperimentConfig c;
    if (!j.contains("problem")) throw ConfigError("config needs a 'problem'");
    if (j.at("problem").is_string()) {
        c.problem = j.at("problem").get<std::string>();
    } else {
        c.problem = parse_problem(j.at("problem"));
    }
    if (j.contains("functional")) c.functional = parse_functional(j.at("functional"));
    c.pipeline = pipeline_from_string(read<std::string>(j, "pipeline", where));
    c.ladder = read_opt<std::vector<double>>(j, "ladder", where);
    c.h_ref = read_opt<double>(j, "h_ref", where);
    if (j.contains("h") && j.at("h").is_array()) {
        if (c.ladder) throw ConfigError("give the ladder either as 'ladder' or as an 'h' array, not both");
        c.ladder = read<std::vector<double>>(j, "h", where);
    } else {
        c.h = read_opt<double>(j, "h", where);
    }
    read_into(j, "reference_mode", c.reference_mode, where);
    read_into(j, "n_paths", c.n_paths, where);
    read_into(j, "n_batches", c.n_batches, where);
    read_into(j, "seed", c.seed, where);
    read_into(j, "moment_p", c.moment_p, where);
    c.moment_schedule = read_opt<std::vector<std::size_t>>(j, "moment_schedule", where);
    c.reference_value = read_opt<double>(j, "reference_value", where);
    c.min_slope = read_opt<double>(j, "min_slope", where);
    c.max_slope = read_opt<double>(j, "max_slope", where);
    read_into(j, "tolerance", c.tolerance, where);
    if (j.contains("output")) {
        const json& o = require_object(j.at("output"), "output");
        reject_unknown(o, {"dir", "csv", "json"}, "output");
        read_into(o, "dir", c.output.dir, "output");
        read_into(o, "csv", c.output.csv, "output");
        read_into(o, "json", c.output.json, "output");
    }
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    json j;
    if (const auto* name = std::get_if<std::string>(&c.problem)) {
        j["problem"] = *name;
    } else {
        j["problem"] = write_problem(std::get<InlineProblem>(c.problem));
    }
    if (c.functional) j["functional"] = write_functional(*c.functional);
    j["pipeline"] = std::string(to_string(c.pipeline));
    write_opt(j, "ladder", c.ladder);
    write_opt(j, "h_ref", c.h_ref);
    write_opt(j, "h", c.h);
    j["reference_mode"] = c.reference_mode;
    j["n_paths"] = c.n_paths;
    j["n_batches"] = c.n_batches;
    j["seed"] = c.seed;
    j["moment_p"] = c.moment_p;
    write_opt(j, "moment_schedule", c.moment_schedule);
    write_opt(j, "reference_value", c.reference_value);
    write_opt(j, "min_slope", c.min_slope);
    write_opt(j, "max_slope", c.max_slope);
    j["tolerance"] = c.tolerance;
    j["output"] = {{"dir", c.output.dir}, {"csv", c.output.csv}, {"json", c.output.json}};
    return j.dump(2) + "\n";
}

}  // namespace emweak
