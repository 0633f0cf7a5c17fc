#include "gatecraft/config.hpp"

#include "gatecraft/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace gatecraft {

using nlohmann::json;

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::j_c: return "j_c";
        case SweepAxis::t1: return "t1";
        case SweepAxis::delta_ej: return "delta_ej";
    }
    return "j_c";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "j_c") return SweepAxis::j_c;
    if (s == "t1") return SweepAxis::t1;
    if (s == "delta_ej") return SweepAxis::delta_ej;
    throw InvalidParameter("sweep.axis: unknown value '" + s + "'");
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InvalidParameter(path + ": " + what);
}

const json& require_object(const json& j, const std::string& path,
                           std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) fail(path.empty() ? key : path + "." + key, "unknown field");
    }
    return j;
}

std::string join(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

// null stands for infinity.
double get_extended(const json& j, const std::string& path) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    return get_number(j, path);
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (size_t k = 0; k < j.size(); ++k)
        out.push_back(get_number(j[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

template <class T, class F>
void read(const json& obj, const char* key, const std::string& path, T& into, F getter) {
    if (obj.contains(key)) into = getter(obj.at(key), join(path, key));
}

QubitParams parse_qubit(const json& j, const std::string& path) {
    require_object(j, path, {"e_c", "e_j"});
    QubitParams q;
    if (!j.contains("e_c") || !j.contains("e_j")) fail(path, "needs e_c and e_j");
    q.e_c = get_number(j.at("e_c"), path + ".e_c");
    q.e_j = get_number(j.at("e_j"), path + ".e_j");
    return q;
}

GateTarget parse_target(const json& j, const std::string& path) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "cz") return GateTarget::cz();
        if (s == "iswap") return GateTarget::iswap();
        if (s == "sqrt_iswap") return GateTarget::sqrt_iswap();
        fail(path, "unknown gate '" + s + "'");
    }
    require_object(j, path, {"theta", "zeta"});
    GateTarget t;
    read(j, "theta", path, t.theta, get_number);
    read(j, "zeta", path, t.zeta, get_number);
    return t;
}

json target_json(const GateTarget& t) {
    if (t == GateTarget::cz()) return "cz";
    if (t == GateTarget::iswap()) return "iswap";
    if (t == GateTarget::sqrt_iswap()) return "sqrt_iswap";
    return {{"theta", t.theta}, {"zeta", t.zeta}};
}

json extended(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidParameter(std::string("config: malformed JSON: ") + e.what());
    }
    require_object(root, "", {"circuit", "truncation", "gate", "optimizer", "propagation", "sweep",
                              "lindblad", "output", "notes"});
    ExperimentConfig cfg;

    if (root.contains("circuit")) {
        const json& c = require_object(root["circuit"], "circuit", {"fixed", "tunable", "j_c"});
        if (c.contains("fixed")) cfg.circuit.fixed = parse_qubit(c["fixed"], "circuit.fixed");
        if (c.contains("tunable")) cfg.circuit.tunable = parse_qubit(c["tunable"], "circuit.tunable");
        read(c, "j_c", "circuit", cfg.circuit.j_c, get_number);
    }
    if (root.contains("truncation")) {
        const json& t = require_object(root["truncation"], "truncation",
                                       {"charge_cutoff", "levels_per_qubit"});
        read(t, "charge_cutoff", "truncation", cfg.truncation.charge_cutoff, get_int);
        read(t, "levels_per_qubit", "truncation", cfg.truncation.levels_per_qubit, get_int);
    }
    if (root.contains("gate")) {
        const json& g = require_object(root["gate"], "gate",
                                       {"target", "tones", "t_gate", "t_rise", "resonance",
                                        "fixed_frequencies", "params"});
        if (g.contains("target")) cfg.gate.target = parse_target(g["target"], "gate.target");
        read(g, "tones", "gate", cfg.gate.tone_count, get_int);
        read(g, "t_gate", "gate", cfg.gate.t_gate, get_number);
        read(g, "t_rise", "gate", cfg.gate.t_rise, get_number);
        if (g.contains("resonance")) {
            try {
                cfg.gate.rule = resonance_rule_from_string(get_string(g["resonance"], "gate.resonance"));
            } catch (const InvalidParameter&) {
                fail("gate.resonance", "unknown rule");
            }
        }
        read(g, "fixed_frequencies", "gate", cfg.gate.fixed_frequencies, get_numbers);
        if (g.contains("params")) {
            const json& p = require_object(g["params"], "gate.params", {"delta_ej", "omega_p"});
            PulseParams pp;
            read(p, "delta_ej", "gate.params", pp.delta_ej, get_numbers);
            read(p, "omega_p", "gate.params", pp.omega_p, get_numbers);
            cfg.params = pp;
        }
    }
    if (root.contains("optimizer")) {
        const json& o = require_object(root["optimizer"], "optimizer",
                                       {"budget", "starts", "max_amplitude_fraction",
                                        "frequency_window", "xtol", "ftol"});
        read(o, "budget", "optimizer", cfg.optimizer.budget, get_int);
        read(o, "starts", "optimizer", cfg.optimizer.starts, get_int);
        read(o, "max_amplitude_fraction", "optimizer", cfg.optimizer.max_amplitude_fraction, get_number);
        read(o, "frequency_window", "optimizer", cfg.optimizer.frequency_window, get_number);
        read(o, "xtol", "optimizer", cfg.optimizer.xtol, get_number);
        read(o, "ftol", "optimizer", cfg.optimizer.ftol, get_number);
    }
    if (root.contains("propagation")) {
        const json& p = require_object(root["propagation"], "propagation", {"rtol", "atol"});
        read(p, "rtol", "propagation", cfg.optimizer.propagation.rtol, get_number);
        read(p, "atol", "propagation", cfg.optimizer.propagation.atol, get_number);
    }
    if (root.contains("sweep")) {
        const json& s = require_object(root["sweep"], "sweep", {"axis", "values"});
        SweepConfig sc;
        if (s.contains("axis")) sc.axis = sweep_axis_from_string(get_string(s["axis"], "sweep.axis"));
        read(s, "values", "sweep", sc.values, get_numbers);
        cfg.sweep = sc;
    }
    if (root.contains("lindblad")) {
        const json& l = require_object(root["lindblad"], "lindblad",
                                       {"t1_fixed_us", "t1_tunable_us", "level_truncation",
                                        "rate_convention"});
        LindbladConfig lc;
        read(l, "t1_fixed_us", "lindblad", lc.t1_fixed, get_extended);
        read(l, "t1_tunable_us", "lindblad", lc.t1_tunable, get_extended);
        read(l, "level_truncation", "lindblad", lc.level_truncation, get_int);
        if (l.contains("rate_convention"))
            lc.rate_convention =
                rate_convention_from_string(get_string(l["rate_convention"], "lindblad.rate_convention"));
        cfg.lindblad = lc;
    }
    read(root, "output", "", cfg.output, get_string);
    read(root, "notes", "", cfg.notes, get_string);

    validate(cfg.circuit, "circuit");
    validate(cfg.truncation, "truncation");
    validate(cfg.gate, "gate");
    if (cfg.lindblad) validate(*cfg.lindblad, cfg.truncation, "lindblad");
    if (cfg.optimizer.budget < 100) fail("optimizer.budget", "must be at least 100");
    if (cfg.optimizer.starts < 1) fail("optimizer.starts", "must be at least 1");
    if (!(cfg.optimizer.propagation.rtol > 0.0)) fail("propagation.rtol", "must be positive");
    if (!(cfg.optimizer.propagation.atol > 0.0)) fail("propagation.atol", "must be positive");
    if (cfg.params) {
        const auto n = static_cast<size_t>(cfg.gate.tone_count);
        if (cfg.params->delta_ej.size() != n || cfg.params->omega_p.size() != n)
            fail("gate.params", "needs one delta_ej and one omega_p per tone");
        for (size_t k = 0; k < n; ++k)
            if (!(cfg.params->omega_p[k] > 0.0))
                fail("gate.params.omega_p[" + std::to_string(k) + "]", "must be positive");
    }
    if (cfg.sweep) {
        if (cfg.sweep->values.empty()) fail("sweep.values", "must not be empty");
        for (size_t k = 0; k < cfg.sweep->values.size(); ++k) {
            const double v = cfg.sweep->values[k];
            const std::string p = "sweep.values[" + std::to_string(k) + "]";
            if (!std::isfinite(v)) fail(p, "must be finite");
            if (cfg.sweep->axis == SweepAxis::t1 && !(v > 0.0)) fail(p, "T1 must be positive");
            if (cfg.sweep->axis == SweepAxis::j_c && v < 0.0) fail(p, "j_c must be non-negative");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json root;
    root["circuit"] = {{"fixed", {{"e_c", cfg.circuit.fixed.e_c}, {"e_j", cfg.circuit.fixed.e_j}}},
                       {"tunable", {{"e_c", cfg.circuit.tunable.e_c}, {"e_j", cfg.circuit.tunable.e_j}}},
                       {"j_c", cfg.circuit.j_c}};
    root["truncation"] = {{"charge_cutoff", cfg.truncation.charge_cutoff},
                          {"levels_per_qubit", cfg.truncation.levels_per_qubit}};
    json gate = {{"target", target_json(cfg.gate.target)},
                 {"tones", cfg.gate.tone_count},
                 {"t_gate", cfg.gate.t_gate},
                 {"t_rise", cfg.gate.t_rise},
                 {"resonance", to_string(cfg.gate.rule)},
                 {"fixed_frequencies", cfg.gate.fixed_frequencies}};
    if (cfg.params) gate["params"] = {{"delta_ej", cfg.params->delta_ej}, {"omega_p", cfg.params->omega_p}};
    root["gate"] = gate;
    const auto& o = cfg.optimizer;
    root["optimizer"] = {{"budget", o.budget},
                         {"starts", o.starts},
                         {"max_amplitude_fraction", o.max_amplitude_fraction},
                         {"frequency_window", o.frequency_window},
                         {"xtol", o.xtol},
                         {"ftol", o.ftol}};
    root["propagation"] = {{"rtol", o.propagation.rtol}, {"atol", o.propagation.atol}};
    if (cfg.sweep) root["sweep"] = {{"axis", to_string(cfg.sweep->axis)}, {"values", cfg.sweep->values}};
    if (cfg.lindblad) {
        const auto& l = *cfg.lindblad;
        root["lindblad"] = {{"t1_fixed_us", extended(l.t1_fixed)},
                            {"t1_tunable_us", extended(l.t1_tunable)},
                            {"level_truncation", l.level_truncation},
                            {"rate_convention", to_string(l.rate_convention)}};
    }
    root["output"] = cfg.output;
    root["notes"] = cfg.notes;
    return root.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : serialize_config(cfg)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    return buf;
}

}  // namespace gatecraft
