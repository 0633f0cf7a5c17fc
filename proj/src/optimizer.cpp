#include "gatecraft/optimizer.hpp"

#include "gatecraft/errors.hpp"
#include "gatecraft/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gatecraft {

std::string to_string(ResonanceRule r) {
    switch (r) {
        case ResonanceRule::cz_via_11_02: return "cz_via_11_02";
        case ResonanceRule::cz_via_20_11: return "cz_via_20_11";
        case ResonanceRule::swap_resonant: return "swap_resonant";
    }
    return "?";
}

ResonanceRule resonance_rule_from_string(std::string_view s) {
    if (s == "cz_via_11_02") return ResonanceRule::cz_via_11_02;
    if (s == "cz_via_20_11") return ResonanceRule::cz_via_20_11;
    if (s == "swap_resonant") return ResonanceRule::swap_resonant;
    throw InvalidParameter("unknown resonance rule '" + std::string(s) + "'");
}

void validate(const GateSpec& g, std::string_view path) {
    const std::string p(path);
    if (g.tone_count != 1 && g.tone_count != 2)
        throw InvalidParameter(p + ".tone_count: must be 1 or 2");
    validate(PulseEnvelope{g.t_gate, g.t_rise}, p);
    const bool swap = g.target.swap_type();
    if (swap && g.rule != ResonanceRule::swap_resonant)
        throw InvalidParameter(p + ".resonance_rule: swap-type targets need swap_resonant");
    if (!swap && g.rule == ResonanceRule::swap_resonant)
        throw InvalidParameter(p + ".resonance_rule: CZ-type targets need a CZ rule");
    if (!g.fixed_frequencies.empty()) {
        if (static_cast<int>(g.fixed_frequencies.size()) != g.tone_count)
            throw InvalidParameter(p + ".fixed_frequencies: one entry per tone");
        for (double f : g.fixed_frequencies)
            if (!(f > 0.0)) throw InvalidParameter(p + ".fixed_frequencies: must be positive");
    }
}

std::vector<double> seed_frequencies(const CoupledSystem& sys, const GateSpec& spec) {
    if (!spec.fixed_frequencies.empty()) return spec.fixed_frequencies;
    double seed = 0.0;
    switch (spec.rule) {
        case ResonanceRule::swap_resonant: seed = transition_frequency(sys, {0, 1}, {1, 0}); break;
        case ResonanceRule::cz_via_11_02: seed = transition_frequency(sys, {0, 2}, {1, 1}); break;
        case ResonanceRule::cz_via_20_11: seed = transition_frequency(sys, {1, 1}, {2, 0}); break;
    }
    if (spec.tone_count == 1) return {seed};
    return {seed, seed + 1.0 / spec.t_gate};
}

DriveSchedule make_schedule(const CoupledSystem& sys, const GateSpec& spec,
                            const PulseParams& params) {
    if (params.delta_ej.size() != params.omega_p.size() ||
        static_cast<int>(params.delta_ej.size()) != spec.tone_count)
        throw InvalidParameter("params: one amplitude and one frequency per tone");
    DriveSchedule s;
    s.envelope = {spec.t_gate, spec.t_rise};
    s.ej_static = sys.ej_static();
    for (std::size_t k = 0; k < params.delta_ej.size(); ++k)
        s.tones.push_back({params.delta_ej[k], params.omega_p[k]});
    return s;
}

GateMetrics evaluate_pulse(const CoupledSystem& sys, const GateSpec& spec,
                           const PulseParams& params, const PropagationOptions& prop) {
    const Matrix4c u = propagate_computational(sys, make_schedule(sys, spec, params), prop);
    return extract_error_budget(u, spec.target);
}

ObjectiveValue objective_infidelity(const CoupledSystem& sys, const GateSpec& spec,
                                    const PulseParams& params, const PropagationOptions& prop) {
    ObjectiveValue out;
    try {
        const Matrix4c u = propagate_computational(sys, make_schedule(sys, spec, params), prop);
        out.value = 1.0 - virtual_z_reduce(u, spec.target).fidelity;
    } catch (const Error& e) {
        out.value = kFailedObjective;
        out.failed = true;
        out.error = e.what();
    }
    return out;
}

namespace {

// Optimizer coordinates: amplitudes in units of the static E_J and, for one
// tone, the frequency detuning from the seed in units of 1/t_gate.
struct Coordinates {
    const CoupledSystem& sys;
    const GateSpec& spec;
    const OptimizerSettings& set;
    std::vector<double> seed;

    double ej() const { return sys.ej_static(); }

    PulseParams to_params(const std::vector<double>& x) const {
        PulseParams p;
        if (spec.tone_count == 1) {
            p.delta_ej = {x[0] * ej()};
            p.omega_p = {seed[0] + x[1] / spec.t_gate};
        } else {
            p.delta_ej = {x[0] * ej(), x[1] * ej()};
            p.omega_p = seed;
        }
        return p;
    }

    // Distance outside the feasible box, zero inside.
    double violation(const std::vector<double>& x) const {
        double v = 0.0;
        const int amps = spec.tone_count == 1 ? 1 : 2;
        for (int k = 0; k < amps; ++k) {
            v += std::max(0.0, -x[k]);
            v += std::max(0.0, x[k] - set.max_amplitude_fraction);
        }
        if (spec.tone_count == 1)
            v += std::max(0.0, std::abs(x[1]) - set.frequency_window * spec.t_gate) / spec.t_gate;
        return v;
    }
};

}  // namespace

OptimizationResult optimize_pulse(const CoupledSystem& sys, const GateSpec& spec,
                                  const OptimizerSettings& settings) {
    validate(spec);
    if (settings.budget < 100) throw InvalidParameter("budget: must be at least 100");
    Coordinates co{sys, spec, settings, seed_frequencies(sys, spec)};

    int evaluations = 0;
    auto objective = [&](const std::vector<double>& x) {
        ++evaluations;
        const double v = co.violation(x);
        if (v > 0.0) return 1.0 + v;
        return objective_infidelity(sys, spec, co.to_params(x), settings.propagation).value;
    };

    constexpr int kGrid = 5;
    std::vector<double> amps(kGrid), offs(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        amps[i] = 0.05 * std::pow(0.4 / 0.05, static_cast<double>(i) / (kGrid - 1));
        offs[i] = -3.0 + 6.0 * i / (kGrid - 1);
    }
    std::vector<std::vector<double>> starts;
    for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j < kGrid; ++j)
            starts.push_back(spec.tone_count == 1 ? std::vector<double>{amps[i], offs[j]}
                                                  : std::vector<double>{amps[i], amps[j]});
    std::vector<double> grid_val(starts.size());
    for (std::size_t k = 0; k < starts.size(); ++k) grid_val[k] = objective(starts[k]);

    std::vector<std::size_t> order(starts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return grid_val[a] < grid_val[b]; });

    OptimizationResult res;
    res.grid_best = grid_val[order[0]];
    std::vector<double> best_x = starts[order[0]];
    double best_v = grid_val[order[0]];
    bool best_converged = false;

    // Local searches start from the best grid cells that are not neighbours
    // of an already chosen cell, then from the best remaining ones.
    const int n_starts = std::min<int>(settings.starts, static_cast<int>(starts.size()));
    std::vector<std::size_t> chosen;
    auto near = [&](std::size_t a, std::size_t b) {
        const int ai = static_cast<int>(a) / kGrid, aj = static_cast<int>(a) % kGrid;
        const int bi = static_cast<int>(b) / kGrid, bj = static_cast<int>(b) % kGrid;
        return std::abs(ai - bi) <= 1 && std::abs(aj - bj) <= 1;
    };
    for (std::size_t k : order)
        if (static_cast<int>(chosen.size()) < n_starts &&
            std::none_of(chosen.begin(), chosen.end(), [&](std::size_t c) { return near(c, k); }))
            chosen.push_back(k);
    for (std::size_t k : order)
        if (static_cast<int>(chosen.size()) < n_starts &&
            std::find(chosen.begin(), chosen.end(), k) == chosen.end())
            chosen.push_back(k);

    const int per_start = std::max(20, (settings.budget - evaluations) / std::max(1, n_starts));
    for (int s = 0; s < n_starts; ++s) {
        const auto& x0 = starts[chosen[s]];
        std::vector<double> step = spec.tone_count == 1
                                       ? std::vector<double>{0.1 * x0[0], 0.5}
                                       : std::vector<double>{0.1 * x0[0], 0.1 * x0[1]};
        SimplexOptions so;
        so.xtol = settings.xtol;
        so.ftol = settings.ftol;
        so.max_evaluations = std::min(per_start, settings.budget - evaluations);
        if (so.max_evaluations < 2 * static_cast<int>(x0.size()) + 2) break;
        const SimplexResult r = minimize_simplex(objective, x0, step, so);
        if (r.value < best_v) {
            best_v = r.value;
            best_x = r.x;
            best_converged = r.converged;
        } else if (r.value == best_v) {
            best_converged = best_converged || r.converged;
        }
    }

    res.best_params = co.to_params(best_x);
    res.metrics = evaluate_pulse(sys, spec, res.best_params, settings.propagation);
    res.evaluations = evaluations;
    res.converged = best_converged;
    return res;
}

OptimizationResult optimize_pulse(const CoupledSystem& sys, const GateSpec& spec, int budget) {
    OptimizerSettings s;
    s.budget = budget;
    return optimize_pulse(sys, spec, s);
}

std::vector<SensitivityPoint> sensitivity_scan(const CoupledSystem& sys, const GateSpec& spec,
                                               const PulseParams& params, SensitivityAxis axis,
                                               const std::vector<double>& offsets,
                                               const PropagationOptions& prop) {
    std::vector<SensitivityPoint> out;
    for (double off : offsets) {
        SensitivityPoint pt;
        pt.offset = off;
        try {
            if (axis == SensitivityAxis::delta_ej) {
                PulseParams p = params;
                for (double& a : p.delta_ej) a += off;
                pt.axis_value = p.delta_ej.front();
                pt.metrics = evaluate_pulse(sys, spec, p, prop);
            } else {
                CircuitParams cp = sys.params();
                cp.j_c += off;
                pt.axis_value = cp.j_c;
                const CoupledSystem shifted(cp, sys.truncation());
                pt.metrics = evaluate_pulse(shifted, spec, params, prop);
            }
        } catch (const Error&) {
            pt.failed = true;
        }
        out.push_back(pt);
    }
    return out;
}

std::vector<SensitivityPoint> sensitivity_scan(const CoupledSystem& sys, const GateSpec& spec,
                                               const OptimizationResult& result,
                                               SensitivityAxis axis, double lo, double hi,
                                               int steps, const PropagationOptions& prop) {
    if (steps < 1) throw InvalidParameter("steps: must be at least 1");
    if (!(hi >= lo)) throw InvalidParameter("range: upper bound below lower bound");
    std::vector<double> offsets;
    for (int k = 0; k < steps; ++k)
        offsets.push_back(steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1));
    return sensitivity_scan(sys, spec, result.best_params, axis, offsets, prop);
}

}  // namespace gatecraft
