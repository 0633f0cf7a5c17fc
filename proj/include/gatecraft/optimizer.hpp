#pragma once

#include "gatecraft/evolution.hpp"
#include "gatecraft/gate_metrics.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace gatecraft {

// Which dressed transition the modulation frequency is seeded on.
enum class ResonanceRule { cz_via_11_02, cz_via_20_11, swap_resonant };

std::string to_string(ResonanceRule r);
ResonanceRule resonance_rule_from_string(std::string_view s);

struct GateSpec {
    GateTarget target = GateTarget::cz();
    int tone_count = 1;
    double t_gate = 75.0;
    double t_rise = 10.0;
    ResonanceRule rule = ResonanceRule::cz_via_11_02;
    // Two-tone only: frequencies held fixed; empty means derive from the seed.
    std::vector<double> fixed_frequencies;
    bool operator==(const GateSpec&) const = default;
};

void validate(const GateSpec& g, std::string_view path = "gate");

struct PulseParams {
    std::vector<double> delta_ej;
    std::vector<double> omega_p;
    bool operator==(const PulseParams&) const = default;
};

// One entry per tone. Two-tone: seed and seed + 1/t_gate.
std::vector<double> seed_frequencies(const CoupledSystem& sys, const GateSpec& spec);

DriveSchedule make_schedule(const CoupledSystem& sys, const GateSpec& spec,
                            const PulseParams& params);

struct ObjectiveValue {
    double value = 0.0;
    bool failed = false;
    std::string error;
};

// Value returned for pulses that cannot be simulated.
inline constexpr double kFailedObjective = 10.0;

ObjectiveValue objective_infidelity(const CoupledSystem& sys, const GateSpec& spec,
                                    const PulseParams& params,
                                    const PropagationOptions& prop = {});

GateMetrics evaluate_pulse(const CoupledSystem& sys, const GateSpec& spec,
                           const PulseParams& params, const PropagationOptions& prop = {});

struct OptimizerSettings {
    int budget = 400;
    int starts = 3;
    double max_amplitude_fraction = 0.5;  // of the static tunable E_J
    double frequency_window = 0.1;        // GHz around the seed
    double xtol = 1e-7;                   // in scaled coordinates
    double ftol = 1e-12;
    PropagationOptions propagation;
    bool operator==(const OptimizerSettings&) const = default;
};

struct OptimizationResult {
    PulseParams best_params;
    GateMetrics metrics;
    int evaluations = 0;
    bool converged = false;
    double grid_best = 0.0;  // best objective among the grid starts
};

OptimizationResult optimize_pulse(const CoupledSystem& sys, const GateSpec& spec,
                                  const OptimizerSettings& settings);
OptimizationResult optimize_pulse(const CoupledSystem& sys, const GateSpec& spec, int budget);

enum class SensitivityAxis { delta_ej, j_c };

struct SensitivityPoint {
    double offset = 0.0;      // GHz
    double axis_value = 0.0;  // perturbed absolute value, GHz
    GateMetrics metrics;
    bool failed = false;
};

// Re-evaluates the optimized pulse with one quantity shifted by offsets
// spanning [lo, hi]. Every tone amplitude moves by the same offset.
std::vector<SensitivityPoint> sensitivity_scan(const CoupledSystem& sys, const GateSpec& spec,
                                               const OptimizationResult& result,
                                               SensitivityAxis axis, double lo, double hi,
                                               int steps, const PropagationOptions& prop = {});
std::vector<SensitivityPoint> sensitivity_scan(const CoupledSystem& sys, const GateSpec& spec,
                                               const PulseParams& params, SensitivityAxis axis,
                                               const std::vector<double>& offsets,
                                               const PropagationOptions& prop = {});

}  // namespace gatecraft
