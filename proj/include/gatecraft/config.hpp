#pragma once

#include "gatecraft/open_system.hpp"
#include "gatecraft/optimizer.hpp"
#include "gatecraft/spectrum.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gatecraft {

enum class SweepAxis { j_c, t1, delta_ej };

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

// j_c and delta_ej values in GHz, t1 values in us.
struct SweepConfig {
    SweepAxis axis = SweepAxis::j_c;
    std::vector<double> values;
    bool operator==(const SweepConfig&) const = default;
};

struct ExperimentConfig {
    CircuitParams circuit{{0.2, 20.0}, {0.2, 15.6}, 0.010};
    TruncationConfig truncation;
    GateSpec gate;
    OptimizerSettings optimizer;
    std::optional<PulseParams> params;  // skip optimization when given
    std::optional<SweepConfig> sweep;
    std::optional<LindbladConfig> lindblad;
    std::string output;
    std::string notes;
    bool operator==(const ExperimentConfig&) const = default;
};

// Throws InvalidParameter with a dotted path for any malformed or invalid field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string config_hash_hex(const ExperimentConfig& cfg);

}  // namespace gatecraft
