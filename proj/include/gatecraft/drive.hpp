#pragma once

#include "gatecraft/spectrum.hpp"

#include <string_view>
#include <vector>

namespace gatecraft {

// Gaussian flat-top envelope. Times in ns.
struct PulseEnvelope {
    double t_gate = 75.0;
    double t_rise = 10.0;
    double t_left() const { return t_rise; }
    double t_right() const { return t_gate - t_rise; }
    bool operator==(const PulseEnvelope&) const = default;
};

// 1 - e^-2, the envelope value on the plateau.
double plateau_level();

void validate(const PulseEnvelope& env, std::string_view path = "envelope");
double envelope_eval(const PulseEnvelope& env, double t);

struct ToneSpec {
    double delta_ej = 0.0;  // GHz
    double omega_p = 0.0;   // GHz, linear frequency
    bool operator==(const ToneSpec&) const = default;
};

struct DriveSchedule {
    PulseEnvelope envelope;
    std::vector<ToneSpec> tones;
    double ej_static = 0.0;
    bool operator==(const DriveSchedule&) const = default;
};

void validate(const DriveSchedule& s, std::string_view path = "schedule");
// E_J of the tunable qubit at time t.
double ej_of_t(const DriveSchedule& s, double t);
// ej_of_t(s, t) - ej_static, evaluated without cancellation.
double ej_offset(const DriveSchedule& s, double t);

struct HarmonicDecomposition {
    double omega_bar = 0.0;
    std::vector<double> delta_omega;  // m = 1..M
};

// Fourier content of the tunable 0->1 frequency on the plateau of a one-tone drive.
HarmonicDecomposition harmonic_decomposition(const DriveSchedule& s, const QubitParams& q,
                                             const TruncationConfig& trunc, int harmonics = 8);

// Same analysis for every tunable level energy (ground-referenced). Entry j
// describes level j; entry 0 is identically zero.
std::vector<HarmonicDecomposition> level_harmonics(const DriveSchedule& s, const QubitParams& q,
                                                   const TruncationConfig& trunc, int harmonics);

}  // namespace gatecraft
