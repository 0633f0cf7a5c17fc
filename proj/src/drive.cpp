#include "gatecraft/drive.hpp"

#include "gatecraft/errors.hpp"

#include <cmath>
#include <string>

namespace gatecraft {

namespace {

const double kEm2 = std::exp(-2.0);

double rise(double t, double t_rise) {
    const double u = (t - t_rise) / t_rise;
    return std::exp(-2.0 * u * u) - kEm2;
}

}  // namespace

double plateau_level() { return 1.0 - kEm2; }

void validate(const PulseEnvelope& env, std::string_view path) {
    const std::string p(path);
    if (!(env.t_gate > 0.0) || !std::isfinite(env.t_gate))
        throw InvalidParameter(p + ".t_gate: must be positive");
    if (!(env.t_rise > 0.0) || !(env.t_rise < 0.5 * env.t_gate))
        throw InvalidParameter(p + ".t_rise: must lie in (0, t_gate/2)");
}

double envelope_eval(const PulseEnvelope& env, double t) {
    if (t <= 0.0 || t >= env.t_gate) return 0.0;
    if (t < env.t_left()) return rise(t, env.t_rise);
    if (t > env.t_right()) return rise(env.t_gate - t, env.t_rise);
    return plateau_level();
}

void validate(const DriveSchedule& s, std::string_view path) {
    const std::string p(path);
    validate(s.envelope, p + ".envelope");
    if (s.tones.empty() || s.tones.size() > 2)
        throw InvalidParameter(p + ".tones: one or two tones required");
    if (!(s.ej_static > 0.0)) throw InvalidParameter(p + ".ej_static: must be positive");
    double total = 0.0;
    for (std::size_t k = 0; k < s.tones.size(); ++k) {
        const auto& tone = s.tones[k];
        const std::string tp = p + ".tones[" + std::to_string(k) + "]";
        if (!(tone.delta_ej >= 0.0) || !std::isfinite(tone.delta_ej))
            throw InvalidParameter(tp + ".delta_ej: must be non-negative");
        if (!(tone.omega_p > 0.0) || !std::isfinite(tone.omega_p))
            throw InvalidParameter(tp + ".omega_p: must be positive");
        total += tone.delta_ej;
    }
    if (!(s.ej_static - plateau_level() * total > 0.0))
        throw InvalidParameter(p + ".tones: modulation can drive E_J to zero or below");
}

double ej_offset(const DriveSchedule& s, double t) {
    const double f = envelope_eval(s.envelope, t);
    if (f == 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& tone : s.tones) sum += tone.delta_ej * std::cos(kTwoPi * tone.omega_p * t);
    return f * sum;
}

double ej_of_t(const DriveSchedule& s, double t) { return s.ej_static + ej_offset(s, t); }

std::vector<HarmonicDecomposition> level_harmonics(const DriveSchedule& s, const QubitParams& q,
                                                   const TruncationConfig& trunc, int harmonics) {
    if (s.tones.size() != 1)
        throw UnsupportedSchedule("harmonic analysis needs a periodic one-tone drive");
    if (harmonics < 1) throw InvalidParameter("harmonics: must be at least 1");
    const int d = trunc.levels_per_qubit;
    const int samples = std::max(128, 8 * harmonics);
    const double amp = plateau_level() * s.tones[0].delta_ej;

    // Level energies on a uniform grid over one period; the trapezoid rule is
    // spectrally accurate for periodic integrands.
    std::vector<HarmonicDecomposition> out(d);
    for (auto& h : out) h.delta_omega.assign(harmonics, 0.0);
    for (int k = 0; k < samples; ++k) {
        const double phase = kTwoPi * k / samples;
        const auto sys = diagonalize_qubit({q.e_c, s.ej_static + amp * std::cos(phase)}, trunc);
        for (int j = 0; j < d; ++j) {
            const double e = sys.spectrum.levels[j];
            out[j].omega_bar += e / samples;
            for (int m = 1; m <= harmonics; ++m)
                out[j].delta_omega[m - 1] += 2.0 * e * std::cos(m * phase) / samples;
        }
    }
    return out;
}

HarmonicDecomposition harmonic_decomposition(const DriveSchedule& s, const QubitParams& q,
                                             const TruncationConfig& trunc, int harmonics) {
    const auto levels = level_harmonics(s, q, trunc, harmonics);
    return levels[1];
}

}  // namespace gatecraft
