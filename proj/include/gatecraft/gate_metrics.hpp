#pragma once

#include "gatecraft/types.hpp"

#include <array>

namespace gatecraft {

enum class GateFamily { cz, iswap, sqrt_iswap, generic };

// Canonical two-qubit gate U(theta, zeta): a partial swap by theta in the
// 01/10 block and phase exp(-i zeta/2) on 00 and 11.
struct GateTarget {
    double theta = 0.0;
    double zeta = 0.0;

    static GateTarget cz() { return {0.0, kPi}; }
    static GateTarget iswap() { return {kPi, 0.0}; }
    static GateTarget sqrt_iswap() { return {0.5 * kPi, 0.0}; }

    Matrix4c ideal() const;
    GateFamily family() const;
    bool swap_type() const { return theta != 0.0; }
    bool operator==(const GateTarget&) const = default;
};

// exp(i Z1 a1) exp(i Z2 a2) in the basis 00, 01, 10, 11.
Matrix4c z_phase_gate(double a1, double a2);

// [Tr(U^dag U) + |Tr(target^dag U)|^2] / 20
double gate_fidelity(const Matrix4c& u, const GateTarget& target);

struct VirtualZResult {
    std::array<double, 4> angles{};  // pre1, pre2, post1, post2
    double fidelity = 0.0;
    double gradient_norm = 0.0;
    Matrix4c reduced;  // post * u * pre
};

// Best single-qubit Z frame change around u, as applied in software.
VirtualZResult virtual_z_reduce(const Matrix4c& u, const GateTarget& target);

// Z-gauge invariant conditional phase in (-pi, pi]. Throws UndefinedPhase
// when a defining element is below 1e-6 in magnitude.
double conditional_zz_phase(const Matrix4c& u, const GateTarget& target);

struct ErrorBudget {
    double phase_err = 0.0;
    double leakage_err = 0.0;
    double rotation_err = 0.0;
    double total_err = 0.0;
};

struct GateMetrics {
    double fidelity = 0.0;
    double zeta_phase = 0.0;      // NaN when undefined
    double leakage_angle = 0.0;   // epsilon
    double rotation_angle = 0.0;  // gamma
    double swap_angle = 0.0;      // realized theta
    std::array<double, 4> vz_angles{};
    ErrorBudget error_budget;
};

GateMetrics extract_error_budget(const Matrix4c& u, const GateTarget& target);

}  // namespace gatecraft
