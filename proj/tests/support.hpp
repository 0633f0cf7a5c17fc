#pragma once

#include "gatecraft/spectrum.hpp"

#include <cmath>
#include <vector>

namespace gatecraft::testing {

// E_C = 0.2 GHz for both qubits, fixed E_J = 20 GHz, tunable E_J = ratio * E_C.
inline CircuitParams reference_circuit(double j_c = 0.010, double ratio = 78.0) {
    return {{0.2, 20.0}, {0.2, 0.2 * ratio}, j_c};
}

inline CoupledSystem reference_system(double j_c = 0.010, double ratio = 78.0, int levels = 6,
                                  int cutoff = 20) {
    return CoupledSystem(reference_circuit(j_c, ratio), {cutoff, levels});
}

using Vec4 = Eigen::Matrix<cplx, 4, 1>;

// The 60 two-qubit stabilizer states: the orbit of |00> under H, S and CZ.
// They form a 3-design, so averages over them are exact for gate fidelities.
inline std::vector<Vec4> stabilizer_states() {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd h, s;
    h << r, r, r, -r;
    s << 1, 0, 0, cplx(0, 1);
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
        Matrix4c k;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) k(i, j) = a(i / 2, j / 2) * b(i % 2, j % 2);
        return k;
    };
    Matrix4c cz = Matrix4c::Identity();
    cz(3, 3) = -1.0;
    const std::vector<Matrix4c> gens{kron(h, id), kron(id, h), kron(s, id), kron(id, s), cz};
    auto canonical = [](Vec4 v) {
        for (int k = 0; k < 4; ++k)
            if (std::abs(v(k)) > 1e-9) return Vec4(v * std::polar(1.0, -std::arg(v(k))));
        return v;
    };
    std::vector<Vec4> states{Vec4(1, 0, 0, 0)};
    for (size_t k = 0; k < states.size(); ++k)
        for (const auto& g : gens) {
            const Vec4 v = canonical(g * states[k]);
            bool seen = false;
            for (const auto& w : states) seen = seen || (v - w).norm() < 1e-9;
            if (!seen) states.push_back(v);
        }
    return states;
}

}  // namespace gatecraft::testing
