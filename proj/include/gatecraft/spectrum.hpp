#pragma once

#include "gatecraft/types.hpp"

#include <array>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace gatecraft {

// Energies are linear frequencies E/h in GHz.
struct QubitParams {
    double e_c = 0.0;
    double e_j = 0.0;
    bool operator==(const QubitParams&) const = default;
};

void validate(const QubitParams& q, std::string_view path = "qubit");
bool in_transmon_regime(const QubitParams& q);

struct CircuitParams {
    QubitParams fixed;
    QubitParams tunable;  // e_j is the static operating point
    double j_c = 0.0;
    bool operator==(const CircuitParams&) const = default;
};

void validate(const CircuitParams& p, std::string_view path = "circuit");
// Soft problems that do not prevent a simulation.
std::vector<std::string> circuit_warnings(const CircuitParams& p);

struct TruncationConfig {
    int charge_cutoff = 20;
    int levels_per_qubit = 6;
    bool operator==(const TruncationConfig&) const = default;
};

void validate(const TruncationConfig& t, std::string_view path = "truncation");

// Product-state label |fixed, tunable>.
struct BareLabel {
    int fixed = 0;
    int tunable = 0;
    auto operator<=>(const BareLabel&) const = default;
    std::string str() const { return std::to_string(fixed) + std::to_string(tunable); }
};

struct SpectrumTable {
    std::vector<double> levels;           // ground state at zero
    std::vector<double> transitions;      // i -> i+1
    std::vector<double> anharmonicities;  // w(i,i+1) - w(i+1,i+2)
};

struct QubitEigensystem {
    SpectrumTable spectrum;
    RealMatrix vectors;  // charge basis, one column per retained level
};

RealMatrix charge_operator(int cutoff);
// Charge-basis form of -cos(phi).
RealMatrix minus_cos_phi(int cutoff);
RealMatrix build_charge_hamiltonian(const QubitParams& q, int cutoff);
QubitEigensystem diagonalize_qubit(const QubitParams& q, const TruncationConfig& trunc);

// Two capacitively coupled qubits in the product of their static eigenbases.
// Basis index of |i,j> is i*d + j. Immutable once built.
class CoupledSystem {
public:
    CoupledSystem(const CircuitParams& p, const TruncationConfig& trunc);

    const CircuitParams& params() const { return params_; }
    const TruncationConfig& truncation() const { return trunc_; }
    int levels() const { return trunc_.levels_per_qubit; }
    int dim() const { return levels() * levels(); }
    double ej_static() const { return params_.tunable.e_j; }

    const QubitEigensystem& fixed_qubit() const { return fixed_; }
    const QubitEigensystem& tunable_qubit() const { return tunable_; }

    const RealMatrix& h_static() const { return h_static_; }
    const RealMatrix& v_drive() const { return v_drive_; }
    const RealMatrix& n_fixed() const { return n_fixed_; }
    const RealMatrix& n_tunable() const { return n_tunable_; }

    // Ascending eigenvalues of h_static and the matching eigenvectors (columns).
    const RealVector& dressed_energies() const { return energies_; }
    const RealMatrix& dressed_vectors() const { return vectors_; }
    // v_drive in the dressed eigenbasis.
    const RealMatrix& v_dressed() const { return v_dressed_; }

    BareLabel label_of(int dressed_index) const { return labels_.at(dressed_index); }
    int index_of(BareLabel b) const;
    double energy(BareLabel b) const { return energies_(index_of(b)); }
    // |<bare b | dressed(b)>|^2
    double overlap(BareLabel b) const;
    int bare_index(BareLabel b) const { return b.fixed * levels() + b.tunable; }

    // Exact Hamiltonian in the same product basis with the tunable qubit at ej.
    RealMatrix hamiltonian_at(double ej_tunable) const;

    // Dressed indices of 00, 01, 10, 11.
    std::array<int, 4> computational_indices() const;

private:
    void assign_labels();

    CircuitParams params_;
    TruncationConfig trunc_;
    QubitEigensystem fixed_, tunable_;
    RealMatrix h_fixed_, h_tunable_;  // single-qubit blocks in their eigenbases
    RealMatrix h_static_, v_drive_, n_fixed_, n_tunable_;
    RealVector energies_;
    RealMatrix vectors_, v_dressed_;
    std::vector<BareLabel> labels_;
    std::vector<int> dressed_by_bare_;
};

// E(b) - E(a) from dressed energies.
double transition_frequency(const CoupledSystem& sys, BareLabel a, BareLabel b);

// E00 + E11 - E01 - E10 in GHz.
double static_zz_rate(const CoupledSystem& sys);

struct ExchangeCoupling {
    double matrix_element;   // |<01|j_c nF nT|10>| on dressed states
    double harmonic_form;    // j_c (EJF/32ECF)^(1/4) (EJT/32ECT)^(1/4)
    double printed_form;     // 4 j_c (EJF EJT / 4 ECF ECT)^(1/4), kept for reference
};

ExchangeCoupling effective_exchange_g(const CoupledSystem& sys);

}  // namespace gatecraft
