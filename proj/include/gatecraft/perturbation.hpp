#pragma once

#include "gatecraft/drive.hpp"
#include "gatecraft/spectrum.hpp"

#include <Eigen/Dense>

#include <map>
#include <vector>

namespace gatecraft {

// J_n(omega1 / omega_p) for n in {0, 1}.
double bessel_weight(int n, double omega1, double omega_p);

struct InteractionEntry {
    BareLabel lower;  // pair (lower, upper); omega0 = E(upper) - E(lower)
    BareLabel upper;
    double g0 = 0.0;
    double g1 = 0.0;
    double omega0 = 0.0;        // time-averaged pair frequency
    double delta_omega1 = 0.0;  // first harmonic of the pair frequency
};

struct InteractionTable {
    std::vector<InteractionEntry> entries;
    double g = 0.0;  // harmonic exchange scale j_c / (4 sqrt(xi_F xi_T))
    double lambda_fixed = 0.0, lambda_tunable = 0.0;  // exact/harmonic n01
    double Lambda_fixed = 0.0, Lambda_tunable = 0.0;  // exact n12 / (sqrt2 harmonic n01)
};

// Eight exchange and pair-creation terms between the lowest three levels.
InteractionTable interaction_table(const CoupledSystem& sys, const DriveSchedule& s);

struct StateRate {
    double rate_m0 = 0.0;
    double rate_m1 = 0.0;
    double total() const { return rate_m0 + rate_m1; }
};

struct ZZEstimate {
    std::map<BareLabel, StateRate> per_state;  // phase rates in GHz
    double zeta_rate = 0.0;     // 00 + 11 - 01 - 10
    double zeta_rate_m0 = 0.0;
    double zeta_rate_m1 = 0.0;
    double zeta_phase = 0.0;    // 2 pi zeta_rate t_gate
    std::vector<std::pair<BareLabel, BareLabel>> divergent;  // skipped near-resonant terms
};

ZZEstimate zz_rate_estimate(const InteractionTable& table, double omega_p, double t_gate);

// Off-resonant Rabi rotation over t with coupling g_eff and detuning delta (GHz).
Eigen::Matrix2cd rabi_offres_unitary(double g_eff, double delta, double t);

struct LocalReduction {
    double swap_magnitude = 0.0;
    double gamma = 0.0;         // residual phase of the rotation
    Eigen::Matrix2cd reduced;   // real non-negative diagonal, off-diagonals i*|u01|
    double residual = 0.0;      // off-diagonal phase error left by the gamma conjugation
};

LocalReduction local_equivalence_reduce(const Eigen::Matrix2cd& u);

double swap_condition_lhs(double g_eff, double delta, double t);

struct SwapConditionScan {
    std::vector<double> g_values, delta_values;
    Eigen::MatrixXd lhs;              // rows g, columns delta
    std::vector<double> max_abs;      // per g, over delta
    std::vector<std::pair<double, double>> crossings;  // (g, delta) where |lhs| = 1/sqrt2
};

SwapConditionScan swap_condition_scan(const std::vector<double>& g_values,
                                      const std::vector<double>& delta_values, double t);

}  // namespace gatecraft
