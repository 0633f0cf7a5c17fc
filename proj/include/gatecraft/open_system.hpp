#pragma once

#include "gatecraft/drive.hpp"
#include "gatecraft/evolution.hpp"
#include "gatecraft/gate_metrics.hpp"
#include "gatecraft/spectrum.hpp"

#include <limits>
#include <string>
#include <vector>

namespace gatecraft {

// literal_eq16: (1/T1) sum(2 c rho c^dag - {c^dag c, rho}), population decays at 2/T1.
// standard_t1: half of that, population decays at 1/T1.
enum class RateConvention { standard_t1, literal_eq16 };

std::string to_string(RateConvention r);
RateConvention rate_convention_from_string(const std::string& s);

struct LindbladConfig {
    double t1_fixed = std::numeric_limits<double>::infinity();    // us
    double t1_tunable = std::numeric_limits<double>::infinity();  // us
    int level_truncation = 2;  // lowering operators for levels j -> j-1, j <= level_truncation
    RateConvention rate_convention = RateConvention::standard_t1;
    bool operator==(const LindbladConfig&) const = default;
};

void validate(const LindbladConfig& cfg, const TruncationConfig& trunc,
              const std::string& path = "lindblad");

// One lowering operator as a sparse list of dressed-basis transitions b -> a.
struct CollapseOperator {
    int qubit = 0;  // 0 fixed, 1 tunable
    int level = 0;  // lowers level+1 to level
    double rate = 0.0;  // 1/ns multiplying c rho c^dag - {c^dag c, rho}/2
    struct Term {
        int to, from;
        double weight;
    };
    std::vector<Term> terms;
};

std::vector<CollapseOperator> collapse_operators(const CoupledSystem& sys, const LindbladConfig& cfg);

// Density matrix in the dressed frame at t_gate.
ComplexMatrix propagate_lindblad(const CoupledSystem& sys, const DriveSchedule& s,
                                 const LindbladConfig& cfg, const ComplexMatrix& rho0,
                                 const PropagationOptions& opt = {});

using Matrix16c = Eigen::Matrix<cplx, 16, 16>;

struct ProcessMap {
    Matrix16c superoperator;  // column k + 4l holds vec(map(|k><l|)), column-major
    Matrix16c chi;            // Pauli basis sigma_a x sigma_b, index 4a + b
    double trace_chi = 0.0;
};

ProcessMap process_map_from_superoperator(const Matrix16c& superop);
ProcessMap unitary_process_map(const Matrix4c& u);

// F_p = chi_ideal . chi.
double process_fidelity_of(const ProcessMap& m, const GateTarget& target);
// [4 F_p + Tr chi] / 5
double average_fidelity_of(const ProcessMap& m, const GateTarget& target);

struct ProcessFidelity {
    double f_p = 0.0;
    double fidelity = 0.0;
    ProcessMap map;
    std::array<double, 4> vz_angles{};
    double unitary_fidelity = 0.0;  // closed system, same virtual Z frame
};

ProcessFidelity process_fidelity(const CoupledSystem& sys, const DriveSchedule& s,
                                 const LindbladConfig& cfg, const GateTarget& target,
                                 const PropagationOptions& opt = {});

struct T1Scan {
    std::vector<double> t1;          // us
    std::vector<double> infidelity;  // 1 - F
    std::vector<double> analytic;    // 4 t_gate / (5 T1)
    double unitary_infidelity = 0.0;
    double threshold_1e3 = std::numeric_limits<double>::quiet_NaN();    // us
    double threshold_5_7e3 = std::numeric_limits<double>::quiet_NaN();  // us
};

// Both qubits share T1; the T1 fields of base are ignored. Thresholds are interpolated log-log; NaN without a crossing.
T1Scan t1_threshold_scan(const CoupledSystem& sys, const DriveSchedule& s, const GateTarget& target,
                         const std::vector<double>& t1_grid, const LindbladConfig& base = {},
                         const PropagationOptions& opt = {});

double crossing_point(const std::vector<double>& t1, const std::vector<double>& err, double level);

}  // namespace gatecraft
