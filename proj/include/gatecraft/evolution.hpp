#pragma once

#include "gatecraft/drive.hpp"
#include "gatecraft/ode.hpp"
#include "gatecraft/spectrum.hpp"

#include <functional>
#include <vector>

namespace gatecraft {

struct PropagationOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    // Unitarity defect above which propagate_unitary throws.
    double defect_limit = 1e-9;
    bool operator==(const PropagationOptions&) const = default;
};

struct Propagator {
    ComplexMatrix full;    // dressed frame, d^2 x d^2
    Matrix4c comp;         // rows/cols ordered 00, 01, 10, 11
    double unitarity_defect = 0.0;
    OdeStats stats;
};

// Right-hand side of the Schrodinger equation in the interaction frame of the
// diagonal static Hamiltonian: dY/dt = -i 2pi c(t) P(t) V P(t)^* Y, with
// P = diag(exp(i 2pi E t)) and c(t) the E_J offset of the tunable qubit.
class InteractionFrameRhs {
public:
    InteractionFrameRhs(const CoupledSystem& sys, std::function<double(double)> coefficient);
    void operator()(double t, const ComplexMatrix& y, ComplexMatrix& dydt) const;
    // Largest dressed transition frequency coupled by the drive.
    double max_frequency() const { return max_frequency_; }

private:
    const RealVector& energies_;
    const RealMatrix& v_;
    std::function<double(double)> coefficient_;
    double max_frequency_ = 0.0;
    mutable ComplexVector phase_;
    mutable ComplexMatrix scratch_;
};

OdeOptions ode_options_for(const InteractionFrameRhs& rhs, const PropagationOptions& opt);

// Convert an interaction-frame state at time t to the dressed frame.
ComplexMatrix to_dressed_frame(const CoupledSystem& sys, const ComplexMatrix& y, double t);

Propagator propagate_unitary(const CoupledSystem& sys, const DriveSchedule& s,
                             const PropagationOptions& opt = {});

// Only the four computational columns are integrated; cheaper, same accuracy.
Matrix4c propagate_computational(const CoupledSystem& sys, const DriveSchedule& s,
                                 const PropagationOptions& opt = {});

struct PopulationSample {
    double t = 0.0;
    std::vector<double> populations;  // indexed by bare index i*d + j
};

std::vector<PopulationSample> population_trace(const CoupledSystem& sys, const DriveSchedule& s,
                                               BareLabel initial, double sample_dt,
                                               const PropagationOptions& opt = {});

}  // namespace gatecraft
