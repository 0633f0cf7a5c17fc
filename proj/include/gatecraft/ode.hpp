#pragma once

#include "gatecraft/types.hpp"

#include <functional>
#include <limits>

namespace gatecraft {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  // 0 picks one automatically
    long max_steps = 50'000'000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
    double last_step = 0.0;
};

// dy/dt = f(t, y), written into dydt.
using MatrixRhs = std::function<void(double t, const ComplexMatrix& y, ComplexMatrix& dydt)>;

// Adaptive explicit Runge-Kutta of order 8 with the 5(3) embedded error
// estimate of Hairer and Wanner. Integrates y in place from t0 to t1.
// Throws NumericError when the step size underflows or max_steps is hit.
OdeStats integrate_dop853(const MatrixRhs& f, double t0, double t1, ComplexMatrix& y,
                          const OdeOptions& opt = {});

}  // namespace gatecraft
