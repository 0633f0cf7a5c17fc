#pragma once

#include <functional>
#include <vector>

namespace gatecraft {

struct SimplexOptions {
    double xtol = 1e-12;  // max vertex distance from the best vertex (inf-norm)
    double ftol = 1e-14;  // max objective spread across vertices
    int max_evaluations = 1000;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// Nelder-Mead downhill simplex with the usual reflection, expansion,
// contraction and shrink coefficients (1, 2, 1/2, 1/2). The initial simplex
// is x0 plus step[i] along each axis.
SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> x0, const std::vector<double>& step,
                               const SimplexOptions& opt = {});

}  // namespace gatecraft
