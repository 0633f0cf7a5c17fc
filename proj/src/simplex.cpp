#include "gatecraft/simplex.hpp"

#include "gatecraft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gatecraft {

SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> x0, const std::vector<double>& step,
                               const SimplexOptions& opt) {
    const std::size_t n = x0.size();
    if (n == 0 || step.size() != n) throw InvalidParameter("simplex: step must match x0");

    SimplexResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        return f(x);
    };

    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> val(n + 1);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    auto blend = [&](std::vector<double>& out, double coef, const std::vector<double>& worst) {
        for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + coef * (worst[k] - centroid[k]);
    };

    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
        {
            std::vector<std::vector<double>> p2(n + 1);
            std::vector<double> v2(n + 1);
            for (std::size_t i = 0; i <= n; ++i) {
                p2[i] = pts[order[i]];
                v2[i] = val[order[i]];
            }
            pts.swap(p2);
            val.swap(v2);
        }

        double xspread = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                xspread = std::max(xspread, std::abs(pts[i][k] - pts[0][k]));
        const double fspread = val[n] - val[0];
        if (xspread <= opt.xtol && fspread <= opt.ftol) {
            res.converged = true;
            break;
        }
        // A step costs two evaluations, a shrink n more; never exceed the budget.
        if (res.evaluations + 2 > opt.max_evaluations) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);

        blend(xr, -1.0, pts[n]);
        const double fr = eval(xr);
        if (fr < val[0]) {
            blend(xe, -2.0, pts[n]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[n] = xe;
                val[n] = fe;
            } else {
                pts[n] = xr;
                val[n] = fr;
            }
            continue;
        }
        if (fr < val[n - 1]) {
            pts[n] = xr;
            val[n] = fr;
            continue;
        }
        const bool outside = fr < val[n];
        blend(xc, outside ? -0.5 : 0.5, pts[n]);
        const double fc = eval(xc);
        if (fc < (outside ? fr : val[n])) {
            pts[n] = xc;
            val[n] = fc;
            continue;
        }
        if (res.evaluations + static_cast<int>(n) > opt.max_evaluations) break;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
            val[i] = eval(pts[i]);
        }
    }
    res.x = pts[0];
    res.value = val[0];
    return res;
}

}  // namespace gatecraft
