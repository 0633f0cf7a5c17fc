#include "gatecraft/perturbation.hpp"

#include "gatecraft/errors.hpp"

#include <cmath>

namespace gatecraft {

double bessel_weight(int n, double omega1, double omega_p) {
    if (!(omega_p > 0.0)) throw InvalidParameter("omega_p: must be positive");
    const double x = omega1 / omega_p;
    switch (n) {
        case 0: return std::cyl_bessel_j(0.0, std::abs(x));
        case 1: return x < 0.0 ? -std::cyl_bessel_j(1.0, -x) : std::cyl_bessel_j(1.0, x);
        default: throw InvalidParameter("bessel_weight: only orders 0 and 1 are supported");
    }
}

namespace {

struct QubitFactors {
    double xi, lambda, Lambda;
};

QubitFactors factors(const QubitParams& q, const QubitEigensystem& es, int cutoff) {
    const RealMatrix n = es.vectors.transpose() * charge_operator(cutoff) * es.vectors;
    const double harm = std::pow(q.e_j / (32.0 * q.e_c), 0.25);
    return {std::sqrt(2.0 * q.e_c / q.e_j), std::abs(n(0, 1)) / harm,
            std::abs(n(1, 2)) / (std::sqrt(2.0) * harm)};
}

}  // namespace

InteractionTable interaction_table(const CoupledSystem& sys, const DriveSchedule& s) {
    validate(s);
    if (s.tones.size() != 1)
        throw UnsupportedSchedule("interaction table needs a one-tone drive");
    const auto& p = sys.params();
    const int cut = sys.truncation().charge_cutoff;
    const QubitFactors f = factors(p.fixed, sys.fixed_qubit(), cut);
    const QubitFactors t = factors(p.tunable, sys.tunable_qubit(), cut);
    const auto th = level_harmonics(s, p.tunable, sys.truncation(), 1);
    const auto& fl = sys.fixed_qubit().spectrum.levels;

    InteractionTable tab;
    tab.g = p.j_c / (4.0 * std::sqrt(f.xi * t.xi));
    tab.lambda_fixed = f.lambda;
    tab.lambda_tunable = t.lambda;
    tab.Lambda_fixed = f.Lambda;
    tab.Lambda_tunable = t.Lambda;

    const double r2 = std::sqrt(2.0);
    struct Row {
        BareLabel a, b;
        double coef;
    };
    const Row rows[] = {
        {{0, 0}, {1, 1}, -f.lambda * t.lambda},
        {{0, 1}, {1, 0}, f.lambda * t.lambda},
        {{1, 1}, {2, 2}, -2.0 * f.Lambda * t.Lambda},
        {{1, 2}, {2, 1}, 2.0 * f.Lambda * t.Lambda},
        {{0, 1}, {1, 2}, -r2 * f.lambda * t.Lambda},
        {{0, 2}, {1, 1}, r2 * f.lambda * t.Lambda},
        {{1, 0}, {2, 1}, -r2 * f.Lambda * t.lambda},
        {{1, 1}, {2, 0}, r2 * f.Lambda * t.lambda},
    };
    const double wp = s.tones[0].omega_p;
    auto level = [&](BareLabel b) { return fl[b.fixed] + th[b.tunable].omega_bar; };
    auto harmonic = [&](BareLabel b) { return th[b.tunable].delta_omega[0]; };
    for (const Row& r : rows) {
        InteractionEntry e;
        e.lower = r.a;
        e.upper = r.b;
        e.omega0 = level(r.b) - level(r.a);
        e.delta_omega1 = harmonic(r.b) - harmonic(r.a);
        e.g0 = r.coef * tab.g * bessel_weight(0, e.delta_omega1, wp);
        e.g1 = r.coef * tab.g * bessel_weight(1, e.delta_omega1, wp);
        tab.entries.push_back(e);
    }
    return tab;
}

ZZEstimate zz_rate_estimate(const InteractionTable& table, double omega_p, double t_gate) {
    ZZEstimate est;
    const BareLabel comp[] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (BareLabel s : comp) {
        StateRate r;
        for (const auto& e : table.entries) {
            double delta;
            if (e.lower == s) delta = e.omega0;
            else if (e.upper == s) delta = -e.omega0;
            else continue;
            r.rate_m0 += e.g0 * e.g0 / delta;
            if (e.g1 == 0.0) continue;
            const double denom = delta * delta - omega_p * omega_p;
            if (std::abs(denom) < 100.0 * e.g1 * e.g1) {
                est.divergent.emplace_back(e.lower, e.upper);
                continue;
            }
            r.rate_m1 += 2.0 * delta * e.g1 * e.g1 / denom;
        }
        est.per_state[s] = r;
    }
    auto combo = [&](auto part) {
        return part(est.per_state[{0, 0}]) + part(est.per_state[{1, 1}]) -
               part(est.per_state[{0, 1}]) - part(est.per_state[{1, 0}]);
    };
    est.zeta_rate_m0 = combo([](const StateRate& r) { return r.rate_m0; });
    est.zeta_rate_m1 = combo([](const StateRate& r) { return r.rate_m1; });
    est.zeta_rate = combo([](const StateRate& r) { return r.total(); });
    est.zeta_phase = kTwoPi * est.zeta_rate * t_gate;
    return est;
}

Eigen::Matrix2cd rabi_offres_unitary(double g_eff, double delta, double t) {
    const double omega = std::hypot(g_eff, delta);
    const double x = kPi * omega * t;  // half the rotation angle
    const double c = std::cos(x);
    const double sn = std::sin(x);
    const double rd = omega > 0.0 ? delta / omega : 0.0;
    const double rg = omega > 0.0 ? g_eff / omega : 0.0;
    const cplx ph = std::polar(1.0, kPi * delta * t);
    const cplx i(0.0, 1.0);
    Eigen::Matrix2cd u;
    u(0, 0) = ph * (c - i * rd * sn);
    u(0, 1) = i * ph * rg * sn;
    u(1, 0) = i * std::conj(ph) * rg * sn;
    u(1, 1) = std::conj(ph) * (c + i * rd * sn);
    return u;
}

LocalReduction local_equivalence_reduce(const Eigen::Matrix2cd& u) {
    if ((u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-8)
        throw InvalidParameter("local_equivalence_reduce: input is not unitary");
    // Strip the global phase so u is special unitary:
    // [[r e^{i alpha}, i s e^{i beta}], [i s e^{-i beta}, r e^{-i alpha}]].
    const Eigen::Matrix2cd su = std::polar(1.0, -0.5 * std::arg(u.determinant())) * u;
    LocalReduction out;
    out.swap_magnitude = std::abs(su(0, 1));
    const double alpha = std::abs(su(0, 0)) > 1e-12 ? std::arg(su(0, 0)) : 0.0;
    const double beta = out.swap_magnitude > 1e-12 ? std::arg(su(0, 1)) - 0.5 * kPi : alpha;
    out.gamma = wrap_angle(alpha - beta);

    // Equal and opposite diagonal phases leave e^{-+i gamma} on the
    // off-diagonals; conjugating by diag(e^{i gamma/2}, e^{-i gamma/2})
    // removes them.
    Eigen::Matrix2cd m = su;
    m.row(0) *= std::polar(1.0, -alpha);
    m.row(1) *= std::polar(1.0, alpha);
    Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
    d(0, 0) = std::polar(1.0, 0.5 * out.gamma);
    d(1, 1) = std::polar(1.0, -0.5 * out.gamma);
    m = (d * m * d.adjoint()).eval();
    out.reduced = m;
    out.residual = out.swap_magnitude > 1e-12
                       ? std::max(std::abs(wrap_angle(std::arg(m(0, 1)) - 0.5 * kPi)),
                                  std::abs(wrap_angle(std::arg(m(1, 0)) - 0.5 * kPi)))
                       : 0.0;
    return out;
}

double swap_condition_lhs(double g_eff, double delta, double t) {
    const double omega = std::hypot(g_eff, delta);
    if (omega == 0.0) return 0.0;
    return g_eff / omega * std::sin(kPi * omega * t);
}

SwapConditionScan swap_condition_scan(const std::vector<double>& g_values,
                                      const std::vector<double>& delta_values, double t) {
    SwapConditionScan sc;
    sc.g_values = g_values;
    sc.delta_values = delta_values;
    const Eigen::Index ng = static_cast<Eigen::Index>(g_values.size());
    const Eigen::Index nd = static_cast<Eigen::Index>(delta_values.size());
    sc.lhs.resize(ng, nd);
    const double level = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < ng; ++i) {
        double mx = 0.0;
        for (Eigen::Index j = 0; j < nd; ++j) {
            sc.lhs(i, j) = swap_condition_lhs(g_values[i], delta_values[j], t);
            mx = std::max(mx, std::abs(sc.lhs(i, j)));
            if (j > 0) {
                const double a = std::abs(sc.lhs(i, j - 1)) - level;
                const double b = std::abs(sc.lhs(i, j)) - level;
                if ((a < 0.0) != (b < 0.0)) {
                    const double w = a / (a - b);
                    sc.crossings.emplace_back(
                        g_values[i], delta_values[j - 1] + w * (delta_values[j] - delta_values[j - 1]));
                }
            }
        }
        sc.max_abs.push_back(mx);
    }
    return sc;
}

}  // namespace gatecraft
