#include "gatecraft/gate_metrics.hpp"

#include "gatecraft/errors.hpp"

#include <cmath>
#include <limits>

namespace gatecraft {

Matrix4c GateTarget::ideal() const {
    const cplx ph = std::polar(1.0, -0.5 * zeta);
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    Matrix4c u = Matrix4c::Zero();
    u(0, 0) = ph;
    u(3, 3) = ph;
    u(1, 1) = c;
    u(2, 2) = c;
    u(1, 2) = cplx(0.0, -s);
    u(2, 1) = cplx(0.0, -s);
    return u;
}

GateFamily GateTarget::family() const {
    constexpr double tol = 1e-12;
    if (std::abs(theta) < tol) return GateFamily::cz;
    if (std::abs(theta - kPi) < tol) return GateFamily::iswap;
    if (std::abs(theta - 0.5 * kPi) < tol) return GateFamily::sqrt_iswap;
    return GateFamily::generic;
}

Matrix4c z_phase_gate(double a1, double a2) {
    Matrix4c z = Matrix4c::Zero();
    z(0, 0) = std::polar(1.0, a1 + a2);
    z(1, 1) = std::polar(1.0, a1 - a2);
    z(2, 2) = std::polar(1.0, -a1 + a2);
    z(3, 3) = std::polar(1.0, -a1 - a2);
    return z;
}

double gate_fidelity(const Matrix4c& u, const GateTarget& target) {
    const cplx overlap = (target.ideal().adjoint() * u).trace();
    return ((u.adjoint() * u).trace().real() + std::norm(overlap)) / 20.0;
}

namespace {

// Overlap Tr(target^dag Z_post u Z_pre) depends on the angles only through
// u = sum of all, v and w (see to_angles). Writing T(u,v,w) as a sum of
// e^{+-i x} terms makes the search three dimensional.
struct OverlapModel {
    std::array<cplx, 6> coef;  // A e^{iu}, B e^{-iu}, C e^{iv}, D e^{-iv}, E e^{iw}, G e^{-iw}
    std::array<bool, 3> active;

    OverlapModel(const Matrix4c& u, const Matrix4c& ideal) {
        auto c = [&](int r, int k) { return std::conj(ideal(r, k)) * u(r, k); };
        coef = {c(0, 0), c(3, 3), c(1, 1), c(2, 2), c(1, 2), c(2, 1)};
        for (int k = 0; k < 3; ++k)
            active[k] = std::abs(coef[2 * k]) + std::abs(coef[2 * k + 1]) > 0.0;
    }

    cplx value(const std::array<double, 3>& x) const {
        cplx t = 0.0;
        for (int k = 0; k < 3; ++k)
            t += coef[2 * k] * std::polar(1.0, x[k]) + coef[2 * k + 1] * std::polar(1.0, -x[k]);
        return t;
    }

    // f = |T|^2 with gradient and Hessian.
    double eval(const std::array<double, 3>& x, Eigen::Vector3d& g, Eigen::Matrix3d& h) const {
        std::array<cplx, 3> d1, d2;
        cplx t = 0.0;
        for (int k = 0; k < 3; ++k) {
            const cplx p = coef[2 * k] * std::polar(1.0, x[k]);
            const cplx m = coef[2 * k + 1] * std::polar(1.0, -x[k]);
            t += p + m;
            d1[k] = cplx(0.0, 1.0) * (p - m);
            d2[k] = -(p + m);
        }
        for (int a = 0; a < 3; ++a) {
            g(a) = 2.0 * std::real(std::conj(t) * d1[a]);
            for (int b = 0; b < 3; ++b) {
                h(a, b) = 2.0 * std::real(std::conj(d1[a]) * d1[b]);
                if (a == b) h(a, b) += 2.0 * std::real(std::conj(t) * d2[a]);
            }
        }
        return std::norm(t);
    }
};

std::array<double, 4> to_angles(const std::array<double, 3>& x) {
    const double u = x[0], v = x[1], w = x[2];
    // pre1, pre2, post1, post2
    return {(u + v - w) / 4.0, (u - v + w) / 4.0, (u + v + w) / 4.0, (u - v - w) / 4.0};
}

}  // namespace

VirtualZResult virtual_z_reduce(const Matrix4c& u, const GateTarget& target) {
    const OverlapModel model(u, target.ideal());

    // Coarse grid, then Newton on the active coordinates.
    constexpr int grid = 24;
    std::array<double, 3> best{0.0, 0.0, 0.0};
    double best_f = -1.0;
    const int nu = model.active[0] ? grid : 1;
    const int nv = model.active[1] ? grid : 1;
    const int nw = model.active[2] ? grid : 1;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < nw; ++k) {
                const std::array<double, 3> x{kTwoPi * i / grid, kTwoPi * j / grid,
                                              kTwoPi * k / grid};
                const double f = std::norm(model.value(x));
                if (f > best_f + 1e-14) {
                    best_f = f;
                    best = x;
                }
            }

    std::array<double, 3> x = best;
    Eigen::Vector3d g;
    Eigen::Matrix3d h;
    double f = model.eval(x, g, h);
    for (int it = 0; it < 100; ++it) {
        for (int k = 0; k < 3; ++k)
            if (!model.active[k]) {
                g(k) = 0.0;
                h.row(k).setZero();
                h.col(k).setZero();
                h(k, k) = -1.0;
            }
        if (g.norm() / 20.0 < 1e-13) break;
        // Newton step on a maximum; fall back to gradient ascent when the
        // Hessian is not negative definite.
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
        Eigen::Vector3d ev = es.eigenvalues();
        for (int k = 0; k < 3; ++k) ev(k) = -std::max(std::abs(ev(k)), 1e-8);
        Eigen::Vector3d step =
            -(es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose()) * g;
        double scale = 1.0;
        for (int ls = 0; ls < 40; ++ls) {
            std::array<double, 3> xn{x[0] + scale * step(0), x[1] + scale * step(1),
                                     x[2] + scale * step(2)};
            Eigen::Vector3d gn;
            Eigen::Matrix3d hn;
            const double fn = model.eval(xn, gn, hn);
            if (fn >= f - 1e-15) {
                x = xn;
                f = fn;
                g = gn;
                h = hn;
                break;
            }
            scale *= 0.5;
        }
    }
    for (int k = 0; k < 3; ++k)
        if (!model.active[k]) g(k) = 0.0;

    // (u,v,w) and (u+pi, v+pi, w+pi) give the same |T|; keep the smaller.
    std::array<double, 3> alt;
    double n0 = 0.0, n1 = 0.0;
    for (int k = 0; k < 3; ++k) {
        x[k] = wrap_angle(x[k]);
        alt[k] = wrap_angle(x[k] + kPi);
        n0 += x[k] * x[k];
        n1 += alt[k] * alt[k];
    }
    if (n1 < n0 - 1e-12) x = alt;

    VirtualZResult r;
    r.angles = to_angles(x);
    const Matrix4c pre = z_phase_gate(r.angles[0], r.angles[1]);
    const Matrix4c post = z_phase_gate(r.angles[2], r.angles[3]);
    r.reduced = post * u * pre;
    r.fidelity = gate_fidelity(r.reduced, target);
    r.gradient_norm = g.norm() / 20.0;
    return r;
}

double conditional_zz_phase(const Matrix4c& u, const GateTarget& target) {
    constexpr double floor = 1e-6;
    auto arg = [&](int r, int c) {
        if (std::abs(u(r, c)) <= floor)
            throw UndefinedPhase("conditional phase undefined: |U(" + std::to_string(r) + "," +
                                 std::to_string(c) + ")| below 1e-6");
        return std::arg(u(r, c));
    };
    if (!target.swap_type())
        return wrap_angle(-(arg(0, 0) + arg(3, 3) - arg(1, 1) - arg(2, 2)));
    return wrap_angle(kPi - (arg(0, 0) + arg(3, 3) - arg(1, 2) - arg(2, 1)));
}

GateMetrics extract_error_budget(const Matrix4c& u, const GateTarget& target) {
    GateMetrics m;
    const VirtualZResult vz = virtual_z_reduce(u, target);
    m.fidelity = vz.fidelity;
    m.vz_angles = vz.angles;
    m.error_budget.total_err = 1.0 - vz.fidelity;

    double zeta = std::numeric_limits<double>::quiet_NaN();
    try {
        zeta = conditional_zz_phase(u, target);
    } catch (const UndefinedPhase&) {
        try {
            zeta = conditional_zz_phase(u, GateTarget{0.0, 0.0});
        } catch (const UndefinedPhase&) {
        }
    }
    m.zeta_phase = zeta;
    const double dphi = std::isnan(zeta) ? 0.0 : wrap_angle(zeta - target.zeta);

    const double a11 = std::min(1.0, std::abs(u(3, 3)));
    m.leakage_angle = std::acos(a11);

    const double s = 0.5 * (std::abs(u(1, 2)) + std::abs(u(2, 1)));
    const double c = 0.5 * (std::abs(u(1, 1)) + std::abs(u(2, 2)));
    m.swap_angle = 2.0 * std::atan2(s, c);
    m.rotation_angle = 0.5 * (m.swap_angle - target.theta);

    const double se = std::sin(m.leakage_angle);
    const double sg = std::sin(m.rotation_angle);
    auto& b = m.error_budget;
    b.phase_err = 3.0 * dphi * dphi / 20.0;
    switch (target.family()) {
        case GateFamily::cz:
            b.leakage_err = se * se / 4.0;
            b.rotation_err = 2.0 * sg * sg / 5.0;
            break;
        case GateFamily::iswap:
            b.leakage_err = 0.0;
            b.rotation_err = 2.0 * sg * sg / 5.0;
            break;
        case GateFamily::sqrt_iswap:
        case GateFamily::generic: {
            const double s2 = std::sin(2.0 * m.rotation_angle);
            b.leakage_err = 9.0 * se * se / 40.0;
            b.rotation_err = 3.0 * s2 * s2 / 20.0;
            break;
        }
    }
    return m;
}

}  // namespace gatecraft
