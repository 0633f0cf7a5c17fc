#include "gatecraft/evolution.hpp"

#include "gatecraft/errors.hpp"

#include <cmath>
#include <sstream>

namespace gatecraft {

InteractionFrameRhs::InteractionFrameRhs(const CoupledSystem& sys,
                                         std::function<double(double)> coefficient)
    : energies_(sys.dressed_energies()),
      v_(sys.v_dressed()),
      coefficient_(std::move(coefficient)),
      phase_(sys.dim()) {
    const double vmax = v_.cwiseAbs().maxCoeff();
    for (int a = 0; a < sys.dim(); ++a)
        for (int b = 0; b < a; ++b)
            if (std::abs(v_(a, b)) > 1e-6 * vmax)
                max_frequency_ = std::max(max_frequency_, std::abs(energies_(a) - energies_(b)));
}

void InteractionFrameRhs::operator()(double t, const ComplexMatrix& y, ComplexMatrix& dydt) const {
    const double c = coefficient_(t);
    if (c == 0.0) {
        dydt.setZero(y.rows(), y.cols());
        return;
    }
    for (Eigen::Index a = 0; a < energies_.size(); ++a)
        phase_(a) = std::polar(1.0, kTwoPi * energies_(a) * t);
    scratch_.noalias() = phase_.conjugate().asDiagonal() * y;
    dydt.noalias() = v_ * scratch_;
    dydt = (cplx(0.0, -kTwoPi * c) * phase_).asDiagonal() * dydt;
}

OdeOptions ode_options_for(const InteractionFrameRhs& rhs, const PropagationOptions& opt) {
    OdeOptions o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    if (rhs.max_frequency() > 0.0) o.max_step = 0.5 / rhs.max_frequency();
    return o;
}

ComplexMatrix to_dressed_frame(const CoupledSystem& sys, const ComplexMatrix& y, double t) {
    ComplexVector p(sys.dim());
    for (int a = 0; a < sys.dim(); ++a) p(a) = std::polar(1.0, -kTwoPi * sys.dressed_energies()(a) * t);
    return p.asDiagonal() * y;
}

namespace {

ComplexVector frame_phases(const CoupledSystem& sys, double t) {
    ComplexVector p(sys.dim());
    for (int a = 0; a < sys.dim(); ++a) p(a) = std::polar(1.0, kTwoPi * sys.dressed_energies()(a) * t);
    return p;
}

void accumulate(OdeStats& into, const OdeStats& st) {
    into.accepted += st.accepted;
    into.rejected += st.rejected;
    into.rhs_evals += st.rhs_evals;
    into.last_step = st.last_step;
}

// Plateau periods below which direct integration is cheaper than building a
// full one-period propagator.
constexpr int kMinPeriods = 12;

ComplexMatrix integrate_columns(const CoupledSystem& sys, const DriveSchedule& s,
                                ComplexMatrix y, const PropagationOptions& opt, OdeStats* stats) {
    validate(s);
    InteractionFrameRhs rhs(sys, [&s](double t) { return ej_offset(s, t); });
    const OdeOptions o = ode_options_for(rhs, opt);
    auto f = [&rhs](double t, const ComplexMatrix& yy, ComplexMatrix& dy) { rhs(t, yy, dy); };
    const double tg = s.envelope.t_gate;
    OdeStats total;

    // On the plateau a one-tone drive is exactly periodic, so the lab-frame
    // propagator over N periods is the N-th power of the one-period one.
    const double t_left = s.envelope.t_left();
    const double period = s.tones.size() == 1 ? 1.0 / s.tones[0].omega_p : 0.0;
    const long periods =
        period > 0.0 ? static_cast<long>(std::floor((s.envelope.t_right() - t_left) / period)) : 0;
    if (periods >= kMinPeriods) {
        accumulate(total, integrate_dop853(f, 0.0, t_left, y, o));
        ComplexMatrix one = ComplexMatrix::Identity(sys.dim(), sys.dim());
        accumulate(total, integrate_dop853(f, t_left, t_left + period, one, o));
        const ComplexVector p0 = frame_phases(sys, t_left);
        const ComplexVector p1 = frame_phases(sys, t_left + period);
        ComplexMatrix base = p1.conjugate().asDiagonal() * one * p0.asDiagonal();
        ComplexMatrix ys = p0.conjugate().asDiagonal() * y;
        for (long n = periods; n > 0; n >>= 1) {
            if (n & 1) ys = (base * ys).eval();
            if (n > 1) base = (base * base).eval();
        }
        const double t_mid = t_left + periods * period;
        y = frame_phases(sys, t_mid).asDiagonal() * ys;
        accumulate(total, integrate_dop853(f, t_mid, tg, y, o));
    } else {
        total = integrate_dop853(f, 0.0, tg, y, o);
    }
    if (stats) *stats = total;
    return to_dressed_frame(sys, y, tg);
}

Matrix4c extract_comp(const CoupledSystem& sys, const ComplexMatrix& u, bool columns_only) {
    const auto idx = sys.computational_indices();
    Matrix4c c;
    for (int r = 0; r < 4; ++r)
        for (int k = 0; k < 4; ++k) c(r, k) = u(idx[r], columns_only ? k : idx[k]);
    return c;
}

}  // namespace

namespace {

// Integrates the given columns, tightening the tolerances up to twice when
// the result misses the orthonormality limit.
ComplexMatrix integrate_checked(const CoupledSystem& sys, const DriveSchedule& s, const ComplexMatrix& y0,
                                const PropagationOptions& opt, OdeStats* stats, double& defect) {
    PropagationOptions o = opt;
    for (int attempt = 0;; ++attempt) {
        ComplexMatrix y = integrate_columns(sys, s, y0, o, stats);
        const Eigen::Index n = y.cols();
        defect = (y.adjoint() * y - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
        if (defect <= opt.defect_limit || attempt == 2) return y;
        o.rtol *= 0.1;
        o.atol *= 0.1;
    }
}

}  // namespace

Propagator propagate_unitary(const CoupledSystem& sys, const DriveSchedule& s,
                             const PropagationOptions& opt) {
    Propagator p;
    p.full = integrate_checked(sys, s, ComplexMatrix::Identity(sys.dim(), sys.dim()), opt, &p.stats,
                               p.unitarity_defect);
    p.comp = extract_comp(sys, p.full, false);
    if (p.unitarity_defect > opt.defect_limit) {
        std::ostringstream os;
        os << "propagator unitarity defect " << p.unitarity_defect << " exceeds "
           << opt.defect_limit;
        throw NumericError(os.str(), p.unitarity_defect);
    }
    return p;
}

Matrix4c propagate_computational(const CoupledSystem& sys, const DriveSchedule& s,
                                 const PropagationOptions& opt) {
    const auto idx = sys.computational_indices();
    ComplexMatrix y = ComplexMatrix::Zero(sys.dim(), 4);
    for (int k = 0; k < 4; ++k) y(idx[k], k) = 1.0;
    double defect = 0.0;
    const ComplexMatrix u = integrate_checked(sys, s, y, opt, nullptr, defect);
    if (defect > opt.defect_limit) {
        std::ostringstream os;
        os << "propagated columns lost orthonormality by " << defect;
        throw NumericError(os.str(), defect);
    }
    return extract_comp(sys, u, true);
}

std::vector<PopulationSample> population_trace(const CoupledSystem& sys, const DriveSchedule& s,
                                               BareLabel initial, double sample_dt,
                                               const PropagationOptions& opt) {
    validate(s);
    if (!(sample_dt > 0.0)) throw InvalidParameter("sample_dt: must be positive");
    InteractionFrameRhs rhs(sys, [&s](double t) { return ej_offset(s, t); });
    const OdeOptions o = ode_options_for(rhs, opt);
    auto f = [&rhs](double t, const ComplexMatrix& yy, ComplexMatrix& dy) { rhs(t, yy, dy); };

    ComplexMatrix y = ComplexMatrix::Zero(sys.dim(), 1);
    y(sys.index_of(initial), 0) = 1.0;
    const double tg = s.envelope.t_gate;
    const int n = static_cast<int>(std::ceil(tg / sample_dt - 1e-9));

    std::vector<PopulationSample> out;
    auto record = [&](double t) {
        PopulationSample ps;
        ps.t = t;
        ps.populations.assign(sys.dim(), 0.0);
        // Interaction-frame phases do not change populations.
        for (int c = 0; c < sys.dim(); ++c)
            ps.populations[sys.bare_index(sys.label_of(c))] = std::norm(y(c, 0));
        out.push_back(std::move(ps));
    };
    record(0.0);
    double t = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double tn = std::min(tg, k * sample_dt);
        integrate_dop853(f, t, tn, y, o);
        t = tn;
        record(t);
    }
    return out;
}

}  // namespace gatecraft
