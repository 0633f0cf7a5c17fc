#include "gatecraft/errors.hpp"
#include "gatecraft/evolution.hpp"
#include "support.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace gatecraft;
using gatecraft::testing::reference_system;

namespace {

DriveSchedule drive(const CoupledSystem& sys, double delta, double omega, double t_gate = 75.0) {
    DriveSchedule s;
    s.ej_static = sys.ej_static();
    s.envelope = {t_gate, 10.0};
    s.tones = {{delta, omega}};
    return s;
}

// Fourth-order commutator-free Magnus product of the lab-frame Hamiltonian,
// rotated into the dressed basis.
ComplexMatrix magnus_oracle(const CoupledSystem& sys, const DriveSchedule& s, int steps) {
    const double tg = s.envelope.t_gate;
    const double h = tg / steps;
    const double r = std::sqrt(3.0) / 6.0;
    const double a1 = 0.25 + r, a2 = 0.25 - r;
    const int n = sys.dim();
    ComplexMatrix u = ComplexMatrix::Identity(n, n);
    for (int k = 0; k < steps; ++k) {
        const double t = k * h;
        const RealMatrix h1 = sys.hamiltonian_at(ej_of_t(s, t + (0.5 - r) * h));
        const RealMatrix h2 = sys.hamiltonian_at(ej_of_t(s, t + (0.5 + r) * h));
        const ComplexMatrix first = (cplx(0.0, -kTwoPi * h) * (a1 * h1 + a2 * h2)).eval().exp();
        const ComplexMatrix second = (cplx(0.0, -kTwoPi * h) * (a2 * h1 + a1 * h2)).eval().exp();
        u = (second * first * u).eval();
    }
    const RealMatrix& w = sys.dressed_vectors();
    return w.transpose().cast<cplx>() * u * w.cast<cplx>();
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("undriven evolution is the dressed phase") {
    const CoupledSystem sys = reference_system(0.010, 78.0, 3);
    const auto p = propagate_unitary(sys, drive(sys, 0.0, 0.9));
    const auto& e = sys.dressed_energies();
    for (int a = 0; a < sys.dim(); ++a)
        CHECK(std::abs(p.full(a, a) - std::polar(1.0, -kTwoPi * e(a) * 75.0)) < 1e-10);
    CHECK(p.unitarity_defect < 1e-12);
}

TEST_CASE("propagator agrees with an independent Magnus product") {
    const CoupledSystem sys = reference_system(0.010, 78.0, 3);
    const DriveSchedule s = drive(sys, 1.5, 0.88, 30.0);
    const auto p = propagate_unitary(sys, s);
    const ComplexMatrix oracle = magnus_oracle(sys, s, 12000);
    CHECK((p.full - oracle).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("plateau periodicity shortcut matches direct integration") {
    const CoupledSystem sys = reference_system(0.010, 78.0, 4);
    const DriveSchedule s = drive(sys, 2.0, 0.9);
    const auto fast = propagate_unitary(sys, s);
    InteractionFrameRhs rhs(sys, [&s](double t) { return ej_offset(s, t); });
    ComplexMatrix y = ComplexMatrix::Identity(sys.dim(), sys.dim());
    integrate_dop853([&rhs](double t, const ComplexMatrix& yy, ComplexMatrix& dy) { rhs(t, yy, dy); },
                     0.0, 75.0, y, ode_options_for(rhs, {}));
    const ComplexMatrix direct = to_dressed_frame(sys, y, 75.0);
    CHECK((fast.full - direct).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("propagators stay unitary across drive strengths") {
    const CoupledSystem sys = reference_system(0.012, 78.0, 4);
    for (double delta : {0.5, 2.0, 4.0})
        for (double omega : {0.45, 0.9, 1.3}) {
            const auto p = propagate_unitary(sys, drive(sys, delta, omega));
            CHECK(p.unitarity_defect < 1e-9);
        }
}

TEST_CASE("computational columns match the full propagator") {
    const CoupledSystem sys = reference_system(0.010, 78.0, 4);
    const DriveSchedule s = drive(sys, 3.0, 0.88);
    const auto p = propagate_unitary(sys, s);
    const Matrix4c c = propagate_computational(sys, s);
    CHECK((c - p.comp).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("population traces conserve probability and end at |U|^2") {
    const CoupledSystem sys = reference_system(0.010, 78.0, 4);
    const DriveSchedule s = drive(sys, 3.0, 0.88);
    const auto trace = population_trace(sys, s, {1, 1}, 2.5);
    CHECK(trace.front().t == 0.0);
    CHECK(trace.back().t == doctest::Approx(75.0));
    CHECK(trace.front().populations[sys.bare_index({1, 1})] == 1.0);
    for (const auto& ps : trace) {
        double total = 0.0;
        for (double p : ps.populations) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
    const auto p = propagate_unitary(sys, s);
    const int col = sys.index_of({1, 1});
    for (int a = 0; a < sys.dim(); ++a)
        CHECK(trace.back().populations[sys.bare_index(sys.label_of(a))] ==
              doctest::Approx(std::norm(p.full(a, col))).epsilon(1e-8));
    CHECK_THROWS_AS(population_trace(sys, s, {0, 0}, 0.0), InvalidParameter);
}

TEST_CASE("loose tolerances surface as numeric errors") {
    const CoupledSystem sys = reference_system(0.010, 78.0, 4);
    PropagationOptions opt;
    opt.rtol = 1e-3;
    opt.atol = 1e-3;
    opt.defect_limit = 1e-14;
    CHECK_THROWS_AS(propagate_unitary(sys, drive(sys, 3.0, 0.88), opt), NumericError);
}

}  // TEST_SUITE
