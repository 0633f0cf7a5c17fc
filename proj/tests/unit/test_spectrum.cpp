#include "gatecraft/errors.hpp"
#include "gatecraft/spectrum.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace gatecraft;
using gatecraft::testing::reference_system;

namespace {

// Phase-basis finite differences on a periodic grid, independent of the
// charge-basis construction. Returns the lowest `count` transition energies.
std::vector<double> phase_grid_transitions(const QubitParams& q, int n, int count) {
    const double h = kTwoPi / n;
    RealMatrix H = RealMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double phi = -kPi + k * h;
        H(k, k) = 8.0 * q.e_c / (h * h) - q.e_j * std::cos(phi);
        H(k, (k + 1) % n) = H((k + 1) % n, k) = -4.0 * q.e_c / (h * h);
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(H, Eigen::EigenvaluesOnly);
    std::vector<double> out;
    for (int j = 0; j < count; ++j) out.push_back(es.eigenvalues()(j + 1) - es.eigenvalues()(j));
    return out;
}

// Second-order shifts of the four computational levels, summed directly in
// the bare product basis.
double second_order_zz(const CoupledSystem& sys) {
    const int d = sys.levels();
    const auto& lf = sys.fixed_qubit().spectrum.levels;
    const auto& lt = sys.tunable_qubit().spectrum.levels;
    const RealMatrix nf = sys.fixed_qubit().vectors.transpose() *
                          charge_operator(sys.truncation().charge_cutoff) * sys.fixed_qubit().vectors;
    const RealMatrix nt = sys.tunable_qubit().vectors.transpose() *
                          charge_operator(sys.truncation().charge_cutoff) * sys.tunable_qubit().vectors;
    const double jc = sys.params().j_c;
    auto shift = [&](int i, int j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
                if (k == i && l == j) continue;
                const double v = jc * nf(i, k) * nt(j, l);
                s += v * v / (lf[i] + lt[j] - lf[k] - lt[l]);
            }
        return s;
    };
    return shift(0, 0) + shift(1, 1) - shift(0, 1) - shift(1, 0);
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("charge operators have the textbook structure") {
    const RealMatrix n = charge_operator(3);
    CHECK(n.rows() == 7);
    CHECK(n(0, 0) == -3.0);
    CHECK(n(6, 6) == 3.0);
    const RealMatrix c = minus_cos_phi(3);
    CHECK(c(0, 1) == -0.5);
    CHECK(c(1, 0) == -0.5);
    CHECK(c(0, 0) == 0.0);
    CHECK(c(0, 2) == 0.0);
}

TEST_CASE("free rotor spectrum is 4 E_C n^2") {
    const RealMatrix h = build_charge_hamiltonian({0.25, 0.0}, 4);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    const RealVector e = es.eigenvalues();
    CHECK(e(0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(e(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e(2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e(3) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("single-qubit transitions agree with a phase-grid discretisation") {
    for (double ratio : {74.0, 78.0, 100.0}) {
        const QubitParams q{0.2, 0.2 * ratio};
        const auto es = diagonalize_qubit(q, {20, 6});
        // Richardson extrapolation of the O(h^2) grid error.
        const auto coarse = phase_grid_transitions(q, 300, 3);
        const auto fine = phase_grid_transitions(q, 600, 3);
        for (int j = 0; j < 3; ++j) {
            const double oracle = (4.0 * fine[j] - coarse[j]) / 3.0;
            CHECK(es.spectrum.transitions[j] == doctest::Approx(oracle).epsilon(2e-6));
        }
    }
}

TEST_CASE("transition frequencies reproduce the single-qubit reference values") {
    const double fixed[] = {5.449, 5.230, 4.995};
    const double tunable[] = {4.787, 4.565, 4.323};
    const auto f = diagonalize_qubit({0.2, 20.0}, {});
    const auto t = diagonalize_qubit({0.2, 15.6}, {});
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(f.spectrum.transitions[j] - fixed[j]) < 1e-3);
        CHECK(std::abs(t.spectrum.transitions[j] - tunable[j]) < 1e-3);
    }
}

TEST_CASE("large-q Mathieu asymptotics") {
    // Characteristic values a(q) for large q with s = 2m + 1 and h = sqrt(q);
    // the transmon levels are E_m = E_C a(E_J / 2E_C).
    const QubitParams q{0.2, 0.2 * 78.0};
    const double h = std::sqrt(q.e_j / (2.0 * q.e_c));
    auto level = [&](int m) {
        const double s = 2.0 * m + 1.0;
        return q.e_c * (-2.0 * h * h + 2.0 * s * h - (s * s + 1.0) / 8.0 - (s * s * s + 3.0 * s) / (128.0 * h) -
                        (5.0 * std::pow(s, 4) + 34.0 * s * s + 9.0) / (4096.0 * h * h) -
                        (33.0 * std::pow(s, 5) + 410.0 * std::pow(s, 3) + 405.0 * s) / (131072.0 * h * h * h));
    };
    const auto es = diagonalize_qubit(q, {});
    CHECK(std::abs(es.spectrum.transitions[0] - (level(1) - level(0))) < 1e-3);
    CHECK(std::abs(es.spectrum.transitions[1] - (level(2) - level(1))) < 1e-3);
    CHECK(std::abs(es.spectrum.transitions[2] - (level(3) - level(2))) < 3e-3);
    CHECK(es.spectrum.anharmonicities[0] == doctest::Approx(q.e_c).epsilon(0.15));
    CHECK(in_transmon_regime(q));
}

TEST_CASE("charge cutoff is converged at the default") {
    const auto a = diagonalize_qubit({0.2, 15.6}, {20, 6});
    const auto b = diagonalize_qubit({0.2, 15.6}, {40, 6});
    for (int j = 0; j < 5; ++j)
        CHECK(std::abs(a.spectrum.transitions[j] - b.spectrum.transitions[j]) < 1e-11);
}

TEST_CASE("parameter validation names the offending field") {
    CHECK_THROWS_WITH_AS(validate(QubitParams{0.0, 10.0}, "circuit.fixed"),
                         doctest::Contains("circuit.fixed.e_c"), InvalidParameter);
    CHECK_THROWS_AS(validate(TruncationConfig{5, 6}), InvalidParameter);
    CHECK_THROWS_AS(validate(TruncationConfig{20, 2}), InvalidParameter);
    CHECK_THROWS_AS(build_charge_hamiltonian({-1.0, 10.0}, 5), InvalidParameter);
}

TEST_CASE("uncoupled system is a plain product") {
    const CoupledSystem sys = reference_system(0.0);
    const auto& lf = sys.fixed_qubit().spectrum.levels;
    const auto& lt = sys.tunable_qubit().spectrum.levels;
    for (int i = 0; i < sys.levels(); ++i)
        for (int j = 0; j < sys.levels(); ++j) {
            CHECK(sys.energy({i, j}) == doctest::Approx(lf[i] + lt[j]).epsilon(1e-12));
            CHECK(sys.overlap({i, j}) == doctest::Approx(1.0).epsilon(1e-12));
        }
    CHECK(std::abs(static_zz_rate(sys)) < 1e-12);
}

TEST_CASE("dressed eigenvectors diagonalise the static Hamiltonian") {
    const CoupledSystem sys = reference_system();
    const RealMatrix& w = sys.dressed_vectors();
    const RealMatrix h = w.transpose() * sys.h_static() * w;
    CHECK((h - RealMatrix(sys.dressed_energies().asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((w.transpose() * w - RealMatrix::Identity(sys.dim(), sys.dim())).cwiseAbs().maxCoeff() < 1e-12);
    for (int a = 0; a < sys.dim(); ++a) {
        const BareLabel b = sys.label_of(a);
        CHECK(sys.index_of(b) == a);
        CHECK(w(sys.bare_index(b), a) > 0.0);
    }
    CHECK((sys.hamiltonian_at(sys.ej_static()) - sys.h_static()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("static ZZ matches second-order perturbation theory") {
    for (double jc : {0.005, 0.010, 0.015}) {
        const CoupledSystem sys = reference_system(jc);
        CHECK(static_zz_rate(sys) == doctest::Approx(second_order_zz(sys)).epsilon(0.01));
    }
    const double r1 = static_zz_rate(reference_system(0.005));
    const double r2 = static_zz_rate(reference_system(0.010));
    CHECK(r2 / r1 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("coupled transitions at the ratio-74 operating point match the reference values") {
    const CoupledSystem sys = reference_system(0.010, 74.0);
    struct Row {
        BareLabel a, b;
        double f;
    };
    const Row rows[] = {{{0, 0}, {1, 1}, 10.1058}, {{0, 1}, {1, 0}, 0.7923}, {{1, 1}, {2, 2}, 9.6635},
                        {{1, 2}, {2, 1}, 0.7959},  {{0, 2}, {1, 1}, 1.0151}, {{1, 0}, {2, 1}, 9.8863},
                        {{1, 1}, {2, 0}, 0.5734}};
    for (const auto& r : rows) CHECK(std::abs(std::abs(transition_frequency(sys, r.a, r.b)) - r.f) < 1e-3);
}

TEST_CASE("degenerate computational levels cannot be labelled") {
    const CircuitParams p{{0.2, 16.0}, {0.2, 16.0}, 0.010};
    CHECK_THROWS_AS(CoupledSystem(p, {}), LabelingError);
}

TEST_CASE("exchange coupling forms agree in the transmon limit") {
    const CoupledSystem sys = reference_system();
    const auto g = effective_exchange_g(sys);
    CHECK(g.matrix_element == doctest::Approx(g.harmonic_form).epsilon(0.05));
}

}  // TEST_SUITE
