#include "../support.hpp"
#include "gatecraft/errors.hpp"
#include "gatecraft/perturbation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gatecraft;
using gatecraft::testing::reference_system;

namespace {

double bessel_series(int n, double x) {
    double sum = 0.0, term = std::pow(0.5 * x, n) / std::tgamma(n + 1.0);
    for (int k = 0; k < 60; ++k) {
        sum += term;
        term *= -(0.25 * x * x) / ((k + 1.0) * (k + 1.0 + n));
    }
    return sum;
}

DriveSchedule one_tone(const CoupledSystem& sys, double amp, double wp, double tg = 75.0) {
    DriveSchedule s;
    s.envelope = {tg, 10.0};
    s.ej_static = sys.ej_static();
    s.tones = {{amp, wp}};
    return s;
}

const InteractionEntry& entry(const InteractionTable& t, BareLabel a, BareLabel b) {
    for (const auto& e : t.entries)
        if (e.lower == a && e.upper == b) return e;
    throw std::runtime_error("missing entry");
}

}  // namespace

TEST_SUITE("perturbation") {

TEST_CASE("Bessel weights match the power series") {
    for (double x : {0.0, 0.3, 1.7, -2.4, 5.0}) {
        CHECK(bessel_weight(0, x, 1.0) == doctest::Approx(bessel_series(0, x)).epsilon(1e-12));
        CHECK(bessel_weight(1, 2.0 * x, 2.0) == doctest::Approx(bessel_series(1, x)).epsilon(1e-12));
    }
    CHECK(bessel_weight(0, 0.0, 0.7) == 1.0);
    CHECK(bessel_weight(1, 0.0, 0.7) == 0.0);
    CHECK(bessel_weight(1, -0.8, 0.5) == -bessel_weight(1, 0.8, 0.5));
    CHECK_THROWS_AS(bessel_weight(2, 0.1, 1.0), InvalidParameter);
    CHECK_THROWS_AS(bessel_weight(0, 0.1, 0.0), InvalidParameter);
}

TEST_CASE("interaction table structure") {
    const auto sys = reference_system();
    const auto tab = interaction_table(sys, one_tone(sys, 4.2706, 0.90265));
    REQUIRE(tab.entries.size() == 8);
    // Transmon limit: exact matrix elements are close to the oscillator values.
    CHECK(tab.lambda_fixed == doctest::Approx(1.0).epsilon(0.05));
    CHECK(tab.lambda_tunable == doctest::Approx(1.0).epsilon(0.05));
    CHECK(tab.Lambda_fixed == doctest::Approx(1.0).epsilon(0.05));
    CHECK(tab.Lambda_tunable == doctest::Approx(1.0).epsilon(0.05));
    const auto& p = sys.params();
    const double xf = std::sqrt(2.0 * p.fixed.e_c / p.fixed.e_j);
    const double xt = std::sqrt(2.0 * p.tunable.e_c / p.tunable.e_j);
    CHECK(tab.g == doctest::Approx(p.j_c / (4.0 * std::sqrt(xf * xt))).epsilon(1e-14));
    for (const auto& e : tab.entries) {
        const double x = e.delta_omega1 / 0.90265;
        CHECK(e.g1 / e.g0 == doctest::Approx(std::cyl_bessel_j(1.0, std::abs(x)) /
                                             std::cyl_bessel_j(0.0, std::abs(x)) * (x < 0 ? -1 : 1))
                                 .epsilon(1e-10));
    }
    DriveSchedule two = one_tone(sys, 1.0, 0.9);
    two.tones.push_back({1.0, 0.95});
    CHECK_THROWS_AS(interaction_table(sys, two), UnsupportedSchedule);
}

TEST_CASE("pair frequencies obey the level-sum identities") {
    const auto sys = reference_system();
    const auto s = one_tone(sys, 4.2706, 0.90265);
    const auto tab = interaction_table(sys, s);
    const auto& fx = sys.fixed_qubit().spectrum.transitions;
    const auto tb = harmonic_decomposition(s, sys.params().tunable, sys.truncation(), 1);
    auto w = [&](BareLabel a, BareLabel b) { return entry(tab, a, b).omega0; };
    CHECK(w({0, 0}, {1, 1}) + w({0, 1}, {1, 0}) == doctest::Approx(2.0 * fx[0]).epsilon(1e-9));
    CHECK(w({0, 0}, {1, 1}) - w({0, 1}, {1, 0}) == doctest::Approx(2.0 * tb.omega_bar).epsilon(1e-9));
    CHECK(w({1, 1}, {2, 2}) + w({1, 2}, {2, 1}) == doctest::Approx(2.0 * fx[1]).epsilon(1e-9));
    CHECK(w({0, 1}, {1, 2}) + w({1, 0}, {2, 1}) == doctest::Approx(w({0, 0}, {1, 1}) + w({1, 1}, {2, 2})).epsilon(1e-9));
    CHECK(entry(tab, {0, 1}, {1, 0}).delta_omega1 ==
          doctest::Approx(-tb.delta_omega[0]).epsilon(1e-6));
}

TEST_CASE("undriven coefficients carry the sqrt2 ladder factors") {
    const auto sys = reference_system();
    const auto tab = interaction_table(sys, one_tone(sys, 0.0, 0.9));
    const double base = entry(tab, {0, 1}, {1, 0}).g0;
    CHECK(base == doctest::Approx(tab.g * tab.lambda_fixed * tab.lambda_tunable).epsilon(1e-14));
    CHECK(entry(tab, {0, 0}, {1, 1}).g0 == doctest::Approx(-base).epsilon(1e-14));
    CHECK(entry(tab, {0, 2}, {1, 1}).g0 / base ==
          doctest::Approx(std::sqrt(2.0) * tab.Lambda_tunable / tab.lambda_tunable).epsilon(1e-14));
    CHECK(entry(tab, {1, 1}, {2, 0}).g0 / base ==
          doctest::Approx(std::sqrt(2.0) * tab.Lambda_fixed / tab.lambda_fixed).epsilon(1e-14));
    CHECK(entry(tab, {1, 2}, {2, 1}).g0 / base ==
          doctest::Approx(2.0 * tab.Lambda_fixed * tab.Lambda_tunable /
                          (tab.lambda_fixed * tab.lambda_tunable)).epsilon(1e-14));
    for (const auto& e : tab.entries) CHECK(std::abs(e.g1) < 1e-15);
}

TEST_CASE("static estimate tracks exact diagonalization") {
    for (double jc : {0.005, 0.010, 0.015}) {
        const auto sys = reference_system(jc);
        const auto est = zz_rate_estimate(interaction_table(sys, one_tone(sys, 0.0, 0.9)), 0.9, 75.0);
        // Phase rates are the negative of energy shifts.
        CHECK(-est.zeta_rate == doctest::Approx(static_zz_rate(sys)).epsilon(0.02));
        CHECK(std::abs(est.zeta_rate_m1) < 1e-12 * std::abs(est.zeta_rate_m0));
        CHECK(est.divergent.empty());
    }
}

TEST_CASE("per-state rates from the table entries") {
    const auto sys = reference_system();
    const double wp = 0.90265;
    const auto tab = interaction_table(sys, one_tone(sys, 4.2706, wp));
    const auto est = zz_rate_estimate(tab, wp, 75.0);
    auto m1 = [&](double d, double g1) { return 2.0 * d * g1 * g1 / (d * d - wp * wp); };
    const auto& a = entry(tab, {0, 0}, {1, 1});
    CHECK(est.per_state.at({0, 0}).rate_m0 == doctest::Approx(a.g0 * a.g0 / a.omega0).epsilon(1e-12));
    CHECK(est.per_state.at({0, 0}).rate_m1 == doctest::Approx(m1(a.omega0, a.g1)).epsilon(1e-12));
    double r11 = 0.0;
    for (auto [lo, hi, sign] : {std::tuple{BareLabel{0, 0}, BareLabel{1, 1}, -1.0},
                                {BareLabel{1, 1}, BareLabel{2, 2}, 1.0},
                                {BareLabel{0, 2}, BareLabel{1, 1}, -1.0},
                                {BareLabel{1, 1}, BareLabel{2, 0}, 1.0}}) {
        const auto& e = entry(tab, lo, hi);
        const double d = sign * e.omega0;
        r11 += e.g0 * e.g0 / d;
        if (std::abs(d * d - wp * wp) >= 100.0 * e.g1 * e.g1) r11 += m1(d, e.g1);
    }
    CHECK(est.per_state.at({1, 1}).total() == doctest::Approx(r11).epsilon(1e-12));
    double combo = 0.0;
    for (auto [s, c] : {std::pair{BareLabel{0, 0}, 1.0}, {BareLabel{1, 1}, 1.0},
                        {BareLabel{0, 1}, -1.0}, {BareLabel{1, 0}, -1.0}})
        combo += c * est.per_state.at(s).total();
    CHECK(est.zeta_rate == doctest::Approx(combo).epsilon(1e-14));
    CHECK(est.zeta_phase == doctest::Approx(kTwoPi * combo * 75.0).epsilon(1e-14));
}

TEST_CASE("estimate scales with the square of the coupling") {
    const auto s10 = reference_system(0.010);
    const auto s20 = reference_system(0.020);
    const auto e10 = zz_rate_estimate(interaction_table(s10, one_tone(s10, 3.0, 0.8)), 0.8, 75.0);
    const auto e20 = zz_rate_estimate(interaction_table(s20, one_tone(s20, 3.0, 0.8)), 0.8, 75.0);
    CHECK(e20.zeta_rate / e10.zeta_rate == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("near-resonant sideband terms are skipped and reported") {
    InteractionTable tab;
    tab.entries.push_back({{0, 0}, {1, 1}, 0.01, 0.005, 1.0, 0.1});
    const auto off = zz_rate_estimate(tab, 0.5, 75.0);
    CHECK(off.divergent.empty());
    const auto on = zz_rate_estimate(tab, 1.0, 75.0);
    REQUIRE(on.divergent.size() == 2);  // seen from 00 and from 11
    CHECK(on.zeta_rate_m1 == 0.0);
    CHECK(on.per_state.at({0, 0}).rate_m0 == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(on.per_state.at({1, 1}).rate_m0 == doctest::Approx(-1e-4).epsilon(1e-14));
    CHECK(off.per_state.at({0, 0}).rate_m1 == doctest::Approx(2.0 * 0.005 * 0.005 / (1.0 - 0.25)).epsilon(1e-14));
}

TEST_CASE("off-resonant Rabi unitary") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (int k = 0; k < 10; ++k) {
        const double g = u(rng), d = u(rng), t = 40.0 + 400.0 * std::abs(u(rng));
        const auto m = rabi_offres_unitary(g, d, t);
        CHECK((m.adjoint() * m - Eigen::Matrix2cd::Identity()).norm() < 1e-14);
        const double om = std::hypot(g, d);
        const double p = g * g / (om * om) * std::pow(std::sin(kPi * om * t), 2);
        CHECK(std::norm(m(0, 1)) == doctest::Approx(p).epsilon(1e-12));
        CHECK(std::abs(m.determinant() - 1.0) < 1e-13);
        CHECK(swap_condition_lhs(g, d, t) == doctest::Approx(g / om * std::sin(kPi * om * t)).epsilon(1e-14));
    }
    CHECK((rabi_offres_unitary(0.0, 0.03, 50.0) - Eigen::Matrix2cd::Identity()).norm() < 1e-14);
    const auto full = rabi_offres_unitary(0.02, 0.0, 25.0);
    CHECK(std::abs(full(0, 1)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(swap_condition_lhs(0.0, 0.0, 10.0) == 0.0);
}

TEST_CASE("local equivalence reduction") {
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int k = 0; k < 20; ++k) {
        const auto m = rabi_offres_unitary(0.01, 0.02 * std::sin(u(rng)), 60.0);
        Eigen::Matrix2cd zl = Eigen::Matrix2cd::Zero(), zr = Eigen::Matrix2cd::Zero();
        const double a = u(rng), b = u(rng), c = u(rng);
        zl(0, 0) = std::polar(1.0, a);
        zl(1, 1) = std::polar(1.0, -a);
        zr(0, 0) = std::polar(1.0, b);
        zr(1, 1) = std::polar(1.0, -b);
        const Eigen::Matrix2cd v = std::polar(1.0, c) * zl * m * zr;
        const auto r = local_equivalence_reduce(v);
        CHECK(r.swap_magnitude == doctest::Approx(std::abs(m(0, 1))).epsilon(1e-12));
        CHECK(std::abs(r.reduced(0, 0).imag()) < 1e-12);
        CHECK(r.reduced(0, 0).real() >= -1e-12);
        CHECK(std::abs(r.reduced(1, 1) - r.reduced(0, 0)) < 1e-12);
        CHECK(r.residual < 1e-10);
        CHECK(std::abs(r.reduced(0, 1) - cplx(0, r.swap_magnitude)) < 1e-10);
    }
    Eigen::Matrix2cd bad = Eigen::Matrix2cd::Identity();
    bad(0, 1) = 0.1;
    CHECK_THROWS_AS(local_equivalence_reduce(bad), InvalidParameter);
}

TEST_CASE("resonant rotations carry no residual phase") {
    for (double g : {0.001, 0.002, 0.004})
        for (double t : {30.0, 75.0, 120.0}) {
            const auto r = local_equivalence_reduce(rabi_offres_unitary(g, 0.0, t));
            CHECK(std::abs(r.gamma) < 1e-12);
        }
}

TEST_CASE("swap condition scan locates the 1/sqrt2 crossings") {
    std::vector<double> gs{0.002, 0.008}, ds;
    for (int k = 0; k <= 2000; ++k) ds.push_back(-0.05 + 1e-4 * k);
    const auto sc = swap_condition_scan(gs, ds, 75.0);
    CHECK(sc.lhs.rows() == 2);
    CHECK(sc.lhs.cols() == 2001);
    // A weak coupling never reaches the condition within the gate.
    CHECK(sc.max_abs[0] == doctest::Approx(std::abs(std::sin(kPi * 0.002 * 75.0))).epsilon(1e-6));
    CHECK(sc.max_abs[0] < 1.0 / std::sqrt(2.0));
    REQUIRE_FALSE(sc.crossings.empty());
    for (auto [g, d] : sc.crossings) {
        CHECK(g == 0.008);
        CHECK(std::abs(swap_condition_lhs(g, d, 75.0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
    }
}

}  // TEST_SUITE
