#include "gatecraft/simplex.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace gatecraft;

TEST_SUITE("simplex") {

TEST_CASE("quadratic bowl") {
    auto f = [](const std::vector<double>& x) {
        return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 2.0) * (x[1] + 2.0) + 3.0;
    };
    const auto r = minimize_simplex(f, {0.0, 0.0}, {0.5, 0.5}, {1e-9, 1e-16, 2000});
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-7));
    CHECK(r.value == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("Rosenbrock valley") {
    auto f = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const auto r = minimize_simplex(f, {-1.2, 1.0}, {0.1, 0.1}, {1e-10, 1e-20, 5000});
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-6);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-6);
}

TEST_CASE("evaluation budget is respected") {
    int calls = 0;
    auto f = [&](const std::vector<double>& x) {
        ++calls;
        return std::pow(x[1] - x[0] * x[0], 2) * 100.0 + std::pow(1.0 - x[0], 2);
    };
    const auto r = minimize_simplex(f, {-1.2, 1.0}, {0.1, 0.1}, {1e-14, 0.0, 40});
    CHECK_FALSE(r.converged);
    CHECK(r.evaluations <= 40);
    CHECK(calls == r.evaluations);
    for (int budget : {3, 7, 11, 25}) {
        calls = 0;
        minimize_simplex(f, {-1.2, 1.0}, {0.1, 0.1}, {1e-14, 0.0, budget});
        CHECK(calls <= std::max(budget, 3));
    }
}

TEST_CASE("one-dimensional") {
    auto f = [](const std::vector<double>& x) { return std::cosh(x[0] - 0.3); };
    const auto r = minimize_simplex(f, {2.0}, {1.0}, {1e-10, 1e-18, 500});
    CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-8));
}

}  // TEST_SUITE
