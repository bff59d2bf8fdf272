#include <cmath>
#include <vector>

#include "afm/afm_engine.hpp"
#include "afm/error.hpp"
#include "doctest.h"

using namespace afm;
using namespace afm::engine;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no afm::Error thrown");
  return ErrorCode::Parse;
}

double central_difference(auto&& f, double x, double h) { return (f(x + h) - f(x - h)) / (2 * h); }

}  // namespace

TEST_CASE("power-law spectrum reproduces harmonic and Coulomb levels") {
  const QuantumNumbers q(1, 2);
  // p^2/2m + a r^2: sqrt(2a/m) N_ho
  CHECK(power_law_energy(1.3, 0.7, 2.0, n_harmonic(q)) ==
        doctest::Approx(std::sqrt(2 * 0.7 / 1.3) * 5.5));
  // p^2/2m - a/r: -m a^2 / (2 N_C^2)
  CHECK(power_law_energy(1.3, 0.7, -1.0, n_coulomb(q)) ==
        doctest::Approx(-1.3 * 0.49 / (2 * 16.0)));
  for (double lambda : {-1.0, -0.5, 1.0, 2.0, 3.0}) {
    const NValue N(2.5);
    auto e = [&](double a) { return power_law_energy(0.8, a, lambda, N); };
    CHECK(power_law_energy_slope(0.8, 1.1, lambda, N) ==
          doctest::Approx(central_difference(e, 1.1, 1e-5)).epsilon(1e-7));
  }
  CHECK(code_of([] { power_law_energy(1.0, 1.0, -2.0, NValue(1.0)); }) == ErrorCode::Domain);
}

TEST_CASE("mean point inverts K = V'/P'") {
  const std::vector<PowerTerm> funnel{{1.0, 1.0, 1}, {0.6, -1.0, -1}};
  for (double nu : {0.2, 1.0, 7.0}) {
    const double r = mean_point_J(funnel, 2.0, nu);
    CHECK(evaluate_derivative(funnel, r) / (2.0 * r) == doctest::Approx(nu).epsilon(1e-12));
  }
  const std::vector<PowerTerm> linear{{2.0, 1.0, 1}};
  CHECK(mean_point_J(linear, 2.0, 0.5) == doctest::Approx(2.0));
  CHECK(code_of([&] { mean_point_J(linear, 1.0, 0.5); }) == ErrorCode::Degenerate);
  CHECK(code_of([&] { mean_point_J(funnel, 2.0, -1.0); }) == ErrorCode::InversionFailed);
}

TEST_CASE("solution is a stationary point of the auxiliary energy") {
  const std::vector<PowerTerm> funnel{{1.0, 1.0, 1}, {0.6, -1.0, -1}};
  for (double eta : {2.0, -1.0, 1.5}) {
    const StartingPotential start{eta, 0.0};
    const NValue N = eta > 0 ? n_harmonic({1, 1}) : n_coulomb({1, 1});
    const AfmSolution s = solve(funnel, start, N, 0.9);
    auto e = [&](double nu) { return auxiliary_energy(funnel, start, N, 0.9, nu); };
    CHECK(std::abs(central_difference(e, s.nu0, 1e-6 * std::abs(s.nu0))) <= 1e-6);
    CHECK(s.energy == doctest::Approx(e(s.nu0)).epsilon(1e-13));
    CHECK(s.mean_point == doctest::Approx(mean_point_J(funnel, eta, s.nu0)));
    CHECK(s.stationarity_residual <= 1e-9);
  }
}

TEST_CASE("a pure power is solved exactly for any start") {
  // V = 0.7 r^1.5 has the exact AFM value given by the power-law formula.
  const std::vector<PowerTerm> v{{0.7, 1.5, 1}};
  const NValue N(3.2);
  const double expected = power_law_energy(1.1, 0.7, 1.5, N);
  for (double eta : {2.0, -1.0, 1.0}) {
    CHECK(solve(v, {eta, 0.0}, N, 1.1).energy == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("proportional V is flagged degenerate and exact") {
  const std::vector<PowerTerm> v{{0.4, 2.0, 1}};
  const AfmSolution s = solve(v, {2.0, 0.6}, NValue(2.5), 1.0);
  CHECK(s.degenerate);
  CHECK(s.energy == doctest::Approx(power_law_energy(1.0, 1.0, 2.0, NValue(2.5))));
  const std::vector<PowerTerm> repulsive{{0.4, 2.0, -1}};
  CHECK(code_of([&] { solve(repulsive, {2.0, 0.0}, NValue(2.5), 1.0); }) == ErrorCode::NoMinimum);
}

TEST_CASE("specification solve splits off the starting term") {
  const PotentialSpec spec = make_anharmonic(2.0, 3.0, 0.8);
  const NValue N = n_harmonic({2, 0});
  const std::vector<PowerTerm> v{{1.6, 1.0, 1}};  // a r^2 + 2b r
  CHECK(solve(spec, 2.0, N).energy == doctest::Approx(solve(v, {2.0, 3.0}, N, 2.0).energy));
}

TEST_CASE("first-order form approaches the full solution quadratically") {
  const std::vector<PowerTerm> v{{1.0, 1.0, 1}};
  const StartingPotential start{2.0, 0.5};
  const NValue N = n_harmonic({0, 0});
  const double d1 =
      std::abs(solve(std::vector<PowerTerm>{{1e-2, 1.0, 1}}, start, N, 1.0).energy -
               perturbative_energy(v, 1e-2, start, N, 1.0));
  const double d2 =
      std::abs(solve(std::vector<PowerTerm>{{1e-3, 1.0, 1}}, start, N, 1.0).energy -
               perturbative_energy(v, 1e-3, start, N, 1.0));
  CHECK(d1 / d2 == doctest::Approx(100.0).epsilon(0.05));
  CHECK(code_of([&] { perturbative_energy(v, 1e-2, {2.0, 0.0}, N, 1.0); }) == ErrorCode::Domain);
}

TEST_CASE("starting potential validation") {
  CHECK(code_of([] { StartingPotential{0.0, 1.0}.validate(); }) == ErrorCode::Domain);
  CHECK(code_of([] { StartingPotential{-2.0, 1.0}.validate(); }) == ErrorCode::Domain);
  CHECK(code_of([] { StartingPotential{2.0, -1.0}.validate(); }) == ErrorCode::Domain);
}

TEST_CASE("a start term inside V gives the same result as splitting it off") {
  // r^2 - 0.9/r with a = 0: K = 1 + 0.45 r^-3 ranges over (1, inf).
  const std::vector<PowerTerm> whole{{1.0, 2.0, 1}, {0.9, -1.0, -1}};
  const std::vector<PowerTerm> coulomb{{0.9, -1.0, -1}};
  for (const auto& q : quantum_window(2)) {
    const NValue N = n_harmonic(q);
    CHECK(solve(whole, {2.0, 0.0}, N, 1.0).energy ==
          doctest::Approx(solve(coulomb, {2.0, 1.0}, N, 1.0).energy).epsilon(1e-12));
  }
}

TEST_CASE("mean point of a pure power satisfies |eta| (a + nu0) J^(eta+2) = N^2/m") {
  const std::vector<PowerTerm> v{{0.8, 1.0, 1}};
  for (double eta : {2.0, -1.0}) {
    for (double a : {0.0, 0.5}) {
      const NValue N(2.5);
      const double m = 1.3;
      const AfmSolution s = solve(v, {eta, a}, N, m);
      CHECK(std::abs(eta) * (a + s.nu0) * std::pow(s.mean_point, eta + 2.0) ==
            doctest::Approx(N.value() * N.value() / m).epsilon(1e-10));
    }
  }
}

TEST_CASE("stationarity holds to a relative finite-difference gate") {
  for (double beta : {0.1, 1.0, 10.0}) {
    const PotentialSpec spec = make_funnel(1.5, 1.0 / 3.0, std::pow(beta, 4.0 / 3.0));
    const std::vector<PowerTerm> v(spec.terms().begin(), spec.terms().end());
    const NValue N = n_coulomb({2, 1});
    const AfmSolution s = solve(v, {-1.0, 0.0}, N, 1.5);
    // K ranges over (b, inf); the step stays well inside it.
    const double h = 1e-4 * (s.nu0 - std::pow(beta, 4.0 / 3.0));
    auto e = [&](double nu) { return auxiliary_energy(v, {-1.0, 0.0}, N, 1.5, nu); };
    CHECK(std::abs(central_difference(e, s.nu0, h)) < 1e-8 * std::max(1.0, std::abs(s.energy)));
  }
}

TEST_CASE("Kratzer with a Coulomb start") {
  // m = 1/2, a = 1, N = 1: -2ma^2 / (2ma^2 + N^2) = -1/2
  const std::vector<PowerTerm> centrifugal{{1.0, -2.0, 1}};
  CHECK(solve(centrifugal, {-1.0, 2.0}, NValue(1.0), 0.5).energy == doctest::Approx(-0.5));
}
