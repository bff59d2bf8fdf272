#include <cmath>
#include <random>

#include "afm/error.hpp"
#include "afm/potentials.hpp"
#include "doctest.h"

using namespace afm;

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

}  // namespace

TEST_CASE("power terms evaluate with sign and derivative") {
  const PowerTerm t{2.0, -1.0, -1};
  CHECK(t.value(0.5) == doctest::Approx(-4.0));
  CHECK(t.derivative(0.5) == doctest::Approx(8.0));
  const PotentialSpec f = make_funnel(1.0, 0.3, 0.7);
  CHECK(evaluate(f, 2.0) == doctest::Approx(0.6 - 0.35));
  CHECK(code_of([&] { evaluate(f, 0.0); }) == ErrorCode::Domain);
}

TEST_CASE("quantum numbers and N values") {
  CHECK(n_harmonic({2, 1}).value() == doctest::Approx(6.5));
  CHECK(n_coulomb({2, 1}).value() == doctest::Approx(4.0));
  CHECK(code_of([] { QuantumNumbers(-1, 0); }) == ErrorCode::Domain);
  CHECK(code_of([] { NValue(0.0); }) == ErrorCode::Domain);
  const auto w = quantum_window(3);
  REQUIRE(w.size() == 16);
  CHECK(w.front() == QuantumNumbers(0, 0));
  CHECK(w[1] == QuantumNumbers(1, 0));
  CHECK(w.back() == QuantumNumbers(3, 3));
}

TEST_CASE("potential validation rejects inconsistent input") {
  CHECK(code_of([] { make_funnel(0.0, 1.0, 1.0); }) == ErrorCode::Domain);
  CHECK(code_of([] { make_pure_power(1.0, 1.0, -2.5, -1); }) == ErrorCode::Domain);
  CHECK(code_of([] { PotentialSpec(Family::Kratzer, {{1.0, -2.0, 1}, {3.0, -1.0, -1}}, 0.5); }) ==
        ErrorCode::InconsistentFamily);
  CHECK(code_of([] { PotentialSpec(Family::Funnel, {{1.0, 2.0, 1}, {1.0, -1.0, -1}}, 1.0); }) ==
        ErrorCode::InconsistentFamily);
  CHECK(code_of([] { make_two_power(1.0, {1.0, 1.0, 1}, {2.0, 1.0, 1}); }) ==
        ErrorCode::InconsistentFamily);
  CHECK_NOTHROW(make_quad_centrifugal(1.0, 1.0, 0.3, -1));
  CHECK(make_funnel(1.0, 0.0, 1.0).leading_exponent() == doctest::Approx(-1.0));
}

TEST_CASE("family and formulation names round trip") {
  for (Family f : {Family::PurePower, Family::TwoPower, Family::Kratzer, Family::QuadCentrifugal,
                   Family::Anharmonic, Family::QuadCoulomb, Family::Funnel}) {
    CHECK(family_from_string(to_string(f)) == f);
  }
  CHECK(formulation_from_string("eta") == Formulation::Eta);
  CHECK(code_of([] { family_from_string("yukawa"); }) == ErrorCode::Parse);
}

TEST_CASE("reduce inverts embed") {
  const std::vector<ReducedProblem> problems{
      {Family::Kratzer, 0.7},
      {Family::QuadCentrifugal, 0.4, Formulation::Epsilon, -1},
      {Family::Anharmonic, 2.5},
      {Family::QuadCoulomb, 1.3},
      {Family::QuadCoulomb, 0.6, Formulation::Eta},
      {Family::Funnel, 0.5},
      {Family::Funnel, 1.7, Formulation::Eta},
  };
  for (const auto& p : problems) {
    CAPTURE(to_string(p.family));
    const Reduction r = reduce(embed(p), p.formulation);
    CHECK(r.problem.beta == doctest::Approx(p.beta).epsilon(1e-13));
    CHECK(r.energy_scale == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.problem.centrifugal_sign == p.centrifugal_sign);
  }
}

TEST_CASE("reduced harmonic limit fixes the energy scale") {
  // a r^2 with mass m has E = sqrt(2a/m) (2n + l + 3/2); the reduced anharmonic
  // problem at beta = 0 has eps = sqrt(3) N.
  const PotentialSpec spec = make_anharmonic(1.7, 0.9, 0.0);
  const Reduction r = reduce(spec);
  CHECK(r.problem.beta == 0.0);
  CHECK(r.energy_scale * std::sqrt(3.0) == doctest::Approx(std::sqrt(2.0 * 0.9 / 1.7)));
}

TEST_CASE("reductions outside the supported set fail") {
  CHECK(code_of([] { reduce(make_pure_power(1.0, 1.0, 2.0, 1)); }) ==
        ErrorCode::UnsupportedReduction);
  CHECK(code_of([] { reduce(make_anharmonic(1.0, 1.0, 1.0), Formulation::Eta); }) ==
        ErrorCode::UnsupportedReduction);
  CHECK(code_of([] { embed({Family::Funnel, -1.0}); }) == ErrorCode::Domain);
}

TEST_CASE("scaling helpers") {
  const auto terms = scaled_terms(make_funnel(1.0, 1.0, 2.0).terms(), -3.0, 2.0);
  REQUIRE(terms.size() == 2);
  for (const auto& t : terms) {
    if (t.exponent == 1.0) {
      CHECK(t.coeff == doctest::Approx(6.0));
      CHECK(t.sign == -1);
    } else {
      CHECK(t.coeff == doctest::Approx(3.0));
      CHECK(t.sign == 1);
    }
  }
  CHECK(reference_coupling(2.0, 3.0, 0.5, 1.0) == doctest::Approx(24.0));
  CHECK(scale_energy(5.0, 2.0, 3.0, 0.5, 1.0) == doctest::Approx(0.625));
  CHECK(code_of([] { reference_coupling(1.0, 1.0, 0.0, 1.0); }) == ErrorCode::Domain);
}

TEST_CASE("scaling law holds for the exact Coulomb and oscillator spectra") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  const double N = 3.5;
  auto coulomb = [&](double m, double g) { return -m * g * g / (2 * N * N); };
  // G v(a r) with v = r^2 has strength G a^2; with v = -1/r it has strength G / a.
  auto ho = [&](double m, double strength) { return std::sqrt(2 * strength / m) * N; };
  for (int i = 0; i < 100; ++i) {
    const double m = u(rng), g = u(rng), a = u(rng), m_ref = u(rng);
    const double g_ref = reference_coupling(m, g, a, m_ref);
    CHECK(scale_energy(coulomb(m_ref, g_ref), m, g, a, m_ref) ==
          doctest::Approx(coulomb(m, g / a)).epsilon(1e-12));
    CHECK(scale_energy(ho(m_ref, g_ref), m, g, a, m_ref) ==
          doctest::Approx(ho(m, g * a * a)).epsilon(1e-12));
  }
}

TEST_CASE("epsilon and eta parameters of one quad-coulomb potential are reciprocal") {
  for (double b : {0.2, 1.0, 3.0}) {
    const PotentialSpec spec = make_quad_coulomb(1.7, 0.6, b);
    CHECK(reduce(spec, Formulation::Epsilon).problem.beta *
              reduce(spec, Formulation::Eta).problem.beta ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("funnel reduction reproduces a chosen beta") {
  // (4 m^2 b^3 / 27 a)^(1/4) = 0.5 with m = 1, a = 1
  const double b = std::cbrt(27.0 * std::pow(0.5, 4) / 4.0);
  const Reduction r = reduce(make_funnel(1.0, 1.0, b));
  CHECK(r.problem.beta == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(r.energy_scale == doctest::Approx(3.0 * std::cbrt(0.5)).epsilon(1e-13));
}
