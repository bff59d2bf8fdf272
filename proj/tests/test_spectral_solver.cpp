#include <cmath>

#include "afm/closed_form.hpp"
#include "afm/error.hpp"
#include "afm/spectral_solver.hpp"
#include "doctest.h"

using namespace afm;
namespace sp = afm::spectral;

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

TEST_CASE("harmonic oscillator levels") {
  // p^2/2 + r^2/2: E = 2n + l + 3/2
  const EigenTable t = sp::eigenvalues(make_pure_power(1.0, 0.5, 2.0, 1), quantum_window(3));
  REQUIRE(t.size() == 16);
  for (const auto& e : t.entries()) {
    CHECK(e.energy == doctest::Approx(n_harmonic(e.q).value()).epsilon(1e-10));
    CHECK(e.accuracy < 1e-8);
    CHECK(e.provenance == Provenance::Numeric);
    CHECK_FALSE(e.beta.has_value());
  }
}

TEST_CASE("hydrogen levels") {
  // p^2/2 - 1/r: E = -1 / (2 N_C^2)
  const EigenTable t = sp::eigenvalues(make_pure_power(1.0, 1.0, -1.0, -1), quantum_window(3));
  for (const auto& e : t.entries()) {
    const double n = n_coulomb(e.q).value();
    CHECK(e.energy == doctest::Approx(-0.5 / (n * n)).epsilon(1e-10));
  }
}

TEST_CASE("exactly solvable r^-2 families") {
  for (double beta : {0.3, 1.0, 4.0}) {
    const ReducedProblem kr{Family::Kratzer, beta};
    const EigenTable tk = sp::eigenvalues(kr, quantum_window(3));
    for (const auto& e : tk.entries()) {
      CHECK(e.energy == doctest::Approx(*closed_form::exact_energy(kr, e.q)).epsilon(1e-9));
      CHECK(e.beta == beta);
    }
    for (int sign : {1, -1}) {
      const ReducedProblem qc{Family::QuadCentrifugal, beta / 20.0, Formulation::Epsilon, sign};
      const EigenTable tq = sp::eigenvalues(qc, quantum_window(3));
      for (const auto& e : tq.entries()) {
        CHECK(e.energy == doctest::Approx(*closed_form::exact_energy(qc, e.q)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("radial moments of exact states") {
  const PotentialSpec ho = make_pure_power(1.0, 0.5, 2.0, 1);
  CHECK(sp::expectation_r_power(ho, {0, 0}, 2.0) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(sp::expectation_r_power(ho, {1, 0}, 2.0) == doctest::Approx(3.5).epsilon(1e-10));
  const PotentialSpec h = make_pure_power(1.0, 1.0, -1.0, -1);
  CHECK(sp::expectation_r_power(h, {0, 0}, 1.0) == doctest::Approx(1.5).epsilon(1e-10));
  // <1/r> = 1/N^2 for hydrogen
  CHECK(sp::expectation_r_power(h, {1, 1}, -1.0) == doctest::Approx(1.0 / 9.0).epsilon(1e-10));
  CHECK(code_of([&] { sp::expectation_r_power(h, {0, 0}, -3.0); }) == ErrorCode::Domain);
}

TEST_CASE("virial theorem for mixed potentials") {
  // 2<T> = <r V'> gives E = 2a<r^2> + 3/2 b<r> for a r^2 + b r.
  const PotentialSpec an = make_anharmonic(1.0, 0.7, 0.65);
  const EigenTable ta = sp::eigenvalues(an, {{1, 2}});
  CHECK(ta.energy({1, 2}) ==
        doctest::Approx(2 * 0.7 * sp::expectation_r_power(an, {1, 2}, 2.0) +
                        1.5 * 1.3 * sp::expectation_r_power(an, {1, 2}, 1.0))
            .epsilon(1e-9));
  // E = 3/2 a<r> - 1/2 b<1/r> for a r - b/r.
  const PotentialSpec fu = make_funnel(0.8, 1.1, 0.6);
  const EigenTable tf = sp::eigenvalues(fu, {{2, 1}});
  CHECK(tf.energy({2, 1}) ==
        doctest::Approx(1.5 * 1.1 * sp::expectation_r_power(fu, {2, 1}, 1.0) -
                        0.5 * 0.6 * sp::expectation_r_power(fu, {2, 1}, -1.0))
            .epsilon(1e-9));
}

TEST_CASE("physical spectrum follows the reduction") {
  const PotentialSpec spec = make_funnel(1.7, 0.4, 0.9);
  const Reduction r = reduce(spec);
  const EigenTable phys = sp::eigenvalues(spec, {{1, 1}});
  const EigenTable red = sp::eigenvalues(r.problem, {{1, 1}});
  CHECK(phys.energy({1, 1}) ==
        doctest::Approx(r.energy_scale * red.energy({1, 1})).epsilon(1e-9));
}

TEST_CASE("a fixed domain cutoff gives the same levels") {
  sp::SolverConfig cfg;
  cfg.domain_cutoff = 12.0;
  cfg.threads = 1;
  const EigenTable t = sp::eigenvalues(make_pure_power(1.0, 0.5, 2.0, 1), {{0, 0}, {1, 1}}, cfg);
  CHECK(t.energy({0, 0}) == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(t.energy({1, 1}) == doctest::Approx(4.5).epsilon(1e-8));
}

TEST_CASE("solver errors") {
  CHECK(code_of([] { sp::SolverConfig{10}.validate(); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] {
          sp::eigenvalues(ReducedProblem{Family::QuadCentrifugal, 0.5, Formulation::Epsilon, -1},
                          {{0, 0}});
        }) == ErrorCode::FallingToCenter);
  CHECK(code_of([] { sp::eigenvalues(make_pure_power(1.0, 1.0, 2.0, 1), {{200, 0}}); }) ==
        ErrorCode::Domain);
}

TEST_CASE("linear potential ground state is the first Airy zero") {
  // p^2/2 + r: E = 2^(-1/3) * 2.338107410459767
  const EigenTable t = sp::eigenvalues(make_pure_power(1.0, 1.0, 1.0, 1), {{0, 0}});
  CHECK(t.energy({0, 0}) == doctest::Approx(2.338107410459767 / std::cbrt(2.0)).epsilon(1e-10));
}

TEST_CASE("funnel against an independent finite-difference solve") {
  // Second-order finite differences on (0, 40) with 4000 and 8001 points,
  // Richardson-extrapolated, for p^2/2 + 0.001 r - 1/r.
  const EigenTable t = sp::eigenvalues(make_funnel(1.0, 1e-3, 1.0), {{0, 0}});
  CHECK(t.energy({0, 0}) == doctest::Approx(-0.4985014931).epsilon(1e-9));
}
