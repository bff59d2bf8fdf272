#pragma once

// Generic auxiliary field machinery for H_a = p^2/2m + a P(r) + V(r) with a
// power-law starting potential P(r) = sgn(eta) r^eta.
//
// With K(r) = V'(r) / P'(r) and J = K^-1, the auxiliary energy is
//   E_a(nu) = e(a + nu) + V(J(nu)) - nu P(J(nu)),
// where e(z) is the power-law spectrum of p^2/2m + z P(r). The approximate
// eigenvalue is E_a at its stationary point nu0, where e'(a + nu0) = P(J(nu0)).

#include <span>

#include "afm/potentials.hpp"

namespace afm::engine {

struct StartingPotential {
  double eta = 2.0;  // exponent of P(r) = sgn(eta) r^eta; nonzero
  double a = 0.0;    // coefficient of the a P(r) part of H_a, >= 0

  void validate() const;
};

struct AfmSolution {
  double nu0 = 0.0;         // stationary auxiliary field (signed; negative when K < 0)
  double mean_point = 0.0;  // J(nu0)
  double energy = 0.0;      // E_a(nu0)
  double stationarity_residual = 0.0;  // |dE_a/dnu| at nu0
  bool degenerate = false;  // V proportional to P; the result is exact
};

/// Eigenvalues of p^2/2m + a sgn(lambda) r^lambda:
///   (2 + lambda)/(2 lambda) (a |lambda|)^(2/(lambda+2)) (N^2/m)^(lambda/(lambda+2)).
double power_law_energy(double m, double a, double lambda, NValue N);

/// d/da of power_law_energy.
double power_law_energy_slope(double m, double a, double lambda, NValue N);

/// The radius r > 0 solving K(r) = nu, i.e. |eta| nu r^(eta-1) = V'(r).
/// Single-term V uses the closed form; otherwise K is inverted by bisection.
/// Throws Degenerate when K is constant and InversionFailed when nu is not in
/// the range of a monotone K.
double mean_point_J(std::span<const PowerTerm> v, double eta, double nu);

/// E_a(nu) evaluated directly; nu must lie in the admissible range.
double auxiliary_energy(std::span<const PowerTerm> v, const StartingPotential& start, NValue N,
                        double m, double nu);

/// dE_a/dnu = e'(a + nu) - P(J(nu)).
double auxiliary_energy_slope(std::span<const PowerTerm> v, const StartingPotential& start,
                              NValue N, double m, double nu);

/// Locates the stationary point of E_a(nu). Throws NoMinimum when none exists.
AfmSolution solve(std::span<const PowerTerm> v, const StartingPotential& start, NValue N,
                  double m);

/// Splits `spec` into a P(r) + V(r) using the term with exponent eta (and the
/// sign of P) as the a P(r) part, then solves.
AfmSolution solve(const PotentialSpec& spec, double eta, NValue N);

/// First-order form e(a) + sigma v(J(nu0)), with nu0 taken from
/// solve(sigma * v_small).
double perturbative_energy(std::span<const PowerTerm> v_small, double sigma,
                           const StartingPotential& start, NValue N, double m);

}  // namespace afm::engine
