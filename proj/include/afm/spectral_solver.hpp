#pragma once

// Numerical bound-state spectrum of the radial Schrodinger equation
//   -u''/(2m) + [V(r) + l(l+1)/(2m r^2)] u = E u,  u(0) = 0,
// by a Galerkin method in the basis u_k(r) = x^s e^(-x/2) L_k^(2s)(x), x = r/h,
// k < M. Any r^-2 term is folded into the centrifugal barrier, which fixes
// s = lambda + 1 with lambda(lambda+1) = l(l+1) + 2m c_-2. Every matrix
// element is a polynomial moment of a generalized Laguerre weight and is
// integrated exactly by Gauss quadrature, so the eigenvalues are variational
// upper bounds. Each l is one dense eigenproblem; the scale h minimizes the
// sum of the requested eigenvalues, searched upward from a guess tied to the
// outer classical turning point of the highest requested level.

#include <vector>

#include "afm/eigen_table.hpp"
#include "afm/potentials.hpp"

namespace afm::spectral {

struct SolverConfig {
  int mesh_size = 100;         // M; reported values use 3M/2, the estimate compares with M
  double extent_factor = 2.5;  // basis extent / outer turning point for the first scale guess
  double domain_cutoff = 0.0;  // fixed basis extent in length units; 0 picks it per level
  bool estimate_accuracy = true;
  unsigned threads = 0;        // 0: one task per l

  void validate() const;
};

/// Eigenvalues for every requested (n, l), with an accuracy estimate taken as
/// the change between basis sizes M and 3M/2.
/// Throws FallingToCenter for an attractive r^-2 too strong for some l, and
/// Convergence when a level of a non-confining potential is not bound.
EigenTable eigenvalues(const PotentialSpec& spec, const std::vector<QuantumNumbers>& levels,
                       const SolverConfig& config = {});

/// Same, for a reduced problem; entries carry its beta and formulation.
EigenTable eigenvalues(const ReducedProblem& problem, const std::vector<QuantumNumbers>& levels,
                       const SolverConfig& config = {});

/// <r^k> in the state (n, l).
double expectation_r_power(const PotentialSpec& spec, const QuantumNumbers& q, double k,
                           const SolverConfig& config = {});

}  // namespace afm::spectral
