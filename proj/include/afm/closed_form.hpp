#pragma once

// Closed-form roots of the reduced cubic x^3 + 3x - 2Y = 0 and quartics
// 4x^4 +- 8x - 3Y = 0, and the AFM energies built on them for the reduced
// Kratzer, quadratic+centrifugal, anharmonic, quadratic+Coulomb and funnel
// Hamiltonians (see ReducedProblem for their forms).
//
// Reduced energies accept beta = 0 and return the limit value there.

#include <optional>

#include "afm/potentials.hpp"

namespace afm::closed_form {

struct RootDiagnostics {
  double value = 0.0;
  double residual = 0.0;  // polynomial evaluated at value
};

/// Positive root of x^3 + 3x - 2Y = 0:
///   F(Y) = [Y + sqrt(1+Y^2)]^(1/3) - [Y + sqrt(1+Y^2)]^(-1/3).
RootDiagnostics cubic_root_F(double Y);

/// Positive root of 4x^4 + 8x - 3Y = 0 (Y > 0).
RootDiagnostics quartic_root_Gplus(double Y);

/// Positive root of 4x^4 - 8x - 3Y = 0 (Y >= 0).
RootDiagnostics quartic_root_Gminus(double Y);

/// Resolvent V(Y) = (2 + sqrt(4 + Y^3))^(1/3) - Y (2 + sqrt(4 + Y^3))^(-1/3),
/// the real root of V^3 + 3 Y V - 4 = 0.
double quartic_resolvent(double Y);

double kratzer_exact(double m, double a, const QuantumNumbers& q);
/// -2 m a^2 / (2 m a^2 + N^2), with N = n + l + 1 for the QuantumNumbers overload.
double kratzer_afm(double m, double a, const QuantumNumbers& q);
double kratzer_afm(double m, double a, NValue N);
/// AFM denominator minus exact denominator,
///   (2n+1)(l+1/2) [1 - sqrt(1 + 2 m a^2 / (l+1/2)^2)].
double kratzer_denominator_gap(double m, double a, const QuantumNumbers& q);
/// Large-l / small-ma^2 form -(2n+1) m a^2 / (l + 1/2).
double kratzer_denominator_gap_limit(double m, double a, const QuantumNumbers& q);

/// 2(2n+1) + sqrt((2l+1)^2 +- 4 beta). Throws FallingToCenter when the root is not real.
double quad_centrifugal_exact(double beta, int sign, const QuantumNumbers& q);
/// 2 sqrt(N^2 +- beta).
double quad_centrifugal_afm(double beta, int sign, NValue N);

/// 2 beta Y (G-^2(Y) + 1/G-(Y)), Y = (N/beta)^(2/3).
double anharmonic_afm(double beta, NValue N);

/// Epsilon: (3 beta/8) [Y/G+^2 - 4/G+], Y = (N/beta)^2.
/// Eta:     (3 beta'^2/4) [Y/G+^2 - 4/G+], Y = (N beta')^2.
double quad_coulomb_afm(double beta, NValue N, Formulation formulation = Formulation::Epsilon);

/// Epsilon: beta^(2/3) [Y/F^2 - 2/F], Y = (N/beta)^2.
/// Eta:     3^(2/3) beta'^2 [Y/F^2 - 2/F], Y = (N beta')^2.
double funnel_afm(double beta, NValue N, Formulation formulation = Formulation::Epsilon);

/// The epsilon funnel energy through Y = sinh(3 theta):
///   beta^(2/3) [sinh(theta) - 1/(4 sinh(theta))].
double funnel_afm_sinh(double beta, NValue N);

/// AFM energy of a reduced problem with the given N.
double afm_energy(const ReducedProblem& problem, NValue N);

/// Exact reduced eigenvalue where one is known (Kratzer, quadratic+centrifugal).
std::optional<double> exact_energy(const ReducedProblem& problem, const QuantumNumbers& q);

/// Exponent of the starting potential whose N the family's AFM formula is written in.
double natural_start_exponent(Family family, Formulation formulation);

/// Leading small- and large-parameter forms, kept separate from the exact
/// formulas so both can be compared.
namespace asymptotic {

double cubic_root_small(double Y);     // 2Y/3
double cubic_root_large(double Y);     // (2Y)^(1/3)
double gplus_small(double Y);          // 3Y/8
double gminus_small(double Y);         // 2^(1/3) + Y/8
double quartic_root_large(double Y);   // (3Y/4)^(1/4)

double quad_centrifugal_small_beta(double beta, int sign, NValue N);  // 2N +- beta/N
double anharmonic_small_beta(double beta, NValue N);  // sqrt3 N + 4 sqrt(2 beta N / sqrt3)
double anharmonic_large_beta(double beta, NValue N);  // 3 (4 beta N^2)^(1/3)
double quad_coulomb_small_beta(double beta, NValue N, Formulation formulation);
double quad_coulomb_large_beta(double beta, NValue N, Formulation formulation);
double funnel_small_beta(double beta, NValue N, Formulation formulation);
double funnel_large_beta(double beta, NValue N, Formulation formulation);

}  // namespace asymptotic

}  // namespace afm::closed_form
