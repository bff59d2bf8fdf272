#pragma once

// Potential families, their dimensionless reductions and the energy scaling law.
//
// Units: hbar = 1. A PotentialSpec describes
//   H = p^2 / (2 m) + sum_i sign_i * coeff_i * r^exponent_i
// for one of the named families below.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace afm {

enum class Family {
  PurePower,
  TwoPower,
  Kratzer,          // a^2/r^2 - 2a/r
  QuadCentrifugal,  // a r^2 +- b/r^2
  Anharmonic,       // a r^2 + 2 b r
  QuadCoulomb,      // a r^2 - b/r
  Funnel,           // a r - b/r
};

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

// Which term of the reduced Hamiltonian carries the control parameter.
enum class Formulation { Epsilon, Eta };

std::string_view to_string(Formulation formulation);
Formulation formulation_from_string(std::string_view name);

/// One term sign * coeff * r^exponent. The sign is stored explicitly so that a
/// repulsive r^-2 (positive sign, negative exponent) can be written down.
struct PowerTerm {
  double coeff = 0.0;
  double exponent = 0.0;
  int sign = 1;

  double value(double r) const;
  double derivative(double r) const;

  friend bool operator==(const PowerTerm&, const PowerTerm&) = default;
};

/// Radial and orbital quantum numbers, both nonnegative.
class QuantumNumbers {
 public:
  QuantumNumbers(int n, int l);

  int n() const noexcept { return n_; }
  int l() const noexcept { return l_; }

  friend bool operator==(const QuantumNumbers&, const QuantumNumbers&) = default;
  friend auto operator<=>(const QuantumNumbers&, const QuantumNumbers&) = default;

 private:
  int n_;
  int l_;
};

/// The quantum-number combination N entering a power-law spectrum; N > 0.
class NValue {
 public:
  explicit NValue(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// N = 2n + l + 3/2, exact for the harmonic oscillator.
NValue n_harmonic(const QuantumNumbers& q);
/// N = n + l + 1, exact for the Coulomb potential.
NValue n_coulomb(const QuantumNumbers& q);

/// All (n, l) with 0 <= n, l <= max_index, ordered by l then n.
std::vector<QuantumNumbers> quantum_window(int max_index);

class PotentialSpec {
 public:
  /// Validates coefficients, exponents and family/term consistency.
  PotentialSpec(Family family, std::vector<PowerTerm> terms, double mass);

  Family family() const noexcept { return family_; }
  std::span<const PowerTerm> terms() const noexcept { return terms_; }
  double mass() const noexcept { return mass_; }

  /// Returns the term with the given exponent, or nullptr.
  const PowerTerm* term_with_exponent(double exponent) const;

  /// Largest exponent among terms with a nonzero coefficient.
  double leading_exponent() const;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;

 private:
  Family family_;
  std::vector<PowerTerm> terms_;
  double mass_;
};

PotentialSpec make_pure_power(double mass, double coeff, double exponent, int sign);
PotentialSpec make_two_power(double mass, PowerTerm first, PowerTerm second);
PotentialSpec make_kratzer(double mass, double a);
PotentialSpec make_quad_centrifugal(double mass, double a, double b, int sign);
PotentialSpec make_anharmonic(double mass, double a, double b);
PotentialSpec make_quad_coulomb(double mass, double a, double b);
PotentialSpec make_funnel(double mass, double a, double b);

/// V(r) = sum sign * coeff * r^exponent. Throws for r <= 0.
double evaluate(const PotentialSpec& spec, double r);
double evaluate(std::span<const PowerTerm> terms, double r);
double evaluate_derivative(std::span<const PowerTerm> terms, double r);

/// A dimensionless Hamiltonian controlled by a single parameter.
///
/// Epsilon forms:
///   Kratzer          p^2 + beta/r^2 - 2 sqrt(beta)/r      (beta = 2 m a^2)
///   QuadCentrifugal  p^2 + r^2 +- beta/r^2
///   Anharmonic       p^2/4 + 3 r^2 + 8 sqrt(beta) r
///   QuadCoulomb      3 p^2/16 + r^2/4 - beta^(3/2)/r
///   Funnel           p^2/3 + r/3 - beta^(4/3)/r
/// Eta forms (beta' = 1/beta):
///   QuadCoulomb      3 p^2/16 - sqrt(2)/r + beta'^6 r^2
///   Funnel           p^2/3 - 3^(1/3)/r + beta'^4 r
struct ReducedProblem {
  Family family = Family::Funnel;
  double beta = 0.0;
  Formulation formulation = Formulation::Epsilon;
  int centrifugal_sign = 1;  // only meaningful for QuadCentrifugal

  void validate() const;
};

struct Reduction {
  ReducedProblem problem;
  double energy_scale = 1.0;
};

/// E(m, a, b; n, l) = energy_scale * eps(beta; n, l).
Reduction reduce(const PotentialSpec& spec, Formulation formulation = Formulation::Epsilon);

/// The reduced Hamiltonian written as a PotentialSpec; reduce(embed(p)) == {p, 1}.
PotentialSpec embed(const ReducedProblem& problem);

/// E(m, G, a) = (m_ref a^2 / m) * E(m_ref, m G / (m_ref a^2), 1).
/// `e_ref` must be the energy of the reference problem at coupling
/// reference_coupling(m, G, a, m_ref) and unit inverse length.
double scale_energy(double e_ref, double m, double G, double a, double m_ref);
double reference_coupling(double m, double G, double a, double m_ref);

/// Terms of G * v(a r) where v is given by `shape`.
std::vector<PowerTerm> scaled_terms(std::span<const PowerTerm> shape, double G, double a);

/// The potential G * v(a r) with mass `mass`. Families whose term ratios are
/// pinned (Kratzer) only survive scalings that preserve the ratio.
PotentialSpec scaled(const PotentialSpec& shape, double G, double a, double mass);

}  // namespace afm
