#include "afm/closed_form.hpp"

#include <cmath>
#include <numbers>

#include "afm/error.hpp"

namespace afm::closed_form {

namespace {

constexpr const char* kModule = "closed_form";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(kModule, code, message);
}

void require_nonnegative_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    fail(ErrorCode::Domain, "beta must be nonnegative and finite");
  }
}

double residual_gate(double Y) { return 1e-12 * (1.0 + std::abs(Y)); }

double cubic_residual(double x, double Y) { return x * x * x + 3.0 * x - 2.0 * Y; }

double quartic_residual(double x, double Y, double sign) {
  return 4.0 * x * x * x * x + sign * 8.0 * x - 3.0 * Y;
}

// One Newton step on the quartic when rounding leaves the residual above the gate.
RootDiagnostics polish_quartic(double x, double Y, double sign) {
  double res = quartic_residual(x, Y, sign);
  if (std::abs(res) > residual_gate(Y)) {
    x -= res / (16.0 * x * x * x + sign * 8.0);
    res = quartic_residual(x, Y, sign);
  }
  return {x, res};
}

const double kCbrt2 = std::cbrt(2.0);
const double kSqrt3 = std::sqrt(3.0);

}  // namespace

RootDiagnostics cubic_root_F(double Y) {
  if (!(Y >= 0.0) || !std::isfinite(Y)) fail(ErrorCode::Domain, "F(Y) needs Y >= 0");
  const double s = Y + std::hypot(1.0, Y);
  const double a = std::cbrt(s);
  const double a_inv = std::cbrt(1.0 / s);  // = (sqrt(1+Y^2) - Y)^(1/3)
  // a - 1/a rewritten through a^3 - a^-3 = 2Y, free of cancellation near Y = 0.
  double x = 2.0 * Y / (a * a + 1.0 + a_inv * a_inv);
  double res = cubic_residual(x, Y);
  if (std::abs(res) > residual_gate(Y)) {
    x -= res / (3.0 * x * x + 3.0);
    res = cubic_residual(x, Y);
  }
  return {x, res};
}

double quartic_resolvent(double Y) {
  if (!(Y >= 0.0) || !std::isfinite(Y)) fail(ErrorCode::Domain, "V(Y) needs Y >= 0");
  const double a = std::cbrt(2.0 + std::sqrt(4.0 + Y * Y * Y));
  // a - Y/a = (a^6 - Y^3) / (a (a^4 + a^2 Y + Y^2)) and a^6 - Y^3 = 4 a^3.
  const double a2 = a * a;
  return 4.0 * a2 / (a2 * a2 + a2 * Y + Y * Y);
}

RootDiagnostics quartic_root_Gplus(double Y) {
  if (!(Y > 0.0) || !std::isfinite(Y)) fail(ErrorCode::Domain, "G+(Y) needs Y > 0");
  const double v = quartic_resolvent(Y);
  const double sv = std::sqrt(v);
  const double w = std::sqrt(4.0 / sv - v);
  // -sqrt(V)/2 + w/2, with the difference expanded through V^3 + 3YV - 4 = 0.
  const double x = 3.0 * Y * sv / ((2.0 + v * sv) * (w + sv));
  return polish_quartic(x, Y, 1.0);
}

RootDiagnostics quartic_root_Gminus(double Y) {
  if (!(Y >= 0.0) || !std::isfinite(Y)) fail(ErrorCode::Domain, "G-(Y) needs Y >= 0");
  const double v = quartic_resolvent(Y);
  const double sv = std::sqrt(v);
  const double x = 0.5 * sv + 0.5 * std::sqrt(4.0 / sv - v);
  return polish_quartic(x, Y, -1.0);
}

double kratzer_exact(double m, double a, const QuantumNumbers& q) {
  if (!(m > 0.0) || !(a > 0.0)) fail(ErrorCode::Domain, "kratzer needs m, a > 0");
  const double g = 2.0 * m * a * a;
  const double l = q.l() + 0.5;
  const double d = q.n() + 0.5 + std::sqrt(l * l + g);
  return -g / (d * d);
}

double kratzer_afm(double m, double a, NValue N) {
  if (!(m > 0.0) || !(a > 0.0)) fail(ErrorCode::Domain, "kratzer needs m, a > 0");
  const double g = 2.0 * m * a * a;
  return -g / (g + N.value() * N.value());
}

double kratzer_afm(double m, double a, const QuantumNumbers& q) {
  return kratzer_afm(m, a, n_coulomb(q));
}

double kratzer_denominator_gap(double m, double a, const QuantumNumbers& q) {
  const double l = q.l() + 0.5;
  return (2.0 * q.n() + 1.0) * l * (1.0 - std::sqrt(1.0 + 2.0 * m * a * a / (l * l)));
}

double kratzer_denominator_gap_limit(double m, double a, const QuantumNumbers& q) {
  return -(2.0 * q.n() + 1.0) * m * a * a / (q.l() + 0.5);
}

double quad_centrifugal_exact(double beta, int sign, const QuantumNumbers& q) {
  require_nonnegative_beta(beta);
  const double l2 = (2.0 * q.l() + 1.0) * (2.0 * q.l() + 1.0);
  const double arg = l2 + sign * 4.0 * beta;
  if (!(arg > 0.0)) {
    fail(ErrorCode::FallingToCenter, "(2l+1)^2 - 4 beta <= 0: spectrum unbounded below");
  }
  return 2.0 * (2.0 * q.n() + 1.0) + std::sqrt(arg);
}

double quad_centrifugal_afm(double beta, int sign, NValue N) {
  require_nonnegative_beta(beta);
  const double arg = N.value() * N.value() + sign * beta;
  if (!(arg > 0.0)) fail(ErrorCode::FallingToCenter, "N^2 - beta <= 0");
  return 2.0 * std::sqrt(arg);
}

double anharmonic_afm(double beta, NValue N) {
  require_nonnegative_beta(beta);
  if (beta == 0.0) return kSqrt3 * N.value();
  const double Y = std::pow(N.value() / beta, 2.0 / 3.0);
  const double g = quartic_root_Gminus(Y).value;
  return 2.0 * beta * Y * (g * g + 1.0 / g);
}

double quad_coulomb_afm(double beta, NValue N, Formulation formulation) {
  require_nonnegative_beta(beta);
  const double n = N.value();
  if (formulation == Formulation::Epsilon) {
    if (beta == 0.0) return kSqrt3 * n / 4.0;
    const double Y = (n / beta) * (n / beta);
    const double g = quartic_root_Gplus(Y).value;
    return 3.0 * beta / 8.0 * (Y / (g * g) - 4.0 / g);
  }
  if (beta == 0.0) return -8.0 / (3.0 * n * n);
  const double Y = (n * beta) * (n * beta);
  const double g = quartic_root_Gplus(Y).value;
  return 3.0 * beta * beta / 4.0 * (Y / (g * g) - 4.0 / g);
}

double funnel_afm(double beta, NValue N, Formulation formulation) {
  require_nonnegative_beta(beta);
  const double n = N.value();
  if (formulation == Formulation::Epsilon) {
    if (beta == 0.0) return std::pow(n / 2.0, 2.0 / 3.0);
    const double Y = (n / beta) * (n / beta);
    const double f = cubic_root_F(Y).value;
    return std::pow(beta, 2.0 / 3.0) * (Y / (f * f) - 2.0 / f);
  }
  if (beta == 0.0) return -std::pow(3.0, 5.0 / 3.0) / (4.0 * n * n);
  const double Y = (n * beta) * (n * beta);
  const double f = cubic_root_F(Y).value;
  return std::pow(3.0, 2.0 / 3.0) * beta * beta * (Y / (f * f) - 2.0 / f);
}

double funnel_afm_sinh(double beta, NValue N) {
  require_nonnegative_beta(beta);
  if (beta == 0.0) return std::pow(N.value() / 2.0, 2.0 / 3.0);
  const double Y = (N.value() / beta) * (N.value() / beta);
  const double s = std::sinh(std::asinh(Y) / 3.0);
  return std::pow(beta, 2.0 / 3.0) * (s - 1.0 / (4.0 * s));
}

double afm_energy(const ReducedProblem& problem, NValue N) {
  problem.validate();
  const double beta = problem.beta;
  switch (problem.family) {
    case Family::Kratzer:
      if (beta == 0.0) return 0.0;
      return kratzer_afm(0.5, std::sqrt(beta), N);
    case Family::QuadCentrifugal: return quad_centrifugal_afm(beta, problem.centrifugal_sign, N);
    case Family::Anharmonic: return anharmonic_afm(beta, N);
    case Family::QuadCoulomb: return quad_coulomb_afm(beta, N, problem.formulation);
    case Family::Funnel: return funnel_afm(beta, N, problem.formulation);
    default: break;
  }
  fail(ErrorCode::UnsupportedReduction, "no closed form for this family");
}

std::optional<double> exact_energy(const ReducedProblem& problem, const QuantumNumbers& q) {
  problem.validate();
  switch (problem.family) {
    case Family::Kratzer:
      if (problem.beta == 0.0) return 0.0;
      return kratzer_exact(0.5, std::sqrt(problem.beta), q);
    case Family::QuadCentrifugal:
      return quad_centrifugal_exact(problem.beta, problem.centrifugal_sign, q);
    default: return std::nullopt;
  }
}

double natural_start_exponent(Family family, Formulation formulation) {
  switch (family) {
    case Family::Kratzer:
    case Family::Funnel: return -1.0;
    case Family::QuadCoulomb: return formulation == Formulation::Epsilon ? 2.0 : -1.0;
    default: return 2.0;
  }
}

namespace asymptotic {

double cubic_root_small(double Y) { return 2.0 * Y / 3.0; }
double cubic_root_large(double Y) { return std::cbrt(2.0 * Y); }
double gplus_small(double Y) { return 3.0 * Y / 8.0; }
double gminus_small(double Y) { return kCbrt2 + Y / 8.0; }
double quartic_root_large(double Y) { return std::pow(0.75 * Y, 0.25); }

double quad_centrifugal_small_beta(double beta, int sign, NValue N) {
  return 2.0 * N.value() + sign * beta / N.value();
}

double anharmonic_small_beta(double beta, NValue N) {
  return kSqrt3 * N.value() + 4.0 * std::sqrt(2.0 * beta * N.value() / kSqrt3);
}

double anharmonic_large_beta(double beta, NValue N) {
  return 3.0 * std::cbrt(4.0 * beta * N.value() * N.value());
}

double quad_coulomb_small_beta(double beta, NValue N, Formulation formulation) {
  const double n = N.value();
  if (formulation == Formulation::Epsilon) {
    return kSqrt3 / 4.0 * n - std::sqrt(2.0 * beta * beta * beta / (n * kSqrt3));
  }
  return -8.0 / (3.0 * n * n) + 9.0 * std::pow(beta, 6) * n * n * n * n / 128.0;
}

double quad_coulomb_large_beta(double beta, NValue N, Formulation formulation) {
  const double n = N.value();
  if (formulation == Formulation::Epsilon) return -4.0 * beta * beta * beta / (3.0 * n * n);
  return kSqrt3 / 2.0 * beta * beta * beta * n;
}

double funnel_small_beta(double beta, NValue N, Formulation formulation) {
  const double n = N.value();
  if (formulation == Formulation::Epsilon) {
    return std::pow(n / 2.0, 2.0 / 3.0) - std::cbrt(std::pow(beta, 4) / (2.0 * n * n));
  }
  return -std::pow(3.0, 5.0 / 3.0) / (4.0 * n * n) +
         2.0 * n * n * std::pow(beta, 4) / std::pow(3.0, 4.0 / 3.0);
}

double funnel_large_beta(double beta, NValue N, Formulation formulation) {
  const double n = N.value();
  if (formulation == Formulation::Epsilon) {
    return -3.0 * std::pow(beta, 8.0 / 3.0) / (4.0 * n * n);
  }
  return std::pow(1.5 * std::pow(beta, 4) * n, 2.0 / 3.0);
}

}  // namespace asymptotic

}  // namespace afm::closed_form
