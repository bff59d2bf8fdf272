#include "afm/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "afm/error.hpp"

namespace afm {

namespace {

constexpr const char* kModule = "potentials";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(kModule, code, message);
}

bool permits_inverse_square(Family family) {
  return family == Family::Kratzer || family == Family::QuadCentrifugal;
}

bool close(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

// Checks that `terms` holds exactly the (exponent, sign) pairs listed; a sign
// of 0 accepts either sign.
void expect_shape(Family family, std::span<const PowerTerm> terms,
                  std::initializer_list<std::pair<double, int>> shape) {
  std::ostringstream msg;
  msg << to_string(family) << " expects exponents {";
  bool first = true;
  for (auto [exponent, sign] : shape) {
    msg << (first ? "" : ", ") << exponent;
    first = false;
  }
  msg << "}";
  if (terms.size() != shape.size()) fail(ErrorCode::InconsistentFamily, msg.str());
  for (auto [exponent, sign] : shape) {
    auto it = std::find_if(terms.begin(), terms.end(),
                           [&](const PowerTerm& t) { return t.exponent == exponent; });
    if (it == terms.end()) fail(ErrorCode::InconsistentFamily, msg.str());
    if (sign != 0 && it->sign != sign) {
      fail(ErrorCode::InconsistentFamily,
           msg.str() + " with sign " + std::to_string(sign) + " on r^" +
               std::to_string(exponent));
    }
  }
}

double coeff_of(const PotentialSpec& spec, double exponent) {
  const PowerTerm* t = spec.term_with_exponent(exponent);
  return t ? t->coeff : 0.0;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(ErrorCode::Domain, std::string(what) + " must be positive and finite");
  }
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::PurePower: return "pure-power";
    case Family::TwoPower: return "two-power";
    case Family::Kratzer: return "kratzer";
    case Family::QuadCentrifugal: return "quad-centrifugal";
    case Family::Anharmonic: return "anharmonic";
    case Family::QuadCoulomb: return "quad-coulomb";
    case Family::Funnel: return "funnel";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::PurePower, Family::TwoPower, Family::Kratzer, Family::QuadCentrifugal,
                   Family::Anharmonic, Family::QuadCoulomb, Family::Funnel}) {
    if (to_string(f) == name) return f;
  }
  fail(ErrorCode::Parse, "unknown family '" + std::string(name) + "'");
}

std::string_view to_string(Formulation formulation) {
  return formulation == Formulation::Epsilon ? "epsilon" : "eta";
}

Formulation formulation_from_string(std::string_view name) {
  if (name == "epsilon" || name == "eps") return Formulation::Epsilon;
  if (name == "eta") return Formulation::Eta;
  fail(ErrorCode::Parse, "unknown formulation '" + std::string(name) + "'");
}

double PowerTerm::value(double r) const { return sign * coeff * std::pow(r, exponent); }

double PowerTerm::derivative(double r) const {
  return sign * coeff * exponent * std::pow(r, exponent - 1.0);
}

QuantumNumbers::QuantumNumbers(int n, int l) : n_(n), l_(l) {
  if (n < 0 || l < 0) {
    fail(ErrorCode::Domain, "quantum numbers must be nonnegative, got (" + std::to_string(n) +
                                ", " + std::to_string(l) + ")");
  }
}

NValue::NValue(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(ErrorCode::Domain, "N must be positive and finite");
  }
}

NValue n_harmonic(const QuantumNumbers& q) { return NValue(2.0 * q.n() + q.l() + 1.5); }

NValue n_coulomb(const QuantumNumbers& q) { return NValue(q.n() + q.l() + 1.0); }

std::vector<QuantumNumbers> quantum_window(int max_index) {
  std::vector<QuantumNumbers> out;
  for (int l = 0; l <= max_index; ++l) {
    for (int n = 0; n <= max_index; ++n) out.emplace_back(n, l);
  }
  return out;
}

PotentialSpec::PotentialSpec(Family family, std::vector<PowerTerm> terms, double mass)
    : family_(family), terms_(std::move(terms)), mass_(mass) {
  require_positive(mass_, "mass");
  if (terms_.empty() || terms_.size() > 2) {
    fail(ErrorCode::InconsistentFamily, "a potential has one or two power terms");
  }
  for (const PowerTerm& t : terms_) {
    if (!(t.coeff >= 0.0) || !std::isfinite(t.coeff)) {
      fail(ErrorCode::Domain, "term coefficients must be nonnegative and finite");
    }
    if (t.sign != 1 && t.sign != -1) fail(ErrorCode::Domain, "term sign must be +1 or -1");
    if (t.exponent == 0.0 || !std::isfinite(t.exponent)) {
      fail(ErrorCode::Domain, "term exponent must be finite and nonzero");
    }
    if (t.exponent < -2.0 || (t.exponent == -2.0 && !permits_inverse_square(family_))) {
      fail(ErrorCode::Domain, std::string(to_string(family_)) + " requires exponents > -2");
    }
  }

  switch (family_) {
    case Family::PurePower:
      if (terms_.size() != 1) fail(ErrorCode::InconsistentFamily, "pure-power has one term");
      break;
    case Family::TwoPower:
      if (terms_.size() != 2 || terms_[0].exponent == terms_[1].exponent) {
        fail(ErrorCode::InconsistentFamily, "two-power needs two distinct exponents");
      }
      break;
    case Family::Kratzer: {
      expect_shape(family_, terms_, {{-2.0, 1}, {-1.0, -1}});
      const double a = coeff_of(*this, -1.0) / 2.0;
      if (!close(coeff_of(*this, -2.0), a * a)) {
        fail(ErrorCode::InconsistentFamily, "kratzer needs coefficients {a^2, 2a}");
      }
      break;
    }
    case Family::QuadCentrifugal: expect_shape(family_, terms_, {{2.0, 1}, {-2.0, 0}}); break;
    case Family::Anharmonic: expect_shape(family_, terms_, {{2.0, 1}, {1.0, 1}}); break;
    case Family::QuadCoulomb: expect_shape(family_, terms_, {{2.0, 1}, {-1.0, -1}}); break;
    case Family::Funnel: expect_shape(family_, terms_, {{1.0, 1}, {-1.0, -1}}); break;
  }
}

const PowerTerm* PotentialSpec::term_with_exponent(double exponent) const {
  for (const PowerTerm& t : terms_) {
    if (t.exponent == exponent) return &t;
  }
  return nullptr;
}

double PotentialSpec::leading_exponent() const {
  double lead = -std::numeric_limits<double>::infinity();
  for (const PowerTerm& t : terms_) {
    if (t.coeff > 0.0) lead = std::max(lead, t.exponent);
  }
  return lead;
}

PotentialSpec make_pure_power(double mass, double coeff, double exponent, int sign) {
  return PotentialSpec(Family::PurePower, {{coeff, exponent, sign}}, mass);
}

PotentialSpec make_two_power(double mass, PowerTerm first, PowerTerm second) {
  return PotentialSpec(Family::TwoPower, {first, second}, mass);
}

PotentialSpec make_kratzer(double mass, double a) {
  return PotentialSpec(Family::Kratzer, {{a * a, -2.0, 1}, {2.0 * a, -1.0, -1}}, mass);
}

PotentialSpec make_quad_centrifugal(double mass, double a, double b, int sign) {
  return PotentialSpec(Family::QuadCentrifugal, {{a, 2.0, 1}, {b, -2.0, sign}}, mass);
}

PotentialSpec make_anharmonic(double mass, double a, double b) {
  return PotentialSpec(Family::Anharmonic, {{a, 2.0, 1}, {2.0 * b, 1.0, 1}}, mass);
}

PotentialSpec make_quad_coulomb(double mass, double a, double b) {
  return PotentialSpec(Family::QuadCoulomb, {{a, 2.0, 1}, {b, -1.0, -1}}, mass);
}

PotentialSpec make_funnel(double mass, double a, double b) {
  return PotentialSpec(Family::Funnel, {{a, 1.0, 1}, {b, -1.0, -1}}, mass);
}

double evaluate(std::span<const PowerTerm> terms, double r) {
  if (!(r > 0.0)) fail(ErrorCode::Domain, "potential evaluated at r <= 0");
  double v = 0.0;
  for (const PowerTerm& t : terms) v += t.value(r);
  return v;
}

double evaluate(const PotentialSpec& spec, double r) { return evaluate(spec.terms(), r); }

double evaluate_derivative(std::span<const PowerTerm> terms, double r) {
  if (!(r > 0.0)) fail(ErrorCode::Domain, "potential derivative evaluated at r <= 0");
  double dv = 0.0;
  for (const PowerTerm& t : terms) dv += t.derivative(r);
  return dv;
}

void ReducedProblem::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    fail(ErrorCode::Domain, "beta must be nonnegative and finite");
  }
  if (family == Family::PurePower || family == Family::TwoPower) {
    fail(ErrorCode::UnsupportedReduction,
         std::string(to_string(family)) + " has no single-parameter reduction");
  }
  if (formulation == Formulation::Eta && family != Family::QuadCoulomb &&
      family != Family::Funnel) {
    fail(ErrorCode::UnsupportedReduction,
         "eta formulation exists only for quad-coulomb and funnel");
  }
  if (centrifugal_sign != 1 && centrifugal_sign != -1) {
    fail(ErrorCode::Domain, "centrifugal sign must be +1 or -1");
  }
}

Reduction reduce(const PotentialSpec& spec, Formulation formulation) {
  const double m = spec.mass();
  Reduction out;
  out.problem.family = spec.family();
  out.problem.formulation = formulation;
  if (formulation == Formulation::Eta && spec.family() != Family::QuadCoulomb &&
      spec.family() != Family::Funnel) {
    fail(ErrorCode::UnsupportedReduction,
         "eta formulation exists only for quad-coulomb and funnel");
  }

  switch (spec.family()) {
    case Family::PurePower:
    case Family::TwoPower:
      fail(ErrorCode::UnsupportedReduction,
           std::string(to_string(spec.family())) + " has no single-parameter reduction");
    case Family::Kratzer: {
      const double a = coeff_of(spec, -1.0) / 2.0;
      out.problem.beta = 2.0 * m * a * a;
      out.energy_scale = 1.0;
      break;
    }
    case Family::QuadCentrifugal: {
      const double a = coeff_of(spec, 2.0);
      require_positive(a, "quadratic coefficient");
      out.problem.beta = 2.0 * m * coeff_of(spec, -2.0);
      out.problem.centrifugal_sign = spec.term_with_exponent(-2.0)->sign;
      out.energy_scale = std::sqrt(a / (2.0 * m));
      break;
    }
    case Family::Anharmonic: {
      const double a = coeff_of(spec, 2.0);
      const double b = coeff_of(spec, 1.0) / 2.0;
      require_positive(a, "quadratic coefficient");
      out.problem.beta = 3.0 * b * b / 16.0 * std::sqrt(3.0 * m / (2.0 * a * a * a));
      out.energy_scale = std::sqrt(2.0 * a / (3.0 * m));
      break;
    }
    case Family::QuadCoulomb: {
      const double a = coeff_of(spec, 2.0);
      const double b = coeff_of(spec, -1.0);
      if (formulation == Formulation::Epsilon) {
        require_positive(a, "quadratic coefficient");
        out.problem.beta = 0.25 * std::pow(54.0 * m * m * m * std::pow(b, 4) / a, 1.0 / 6.0);
        out.energy_scale = 4.0 * std::sqrt(2.0 * a / (3.0 * m));
      } else {
        require_positive(b, "coulomb coefficient");
        out.problem.beta = 4.0 * std::pow(a / (54.0 * m * m * m * std::pow(b, 4)), 1.0 / 6.0);
        out.energy_scale = 3.0 * m * b * b / 16.0;
      }
      break;
    }
    case Family::Funnel: {
      const double a = coeff_of(spec, 1.0);
      const double b = coeff_of(spec, -1.0);
      if (formulation == Formulation::Epsilon) {
        require_positive(a, "linear coefficient");
        out.problem.beta = std::pow(4.0 * m * m * b * b * b / (27.0 * a), 0.25);
        out.energy_scale = 3.0 * std::cbrt(a * a / (2.0 * m));
      } else {
        require_positive(b, "coulomb coefficient");
        out.problem.beta = std::pow(27.0 * a / (4.0 * m * m * b * b * b), 0.25);
        out.energy_scale = 2.0 * m * b * b / std::pow(3.0, 5.0 / 3.0);
      }
      break;
    }
  }
  return out;
}

PotentialSpec embed(const ReducedProblem& problem) {
  problem.validate();
  const double beta = problem.beta;
  const bool eps = problem.formulation == Formulation::Epsilon;
  switch (problem.family) {
    case Family::Kratzer: return make_kratzer(0.5, std::sqrt(beta));
    case Family::QuadCentrifugal:
      return make_quad_centrifugal(0.5, 1.0, beta, problem.centrifugal_sign);
    case Family::Anharmonic: return make_anharmonic(2.0, 3.0, 4.0 * std::sqrt(beta));
    case Family::QuadCoulomb:
      return eps ? make_quad_coulomb(8.0 / 3.0, 0.25, std::pow(beta, 1.5))
                 : make_quad_coulomb(8.0 / 3.0, std::pow(beta, 6), std::sqrt(2.0));
    case Family::Funnel:
      return eps ? make_funnel(1.5, 1.0 / 3.0, std::pow(beta, 4.0 / 3.0))
                 : make_funnel(1.5, std::pow(beta, 4), std::cbrt(3.0));
    default: break;
  }
  fail(ErrorCode::UnsupportedReduction, "no reduced Hamiltonian for this family");
}

double reference_coupling(double m, double G, double a, double m_ref) {
  require_positive(m, "mass");
  require_positive(a, "inverse length");
  require_positive(m_ref, "reference mass");
  return m * G / (m_ref * a * a);
}

double scale_energy(double e_ref, double m, double G, double a, double m_ref) {
  (void)reference_coupling(m, G, a, m_ref);
  return m_ref * a * a / m * e_ref;
}

std::vector<PowerTerm> scaled_terms(std::span<const PowerTerm> shape, double G, double a) {
  require_positive(a, "inverse length");
  std::vector<PowerTerm> out;
  out.reserve(shape.size());
  for (PowerTerm t : shape) {
    const double c = G * t.coeff * std::pow(a, t.exponent);
    t.coeff = std::abs(c);
    if (c < 0.0) t.sign = -t.sign;
    out.push_back(t);
  }
  return out;
}

PotentialSpec scaled(const PotentialSpec& shape, double G, double a, double mass) {
  return PotentialSpec(shape.family(), scaled_terms(shape.terms(), G, a), mass);
}

}  // namespace afm
