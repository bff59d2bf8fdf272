#include "afm/afm_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "afm/error.hpp"

namespace afm::engine {

namespace {

constexpr const char* kModule = "afm_engine";
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(kModule, code, message);
}

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

double start_potential(double eta, double r) { return sgn(eta) * std::pow(r, eta); }

// K(r) = V'(r) / P'(r) with P'(r) = |eta| r^(eta - 1).
double k_of_r(std::span<const PowerTerm> v, double eta, double r) {
  return evaluate_derivative(v, r) / (std::abs(eta) * std::pow(r, eta - 1.0));
}

bool all_zero(std::span<const PowerTerm> v) {
  return std::all_of(v.begin(), v.end(), [](const PowerTerm& t) { return t.coeff == 0.0; });
}

// When V = k P exactly, returns k.
std::optional<double> proportionality(std::span<const PowerTerm> v, double eta) {
  double k = 0.0;
  for (const PowerTerm& t : v) {
    if (t.coeff == 0.0) continue;
    if (t.exponent != eta) return std::nullopt;
    k += t.sign * t.coeff * sgn(eta);
  }
  return k;
}

// Range of K over r in (0, inf), as an open interval.
struct Interval {
  double lo;
  double hi;
};

// K(r) = sum sign c lambda r^(lambda - eta) / |eta|: each tail is set by the
// term with the extreme power of r, or is finite when that power is zero.
double k_tail(std::span<const PowerTerm> v, double eta, bool at_zero) {
  double extreme = at_zero ? kInf : -kInf;
  for (const PowerTerm& t : v) {
    if (t.coeff == 0.0) continue;
    const double d = t.exponent - eta;
    extreme = at_zero ? std::min(extreme, d) : std::max(extreme, d);
  }
  double sum = 0.0;
  for (const PowerTerm& t : v) {
    if (t.coeff == 0.0 || t.exponent - eta != extreme) continue;
    sum += t.sign * t.coeff * t.exponent / std::abs(eta);
  }
  const bool diverges = at_zero ? extreme < 0.0 : extreme > 0.0;
  if (diverges) return sum > 0.0 ? kInf : -kInf;
  return extreme == 0.0 ? sum : 0.0;
}

Interval k_range(std::span<const PowerTerm> v, double eta) {
  const double k_small = k_tail(v, eta, true);
  const double k_large = k_tail(v, eta, false);
  return {std::min(k_small, k_large), std::max(k_small, k_large)};
}

double invert_k_closed_form(const PowerTerm& t, double eta, double nu) {
  const double ratio = std::abs(eta) * nu / (t.sign * t.coeff * t.exponent);
  if (!(ratio > 0.0)) {
    fail(ErrorCode::InversionFailed, "nu = " + std::to_string(nu) + " is outside the range of K");
  }
  return std::pow(ratio, 1.0 / (t.exponent - eta));
}

// Bisection on log r for a monotone K.
double invert_k_numeric(std::span<const PowerTerm> v, double eta, double nu) {
  auto f = [&](double x) { return k_of_r(v, eta, std::exp(x)) - nu; };
  const double k_lo = k_of_r(v, eta, std::exp(-0.5));
  const double k_hi = k_of_r(v, eta, std::exp(0.5));
  if (std::abs(k_hi - k_lo) <= 1e-12 * std::max(std::abs(k_hi), std::abs(k_lo))) {
    fail(ErrorCode::Degenerate, "K is constant: V is proportional to P");
  }
  const bool increasing = k_hi > k_lo;
  const double f0 = f(0.0);
  if (f0 == 0.0) return 1.0;
  // Move towards the root: up in r when K must grow and K is increasing.
  const double dir = ((f0 < 0.0) == increasing) ? 1.0 : -1.0;
  double x_near = 0.0;
  double f_near = f0;
  double step = 0.5;
  double x_far = 0.0;
  bool bracketed = false;
  for (int i = 0; i < 64 && std::abs(x_near) < 650.0; ++i) {
    x_far = x_near + dir * step;
    const double f_far = f(x_far);
    if (!std::isfinite(f_far)) break;
    // A monotone K keeps moving in one direction along the walk.
    if ((increasing ? 1.0 : -1.0) * dir * (f_far - f_near) < 0.0) {
      fail(ErrorCode::InversionFailed, "K is not monotone on the search bracket");
    }
    if ((f_far > 0.0) != (f0 > 0.0) || f_far == 0.0) {
      bracketed = true;
      break;
    }
    x_near = x_far;
    f_near = f_far;
    step *= 2.0;
  }
  if (!bracketed) {
    fail(ErrorCode::InversionFailed, "no r with K(r) = " + std::to_string(nu));
  }
  double a = std::min(x_near, x_far);
  double b = std::max(x_near, x_far);
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) return std::exp(mid);
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return std::exp(0.5 * (a + b));
}

// Maps t in R onto the open interval (lo, hi).
struct IntervalMap {
  double lo;
  double hi;

  double operator()(double t) const {
    if (std::isfinite(lo) && std::isfinite(hi)) {
      // Logistic map, written to keep precision near both ends.
      if (t >= 0.0) {
        const double e = std::exp(-t);
        return hi - (hi - lo) * e / (1.0 + e);
      }
      const double e = std::exp(t);
      return lo + (hi - lo) * e / (1.0 + e);
    }
    if (std::isfinite(lo)) return lo + std::exp(t);
    if (std::isfinite(hi)) return hi - std::exp(-t);
    return t;
  }

  double inverse(double nu) const {
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const double u = (nu - lo) / (hi - lo);
      return std::log(u / (1.0 - u));
    }
    if (std::isfinite(lo)) return std::log(nu - lo);
    if (std::isfinite(hi)) return -std::log(hi - nu);
    return nu;
  }
};

AfmSolution exact_solution(double k, const StartingPotential& start, NValue N, double m) {
  const double z = start.a + k;
  if (!(z > 0.0)) {
    fail(ErrorCode::NoMinimum, "V proportional to P leaves a nonpositive total strength");
  }
  AfmSolution sol;
  sol.nu0 = k;
  sol.energy = power_law_energy(m, z, start.eta, N);
  const double y = N.value() * N.value() / m;
  sol.mean_point = std::pow(y / (std::abs(start.eta) * z), 1.0 / (start.eta + 2.0));
  sol.stationarity_residual = 0.0;
  sol.degenerate = true;
  return sol;
}

}  // namespace

void StartingPotential::validate() const {
  if (eta == 0.0 || !std::isfinite(eta)) fail(ErrorCode::Domain, "eta must be finite and nonzero");
  if (!(eta > -2.0)) fail(ErrorCode::Domain, "eta must exceed -2");
  if (!(a >= 0.0) || !std::isfinite(a)) fail(ErrorCode::Domain, "a must be nonnegative");
}

double power_law_energy(double m, double a, double lambda, NValue N) {
  if (!(lambda > -2.0) || lambda == 0.0) {
    fail(ErrorCode::Domain, "power-law exponent must satisfy lambda > -2, lambda != 0");
  }
  if (!(a > 0.0) || !(m > 0.0)) fail(ErrorCode::Domain, "a and m must be positive");
  const double y = N.value() * N.value() / m;
  return (2.0 + lambda) / (2.0 * lambda) * std::pow(a * std::abs(lambda), 2.0 / (lambda + 2.0)) *
         std::pow(y, lambda / (lambda + 2.0));
}

double power_law_energy_slope(double m, double a, double lambda, NValue N) {
  if (!(lambda > -2.0) || lambda == 0.0) {
    fail(ErrorCode::Domain, "power-law exponent must satisfy lambda > -2, lambda != 0");
  }
  if (!(a > 0.0) || !(m > 0.0)) fail(ErrorCode::Domain, "a and m must be positive");
  const double y = N.value() * N.value() / m;
  const double p = lambda / (lambda + 2.0);
  return std::pow(std::abs(lambda), 2.0 / (lambda + 2.0)) / lambda * std::pow(y / a, p);
}

double mean_point_J(std::span<const PowerTerm> v, double eta, double nu) {
  if (eta == 0.0) fail(ErrorCode::Domain, "eta must be nonzero");
  if (all_zero(v) || proportionality(v, eta)) {
    fail(ErrorCode::Degenerate, "K is constant: V is proportional to P");
  }
  std::vector<const PowerTerm*> live;
  for (const PowerTerm& t : v) {
    if (t.coeff != 0.0) live.push_back(&t);
  }
  if (live.size() == 1) return invert_k_closed_form(*live.front(), eta, nu);
  return invert_k_numeric(v, eta, nu);
}

double auxiliary_energy(std::span<const PowerTerm> v, const StartingPotential& start, NValue N,
                        double m, double nu) {
  const double j = mean_point_J(v, start.eta, nu);
  return power_law_energy(m, start.a + nu, start.eta, N) + evaluate(v, j) -
         nu * start_potential(start.eta, j);
}

double auxiliary_energy_slope(std::span<const PowerTerm> v, const StartingPotential& start,
                              NValue N, double m, double nu) {
  const double j = mean_point_J(v, start.eta, nu);
  return power_law_energy_slope(m, start.a + nu, start.eta, N) - start_potential(start.eta, j);
}

AfmSolution solve(std::span<const PowerTerm> v, const StartingPotential& start, NValue N,
                  double m) {
  start.validate();
  if (!(m > 0.0)) fail(ErrorCode::Domain, "mass must be positive");
  if (all_zero(v)) return exact_solution(0.0, start, N, m);
  if (auto k = proportionality(v, start.eta)) return exact_solution(*k, start, N, m);

  Interval range = k_range(v, start.eta);
  range.lo = std::max(range.lo, -start.a);
  if (!(range.hi > range.lo)) {
    fail(ErrorCode::NoMinimum, "no admissible auxiliary field: a + nu > 0 and nu in range of K");
  }
  const IntervalMap map{range.lo, range.hi};
  auto slope = [&](double t) {
    return auxiliary_energy_slope(v, start, N, m, map(t));
  };

  // Expand geometrically around the starting field until dE/dnu changes sign.
  const double nu_start = (range.lo < 1.0 && 1.0 < range.hi) ? 1.0
                          : std::isfinite(range.lo) && std::isfinite(range.hi)
                              ? 0.5 * (range.lo + range.hi)
                              : (std::isfinite(range.lo) ? range.lo + std::max(1.0, std::abs(range.lo))
                                                         : range.hi - std::max(1.0, std::abs(range.hi)));
  const double t0 = map.inverse(nu_start);
  const double s0 = slope(t0);
  double t_in = t0;
  double t_out = t0;
  bool bracketed = s0 == 0.0;
  for (double step = 0.25; !bracketed && step < 2048.0; step *= 2.0) {
    for (double dir : {-1.0, 1.0}) {
      const double t = t0 + dir * step;
      const double nu = map(t);
      if (!std::isfinite(nu) || nu <= range.lo || nu >= range.hi) continue;
      double s;
      try {
        s = slope(t);
      } catch (const Error&) {
        continue;
      }
      if (!std::isfinite(s)) continue;
      if ((s > 0.0) != (s0 > 0.0) || s == 0.0) {
        t_in = t0;
        t_out = t;
        bracketed = true;
        break;
      }
    }
  }
  if (!bracketed) {
    fail(ErrorCode::NoMinimum, "dE/dnu keeps one sign over the admissible auxiliary fields");
  }

  double lo = std::min(t_in, t_out);
  double hi = std::max(t_in, t_out);
  double s_lo = slope(lo);
  if (s0 != 0.0) {
    for (int i = 0; i < 400; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double s_mid = slope(mid);
      if (s_mid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((s_mid > 0.0) == (s_lo > 0.0)) {
        lo = mid;
        s_lo = s_mid;
      } else {
        hi = mid;
      }
    }
  }

  AfmSolution sol;
  sol.nu0 = map(0.5 * (lo + hi));
  sol.mean_point = mean_point_J(v, start.eta, sol.nu0);
  sol.energy = power_law_energy(m, start.a + sol.nu0, start.eta, N) + evaluate(v, sol.mean_point) -
               sol.nu0 * start_potential(start.eta, sol.mean_point);
  sol.stationarity_residual =
      std::abs(power_law_energy_slope(m, start.a + sol.nu0, start.eta, N) -
               start_potential(start.eta, sol.mean_point));
  return sol;
}

AfmSolution solve(const PotentialSpec& spec, double eta, NValue N) {
  StartingPotential start{eta, 0.0};
  std::vector<PowerTerm> rest;
  for (const PowerTerm& t : spec.terms()) {
    if (t.exponent == eta && t.sign == static_cast<int>(sgn(eta)) && start.a == 0.0) {
      start.a = t.coeff;
    } else {
      rest.push_back(t);
    }
  }
  return solve(rest, start, N, spec.mass());
}

double perturbative_energy(std::span<const PowerTerm> v_small, double sigma,
                           const StartingPotential& start, NValue N, double m) {
  start.validate();
  if (!(start.a > 0.0)) fail(ErrorCode::Domain, "perturbative form needs a > 0");
  const double e0 = power_law_energy(m, start.a, start.eta, N);
  if (sigma == 0.0) return e0;
  const std::vector<PowerTerm> v = scaled_terms(v_small, sigma, 1.0);
  const AfmSolution sol = solve(v, start, N, m);
  return e0 + evaluate(v, sol.mean_point);
}

}  // namespace afm::engine
