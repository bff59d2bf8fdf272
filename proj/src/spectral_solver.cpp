#include "afm/spectral_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <optional>

#include "afm/error.hpp"

namespace afm::spectral {

namespace {

constexpr const char* kModule = "spectral_solver";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(kModule, code, message);
}

struct Rule {
  double alpha;
  std::vector<double> x;
};

// Orthonormal generalized Laguerre polynomials for the weight x^a e^-x, run
// with a floating log-scale so large arguments neither overflow nor lose
// the small-weight tail.
class ScaledLaguerre {
 public:
  ScaledLaguerre(double a, double x)
      : a_(a), x_(x), cur_(std::exp(-0.5 * std::lgamma(a + 1.0))) {}

  int degree() const { return k_; }
  double value() const { return cur_; }   // times exp(log_scale)
  double slope() const { return dcur_; }  // times exp(log_scale)
  double log_scale() const { return log_scale_; }

  void advance() {
    const double k = k_;
    const double c_next = std::sqrt((k + 1.0) * (k + 1.0 + a_));
    const double c_prev = std::sqrt(k * (k + a_));
    const double next = ((2.0 * k + 1.0 + a_ - x_) * cur_ - c_prev * prev_) / c_next;
    const double dnext = ((2.0 * k + 1.0 + a_ - x_) * dcur_ - cur_ - c_prev * dprev_) / c_next;
    prev_ = cur_;
    cur_ = next;
    dprev_ = dcur_;
    dcur_ = dnext;
    ++k_;
    const double big = std::max(std::abs(cur_), std::abs(dcur_));
    if (big > 1e100) rescale(1e-100);
    if (big < 1e-100 && big > 0.0) rescale(1e100);
  }

 private:
  void rescale(double f) {
    cur_ *= f;
    prev_ *= f;
    dcur_ *= f;
    dprev_ *= f;
    log_scale_ -= std::log(f);
  }

  double a_;
  double x_;
  double prev_ = 0.0;
  double cur_;
  double dprev_ = 0.0;
  double dcur_ = 0.0;
  double log_scale_ = 0.0;
  int k_ = 0;
};

// Nodes of the k-point Gauss rule for x^alpha e^-x, polished by Newton steps
// on the degree-k polynomial.
Rule gauss_laguerre(double alpha, int k) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    jac(i, i) = 2.0 * i + alpha + 1.0;
    if (i + 1 < k) jac(i, i + 1) = jac(i + 1, i) = std::sqrt((i + 1.0) * (i + 1.0 + alpha));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jac, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::Convergence, "Gauss rule failed");
  Rule rule{alpha, {}};
  for (int i = 0; i < k; ++i) {
    double x = solver.eigenvalues()(i);
    for (int it = 0; it < 2; ++it) {
      ScaledLaguerre p(alpha, x);
      while (p.degree() < k) p.advance();
      if (p.slope() != 0.0) x -= p.value() / p.slope();
    }
    rule.x.push_back(x);
  }
  return rule;
}

// log sqrt(w) of a Gauss node, from the Christoffel sum 1/w = sum_j p_j(x)^2.
double log_sqrt_weight(double alpha, double x, int k) {
  ScaledLaguerre p(alpha, x);
  double sum = 0.0;
  double scale = 0.0;
  for (int j = 0; j < k; ++j) {
    const double ls = p.log_scale();
    if (ls != scale) {
      sum *= std::exp(2.0 * (scale - ls));
      scale = ls;
    }
    sum += p.value() * p.value();
    p.advance();
  }
  return -0.5 * (std::log(sum) + 2.0 * scale);
}

// Basis x^s e^-x/2 p_k(x), k < size, with p_k orthonormal for the weight
// x^(2s) e^-x. Every matrix element below is a polynomial integral against
// some x^alpha e^-x and is evaluated exactly by a (size+1)-point rule.
struct Basis {
  double s;
  int size;

  // Rows: rule nodes; columns: sqrt(w_q) p_k(x_q) and sqrt(w_q) p_k'(x_q).
  void tabulate(const Rule& rule, Eigen::MatrixXd& p, Eigen::MatrixXd* dp) const {
    const int nq = static_cast<int>(rule.x.size());
    p.resize(nq, size);
    if (dp) dp->resize(nq, size);
    for (int q = 0; q < nq; ++q) {
      const double lw = log_sqrt_weight(rule.alpha, rule.x[q], nq);
      ScaledLaguerre poly(2.0 * s, rule.x[q]);
      for (int k = 0; k < size; ++k) {
        const double f = std::exp(lw + poly.log_scale());
        p(q, k) = f * poly.value();
        if (dp) (*dp)(q, k) = f * poly.slope();
        poly.advance();
      }
    }
  }

  // -d^2/dx^2 + lambda(lambda+1)/x^2 with lambda = s - 1.
  Eigen::MatrixXd kinetic() const {
    const double lambda = s - 1.0;
    const Rule rule = gauss_laguerre(2.0 * lambda, size + 1);
    Eigen::MatrixXd p, dp;
    tabulate(rule, p, &dp);
    // x^-1 d/dx [x^s e^-x/2 p] / (x^(s-1) e^-x/2) = s p + x p' - x p / 2
    Eigen::MatrixXd q = s * p;
    for (int i = 0; i < q.rows(); ++i) {
      q.row(i) += rule.x[i] * (dp.row(i) - 0.5 * p.row(i));
    }
    return q.transpose() * q + lambda * (lambda + 1.0) * (p.transpose() * p);
  }

  // Matrix of x^power.
  Eigen::MatrixXd power(double power_exp) const {
    const Rule rule = gauss_laguerre(2.0 * s + power_exp, size + 1);
    Eigen::MatrixXd p;
    tabulate(rule, p, nullptr);
    return p.transpose() * p;
  }

  // Largest node of the basis' own rule: where the last function peaks.
  double extent() const { return gauss_laguerre(2.0 * s, size).x.back(); }
};

struct Problem {
  std::vector<PowerTerm> terms;  // r^-2 terms are folded into lambda
  double mass;
  int l;
  double lambda;  // effective angular momentum
  bool confining;
  std::vector<PowerTerm> all_terms;

  double effective(double r) const {
    return evaluate(all_terms, r) + l * (l + 1.0) / (2.0 * mass * r * r);
  }
};

struct Operators {
  Basis basis;
  Eigen::MatrixXd kinetic;
  std::vector<Eigen::MatrixXd> terms;  // parallel to Problem::terms
  double extent;
};

Operators build_operators(const Problem& p, int size) {
  Operators ops{Basis{p.lambda + 1.0, size}, {}, {}, 0.0};
  ops.kinetic = ops.basis.kinetic();
  for (const PowerTerm& t : p.terms) ops.terms.push_back(ops.basis.power(t.exponent));
  ops.extent = ops.basis.extent();
  return ops;
}

struct Diagonalization {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;
  double h;
};

Diagonalization diagonalize(const Problem& p, const Operators& ops, double h, bool vectors) {
  Eigen::MatrixXd hmat = ops.kinetic / (2.0 * p.mass * h * h);
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    const PowerTerm& t = p.terms[i];
    hmat += (t.sign * t.coeff * std::pow(h, t.exponent)) * ops.terms[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      hmat, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::Convergence, "eigensolver failed");
  Diagonalization d;
  d.energies = solver.eigenvalues();
  if (vectors) d.vectors = solver.eigenvectors();
  d.h = h;
  return d;
}

// Length at which the kinetic term balances each potential term; the largest
// sets the first guess for the extent of the wavefunction.
double natural_length(const Problem& p) {
  double len = 0.0;
  for (const PowerTerm& t : p.terms) {
    if (t.coeff == 0.0 || t.exponent == -2.0) continue;
    len = std::max(len, std::pow(1.0 / (2.0 * p.mass * t.coeff), 1.0 / (t.exponent + 2.0)));
  }
  return len > 0.0 ? len : 1.0;
}

// Outermost r with V_eff(r) = e, or nullopt when V_eff < e everywhere far out.
std::optional<double> outer_turning_point(const Problem& p, double e, double guess) {
  double hi = guess * 1e3;
  if (!(p.effective(hi) > e)) return std::nullopt;
  double lo = hi;
  for (int i = 0; i < 2000 && p.effective(lo) > e; ++i) lo /= 1.05;
  if (p.effective(lo) > e) return std::nullopt;
  hi = lo * 1.05;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (p.effective(mid) > e ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

void check_bound(const Problem& p, double e, int n) {
  if (!p.confining && !(e < 0.0)) {
    fail(ErrorCode::Convergence, "level n=" + std::to_string(n) + ", l=" + std::to_string(p.l) +
                                     " is not bound for this potential");
  }
}

// First guess for h: the basis extent sits at extent_factor times the outer
// turning point of level n_max.
double extent_scale(const Problem& p, const Operators& ops, int n_max, const SolverConfig& cfg) {
  double extent = 10.0 * natural_length(p);
  for (int iter = 0; iter < 12; ++iter) {
    const Diagonalization d = diagonalize(p, ops, extent / ops.extent, false);
    const double e = d.energies(n_max);
    std::optional<double> rt;
    if (p.confining || e < 0.0) rt = outer_turning_point(p, e, extent);
    const double next = rt ? cfg.extent_factor * *rt : 2.0 * extent;
    if (std::abs(next - extent) < 0.02 * extent) return next / ops.extent;
    extent = next;
  }
  return extent / ops.extent;
}

// Ritz values are upper bounds, so h is picked to minimize the sum of the
// lowest n_max + 1 of them: a coarse scan in log h from the extent guess
// upward, then golden-section refinement around the best point.
double choose_scale(const Problem& p, const Operators& ops, int n_max, const SolverConfig& cfg) {
  if (cfg.domain_cutoff > 0.0) return cfg.domain_cutoff / ops.extent;
  auto trace = [&](double log_h) {
    const Diagonalization d = diagonalize(p, ops, std::exp(log_h), false);
    return d.energies.head(n_max + 1).sum();
  };
  const double start = std::log(extent_scale(p, ops, n_max, cfg)) - std::log(4.0);
  const double step = std::log(1.5);
  const int points = 30;
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double v = trace(start + i * step);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double lo = start + (best - 1) * step;
  double hi = start + (best + 1) * step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = trace(x1);
  double f2 = trace(x2);
  while (hi - lo > 1e-3) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = trace(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = trace(x2);
    }
  }
  return std::exp(0.5 * (lo + hi));
}

bool is_confining(std::span<const PowerTerm> terms) {
  double lead = -std::numeric_limits<double>::infinity();
  int sign = 0;
  for (const PowerTerm& t : terms) {
    if (t.coeff != 0.0 && t.exponent > lead) {
      lead = t.exponent;
      sign = t.sign;
    }
  }
  return lead > 0.0 && sign > 0;
}

Problem make_problem(const PotentialSpec& spec, int l) {
  Problem p;
  p.mass = spec.mass();
  p.l = l;
  p.all_terms.assign(spec.terms().begin(), spec.terms().end());
  p.confining = is_confining(spec.terms());
  double c = 0.0;
  for (const PowerTerm& t : spec.terms()) {
    if (t.exponent == -2.0) {
      c += t.sign * t.coeff;
    } else if (t.coeff != 0.0) {
      p.terms.push_back(t);
    }
  }
  // lambda (lambda + 1) = l (l + 1) + 2 m c
  const double lh = l + 0.5;
  const double disc = lh * lh + 2.0 * p.mass * c;
  if (!(disc > 0.0)) {
    fail(ErrorCode::FallingToCenter,
         "attractive r^-2 term too strong for l=" + std::to_string(l));
  }
  p.lambda = std::sqrt(disc) - 0.5;
  return p;
}

struct LevelSet {
  int l;
  std::vector<int> ns;
};

struct Level {
  Diagonalization d;
  Operators ops;
};

Level solve_basis(const Problem& p, int size, int n_max, const SolverConfig& cfg, bool vectors) {
  if (n_max >= size / 2) fail(ErrorCode::Domain, "basis too small for the requested n");
  Operators ops = build_operators(p, size);
  const double h = choose_scale(p, ops, n_max, cfg);
  Diagonalization d = diagonalize(p, ops, h, vectors);
  return {std::move(d), std::move(ops)};
}

std::vector<EigenEntry> solve_l(const PotentialSpec& spec, const LevelSet& set,
                                const SolverConfig& cfg) {
  const Problem p = make_problem(spec, set.l);
  const int n_max = *std::max_element(set.ns.begin(), set.ns.end());
  const int m1 = cfg.mesh_size;
  const Level fine = solve_basis(p, cfg.estimate_accuracy ? m1 + m1 / 2 : m1, n_max, cfg, false);
  std::optional<Level> coarse;
  if (cfg.estimate_accuracy) coarse = solve_basis(p, m1, n_max, cfg, false);

  std::vector<EigenEntry> out;
  for (int n : set.ns) {
    const double e_fine = fine.d.energies(n);
    check_bound(p, e_fine, n);
    EigenEntry e;
    e.family = spec.family();
    e.q = QuantumNumbers(n, set.l);
    e.energy = e_fine;
    if (coarse) e.accuracy = std::abs(e_fine - coarse->d.energies(n));
    out.push_back(e);
  }
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (mesh_size < 64) fail(ErrorCode::InvalidConfig, "mesh_size must be at least 64");
  if (!(domain_cutoff >= 0.0)) fail(ErrorCode::InvalidConfig, "domain_cutoff must be >= 0");
  if (!(extent_factor > 1.0)) fail(ErrorCode::InvalidConfig, "extent_factor must exceed 1");
}

EigenTable eigenvalues(const PotentialSpec& spec, const std::vector<QuantumNumbers>& levels,
                       const SolverConfig& config) {
  config.validate();
  std::map<int, std::vector<int>> by_l;
  for (const auto& q : levels) by_l[q.l()].push_back(q.n());
  std::vector<LevelSet> sets;
  for (auto& [l, ns] : by_l) sets.push_back({l, ns});

  std::vector<std::vector<EigenEntry>> results(sets.size());
  const std::size_t width =
      config.threads == 0 ? sets.size() : std::max<std::size_t>(1, config.threads);
  for (std::size_t start = 0; start < sets.size(); start += width) {
    std::vector<std::future<std::vector<EigenEntry>>> tasks;
    const std::size_t stop = std::min(sets.size(), start + width);
    for (std::size_t i = start; i < stop; ++i) {
      tasks.push_back(std::async(std::launch::async, solve_l, std::cref(spec),
                                 std::cref(sets[i]), std::cref(config)));
    }
    for (std::size_t i = start; i < stop; ++i) results[i] = tasks[i - start].get();
  }
  EigenTable table;
  for (const auto& q : levels) {
    for (const auto& r : results) {
      for (const auto& e : r) {
        if (e.q == q) table.add(e);
      }
    }
  }
  return table;
}

EigenTable eigenvalues(const ReducedProblem& problem, const std::vector<QuantumNumbers>& levels,
                       const SolverConfig& config) {
  problem.validate();
  EigenTable raw = eigenvalues(embed(problem), levels, config);
  EigenTable table;
  for (EigenEntry e : raw.entries()) {
    e.family = problem.family;
    e.beta = problem.beta;
    e.formulation = problem.formulation;
    table.add(e);
  }
  return table;
}

double expectation_r_power(const PotentialSpec& spec, const QuantumNumbers& q, double k,
                           const SolverConfig& config) {
  config.validate();
  const Problem p = make_problem(spec, q.l());
  const Level lv = solve_basis(p, config.mesh_size + config.mesh_size / 2, q.n(), config, true);
  check_bound(p, lv.d.energies(q.n()), q.n());
  if (!(2.0 * lv.ops.basis.s + k > -1.0)) fail(ErrorCode::Domain, "<r^k> diverges for this k");
  const Eigen::VectorXd c = lv.d.vectors.col(q.n());
  const Eigen::MatrixXd xk = lv.ops.basis.power(k);
  return std::pow(lv.d.h, k) * c.dot(xk * c) / c.squaredNorm();
}

}  // namespace afm::spectral
