#include "afm/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "afm/closed_form.hpp"
#include "afm/error.hpp"

namespace afm::calibration {

namespace {

constexpr const char* kModule = "calibration";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(kModule, code, message);
}

const double kLinearB = std::numbers::pi / std::sqrt(3.0);
const double kLinearC = std::sqrt(3.0) * std::numbers::pi / 4.0;

void require_calibrated(Family family) {
  if (family != Family::Anharmonic && family != Family::QuadCoulomb &&
      family != Family::Funnel) {
    fail(ErrorCode::UnsupportedReduction,
         "no N(beta) calibration for family '" + std::string(afm::to_string(family)) + "'");
  }
}

std::vector<double> geometric(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  }
  return out;
}

// Golden-section search for the minimum of f on [lo, hi].
template <class F>
double golden_section(F f, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol * (1.0 + std::abs(lo) + std::abs(hi))) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

// Minimizes f along x0 + t d: brackets a minimum by stepping downhill from
// t = 0 with growing steps, then refines with golden section.
template <class F>
double line_minimize(F f, double step, double tol) {
  double f0 = f(0.0);
  double dir = 1.0;
  double f_plus = f(step);
  if (!(f_plus < f0)) {
    const double f_minus = f(-step);
    if (!(f_minus < f0)) return golden_section(f, -step, step, tol);
    dir = -1.0;
    f_plus = f_minus;
  }
  double a = 0.0;
  double b = dir * step;
  double fb = f_plus;
  for (int i = 0; i < 60; ++i) {
    const double c = b + 2.0 * (b - a);
    const double fc = f(c);
    if (!(fc < fb)) return golden_section(f, std::min(a, c), std::max(a, c), tol);
    a = b;
    b = c;
    fb = fc;
  }
  fail(ErrorCode::FitFailed, "line search did not bracket a minimum");
}

std::string format_number(double v, int digits) {
  std::ostringstream out;
  out << std::setprecision(digits) << v;
  return out.str();
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Constant: return "constant";
    case ModelKind::Hyperbola: return "hyperbola";
    case ModelKind::ExpCubic: return "exp-cubic";
    case ModelKind::Gaussian: return "gaussian";
  }
  return "constant";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (ModelKind k :
       {ModelKind::Constant, ModelKind::Hyperbola, ModelKind::ExpCubic, ModelKind::Gaussian}) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorCode::Parse, "unknown model kind '" + std::string(name) + "'");
}

double evaluate_model(ModelKind kind, const Params& p, double beta) {
  switch (kind) {
    case ModelKind::Constant: return p[0];
    case ModelKind::Hyperbola: return (p[0] * beta + p[1]) / (beta + p[2]);
    case ModelKind::ExpCubic: {
      const double d = beta - p[2];
      return 1.0 + p[0] * std::exp(-p[1] * d * d * d);
    }
    case ModelKind::Gaussian: {
      const double d = beta - p[2];
      return 1.0 + p[0] * std::exp(-p[1] * p[1] * d * d);
    }
  }
  return p[0];
}

int ParamConstraints::tied_index(ModelKind kind) const {
  if (!origin) return -1;
  return kind == ModelKind::Hyperbola ? 1 : 0;
}

int ParamConstraints::free_count(ModelKind kind) const {
  const int used = kind == ModelKind::Constant ? 1 : 3;
  const int tied = tied_index(kind);
  int count = 0;
  for (int i = 0; i < used; ++i) {
    if (!fixed[i] && i != tied) ++count;
  }
  return count;
}

void apply_origin(ModelKind kind, const ParamConstraints& constraints, Params& p) {
  if (!constraints.origin) return;
  const double d0 = *constraints.origin;
  if (constraints.fixed[constraints.tied_index(kind)]) {
    fail(ErrorCode::FitFailed, "the parameter pinned by d(0) is also marked fixed");
  }
  switch (kind) {
    case ModelKind::Constant: p[0] = d0; break;
    case ModelKind::Hyperbola: p[1] = d0 * p[2]; break;
    case ModelKind::ExpCubic: p[0] = (d0 - 1.0) * std::exp(-p[1] * p[2] * p[2] * p[2]); break;
    case ModelKind::Gaussian: p[0] = (d0 - 1.0) * std::exp(p[1] * p[1] * p[2] * p[2]); break;
  }
}

NValue NLevelModel::n_value(double beta, const QuantumNumbers& q) const {
  const double n = b(beta) * q.n() + q.l() + c(beta);
  if (!(n > 0.0)) {
    fail(ErrorCode::Domain, "N(beta) = b n + l + c is not positive at beta = " +
                                std::to_string(beta));
  }
  return NValue(n);
}

void NLevelModel::validate() const {
  if (kind == ModelKind::Hyperbola && !(b_params[2] > 0.0 && c_params[2] > 0.0)) {
    fail(ErrorCode::InvalidConfig, "hyperbola model needs p3 > 0 and q3 > 0");
  }
  for (double v : {b(0.0), c(0.0)}) {
    if (!(v > 0.0)) fail(ErrorCode::InvalidConfig, "model gives b(0) or c(0) <= 0");
  }
}

NLevelModel constant_model(double b, double c) {
  NLevelModel m;
  m.kind = ModelKind::Constant;
  m.b_params = {b, 0.0, 0.0};
  m.c_params = {c, 0.0, 0.0};
  return m;
}

NLevelModel harmonic_model() { return constant_model(2.0, 1.5); }
NLevelModel coulomb_model() { return constant_model(1.0, 1.0); }

ModelKind model_kind_for(Family family) {
  require_calibrated(family);
  switch (family) {
    case Family::Anharmonic: return ModelKind::Hyperbola;
    case Family::QuadCoulomb: return ModelKind::ExpCubic;
    default: return ModelKind::Gaussian;
  }
}

std::pair<double, double> origin_anchor(Family family) {
  require_calibrated(family);
  if (family == Family::Funnel) return {kLinearB, kLinearC};
  return {2.0, 1.5};
}

NLevelModel published_model(Family family, int set) {
  require_calibrated(family);
  if (set != 1 && set != 2) fail(ErrorCode::InvalidConfig, "parameter set must be 1 or 2");
  NLevelModel m;
  m.kind = model_kind_for(family);
  if (set == 2) {
    switch (family) {
      case Family::Anharmonic:
        m.b_params = {1.826, 1.485, 0.747};
        m.c_params = {1.381, 0.333, 0.222};
        break;
      case Family::QuadCoulomb:
        m.b_params = {0.990, 0.119, 0.161};
        m.c_params = {0.496, 1.373, -0.136};
        break;
      default:
        m.b_params = {0.783, 0.459, 0.237};
        m.c_params = {0.369, 1.168, -0.062};
        break;
    }
    return m;
  }
  switch (family) {
    case Family::Anharmonic:
      // b(0) = 2, b(inf) = pi/sqrt3; c(0) = 3/2, c(inf) = sqrt3 pi/4
      m.b_params = {kLinearB, 2.0 * 0.835, 0.835};
      m.c_params = {kLinearC, 1.5 * 0.445, 0.445};
      m.b_constraints = {{true, false, false}, 2.0};
      m.c_constraints = {{true, false, false}, 1.5};
      break;
    case Family::QuadCoulomb:
      m.b_params = {1.0, 0.093, 0.0};
      m.c_params = {0.5, 2.414, 0.0};
      m.b_constraints = {{true, false, true}, std::nullopt};
      m.c_constraints = {{true, false, true}, std::nullopt};
      break;
    default:
      m.b_params = {kLinearB - 1.0, 0.416, 0.0};
      m.c_params = {kLinearC - 1.0, 1.245, 0.0};
      m.b_constraints = {{true, false, true}, std::nullopt};
      m.c_constraints = {{true, false, true}, std::nullopt};
      break;
  }
  return m;
}

std::vector<double> default_beta_grid(Family family) {
  require_calibrated(family);
  switch (family) {
    case Family::Anharmonic: return geometric(0.01, 100.0, 15);
    case Family::QuadCoulomb: return geometric(0.05, 5.0, 15);
    default: return geometric(0.05, 5.0, 15);
  }
}

std::vector<double> chi_table_betas(Family family) {
  require_calibrated(family);
  if (family == Family::Anharmonic) return {0.1, 1.0, 10.0};
  return {0.5, 1.0, 2.0};
}

std::vector<QuantumNumbers> chi_levels() { return quantum_window(3); }

EigenTable numeric_table(Family family, double beta, const spectral::SolverConfig& config) {
  require_calibrated(family);
  return spectral::eigenvalues(ReducedProblem{family, beta, Formulation::Epsilon, 1},
                               chi_levels(), config);
}

double approximate_energy(Family family, double beta, NValue N) {
  require_calibrated(family);
  return closed_form::afm_energy(ReducedProblem{family, beta, Formulation::Epsilon, 1}, N);
}

double chi_beta(double beta, Family family, const NLevelModel& model, const EigenTable& numeric) {
  double sum = 0.0;
  for (const auto& q : chi_levels()) {
    const double diff =
        numeric.energy(q) - approximate_energy(family, beta, model.n_value(beta, q));
    sum += diff * diff;
  }
  return sum / 16.0;
}

double chi_beta(double beta, Family family, double b, double c, const EigenTable& numeric) {
  return chi_beta(beta, family, constant_model(b, c), numeric);
}

BcMinimum minimize_bc(double beta, Family family, const EigenTable& numeric) {
  for (const auto& q : chi_levels()) numeric.energy(q);  // incomplete-table check up front
  const auto [b0, c0] = origin_anchor(family);
  // b, c > 0 keeps every N positive; outside, chi is treated as infinite.
  auto chi = [&](double b, double c) {
    if (!(b > 0.0) || !(c > 0.0)) return std::numeric_limits<double>::infinity();
    return chi_beta(beta, family, b, c, numeric);
  };
  constexpr double kTol = 1e-10;
  double b = b0;
  double c = c0;
  double best = chi(b, c);
  const double anchor_chi = best;
  bool converged = false;
  for (int restart = 0; restart < 4 && !converged; ++restart) {
    double step = 0.25;
    for (int sweep = 0; sweep < 400; ++sweep) {
      const double b_prev = b;
      const double c_prev = c;
      b += line_minimize([&](double t) { return chi(b + t, c); }, step, kTol);
      c += line_minimize([&](double t) { return chi(b, c + t); }, step, kTol);
      // Pattern move along the sweep's net displacement speeds up narrow valleys.
      const double db = b - b_prev;
      const double dc = c - c_prev;
      if (db != 0.0 || dc != 0.0) {
        const double t = line_minimize([&](double s) { return chi(b + s * db, c + s * dc); },
                                       1.0, kTol);
        b += t * db;
        c += t * dc;
      }
      const double moved = std::hypot(b - b_prev, c - c_prev);
      step = std::clamp(2.0 * moved, 1e-6, 0.25);
      if (moved < kTol) break;
    }
    const double now = chi(b, c);
    // A restart that no longer improves marks convergence.
    converged = std::abs(best - now) <= 1e-14 * (1.0 + best) && restart > 0;
    best = std::min(best, now);
  }
  const double final_chi = chi(b, c);
  if (!(final_chi <= anchor_chi) || !std::isfinite(final_chi)) {
    fail(ErrorCode::FitFailed, "minimization did not improve on the anchor");
  }
  return {beta, b, c, final_chi};
}

CoefficientFit fit_coefficient(const std::vector<Sample>& samples, ModelKind kind,
                               const ParamConstraints& constraints, const Params& initial) {
  std::vector<int> free;
  const int used = kind == ModelKind::Constant ? 1 : 3;
  for (int i = 0; i < used; ++i) {
    if (!constraints.fixed[i] && i != constraints.tied_index(kind)) free.push_back(i);
  }
  if (free.empty()) fail(ErrorCode::FitFailed, "every parameter is constrained");
  if (samples.size() < free.size()) {
    fail(ErrorCode::FitFailed, "fewer samples than free parameters");
  }
  const int m = static_cast<int>(samples.size());
  const int k = static_cast<int>(free.size());

  auto residuals = [&](const Params& p) {
    Params q = p;
    apply_origin(kind, constraints, q);
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) {
      r(i) = samples[i].value - evaluate_model(kind, q, samples[i].beta);
    }
    return r;
  };
  auto cost = [&](const Params& p) {
    const Eigen::VectorXd r = residuals(p);
    return std::isfinite(r.squaredNorm()) ? r.squaredNorm()
                                          : std::numeric_limits<double>::infinity();
  };

  Params p = initial;
  apply_origin(kind, constraints, p);
  double current = cost(p);
  if (!std::isfinite(current)) fail(ErrorCode::FitFailed, "initial parameters give a non-finite fit");
  double lambda = 1e-3;
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::VectorXd r = residuals(p);
    Eigen::MatrixXd jac(m, k);
    for (int j = 0; j < k; ++j) {
      const int idx = free[j];
      const double h = 1e-7 * std::max(1.0, std::abs(p[idx]));
      Params up = p;
      Params dn = p;
      up[idx] += h;
      dn[idx] -= h;
      // d r / d p = -d model / d p
      jac.col(j) = (residuals(up) - residuals(dn)) / (2.0 * h);
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    bool accepted = false;
    double max_rel_step = 0.0;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      Eigen::MatrixXd a = jtj;
      for (int j = 0; j < k; ++j) a(j, j) += lambda * std::max(jtj(j, j), 1e-12);
      const Eigen::VectorXd delta = a.ldlt().solve(-g);
      Params trial = p;
      max_rel_step = 0.0;
      for (int j = 0; j < k; ++j) {
        trial[free[j]] += delta(j);
        max_rel_step =
            std::max(max_rel_step, std::abs(delta(j)) / std::max(1.0, std::abs(p[free[j]])));
      }
      const double next = cost(trial);
      if (next <= current) {
        p = trial;
        apply_origin(kind, constraints, p);
        const double improvement = current - next;
        current = next;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (improvement <= 1e-15 * (current + 1e-300) && max_rel_step < 1e-10) {
          return {p, current};
        }
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted || max_rel_step < 1e-13) return {p, current};
  }
  return {p, current};
}

FitReport fit_model(Family family, const std::vector<BcMinimum>& minima,
                    const NLevelModel& initial) {
  require_calibrated(family);
  std::vector<Sample> bs;
  std::vector<Sample> cs;
  for (const auto& mn : minima) {
    bs.push_back({mn.beta, mn.b});
    cs.push_back({mn.beta, mn.c});
  }
  const CoefficientFit fb = fit_coefficient(bs, initial.kind, initial.b_constraints,
                                            initial.b_params);
  const CoefficientFit fc = fit_coefficient(cs, initial.kind, initial.c_constraints,
                                            initial.c_params);
  FitReport report;
  report.family = family;
  report.per_beta_minima = minima;
  report.fitted_params = initial;
  report.fitted_params.b_params = fb.params;
  report.fitted_params.c_params = fc.params;
  report.chi_d_b = fb.chi_d;
  report.chi_d_c = fc.chi_d;
  return report;
}

std::vector<BcMinimum> per_beta_minima(Family family, const std::vector<double>& betas,
                                       const spectral::SolverConfig& config) {
  require_calibrated(family);
  std::vector<std::future<BcMinimum>> tasks;
  for (double beta : betas) {
    tasks.push_back(std::async(std::launch::async, [family, beta, config] {
      return minimize_bc(beta, family, numeric_table(family, beta, config));
    }));
  }
  std::vector<BcMinimum> out;
  for (auto& t : tasks) out.push_back(t.get());
  return out;
}

FitReport calibrate(Family family, const std::vector<double>& betas, const NLevelModel& initial,
                    const spectral::SolverConfig& config) {
  if (betas.size() < 4) fail(ErrorCode::FitFailed, "at least 4 beta samples are needed");
  return fit_model(family, per_beta_minima(family, betas, config), initial);
}

std::string render_text(const TextTable& table) {
  std::vector<std::size_t> width(table.header.size(), 0);
  for (std::size_t i = 0; i < table.header.size(); ++i) width[i] = table.header[i].size();
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], row[i].size());
    }
  }
  std::ostringstream out;
  out << table.title << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << "  ";
      out << std::setw(static_cast<int>(width[i])) << cells[i];
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out.str();
}

std::string render_csv(const TextTable& table) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out.str();
}

std::vector<TextTable> reproduce_tables(Family family, const spectral::SolverConfig& config,
                                        int digits) {
  require_calibrated(family);
  const std::string name(afm::to_string(family));
  std::vector<TextTable> tables;

  TextTable params{name + ": N(beta) model parameters (" +
                       std::string(to_string(model_kind_for(family))) + ")",
                   {"set", "p1", "p2", "p3", "q1", "q2", "q3"},
                   {}};
  for (int set : {1, 2}) {
    const NLevelModel m = published_model(family, set);
    std::vector<std::string> row{std::to_string(set)};
    for (double v : m.b_params) row.push_back(format_number(v, digits));
    for (double v : m.c_params) row.push_back(format_number(v, digits));
    params.rows.push_back(row);
  }
  tables.push_back(params);

  std::vector<std::pair<std::string, NLevelModel>> choices;
  if (family != Family::Funnel) choices.emplace_back("N_ho", harmonic_model());
  if (family != Family::Anharmonic) choices.emplace_back("N_C", coulomb_model());
  choices.emplace_back("set1", published_model(family, 1));
  choices.emplace_back("set2", published_model(family, 2));

  const std::vector<double> betas = chi_table_betas(family);
  std::vector<std::future<EigenTable>> tasks;
  for (double beta : betas) {
    tasks.push_back(std::async(std::launch::async, [family, beta, config] {
      return numeric_table(family, beta, config);
    }));
  }
  std::vector<EigenTable> numeric;
  for (auto& t : tasks) numeric.push_back(t.get());

  TextTable chi{name + ": chi(beta)", {"beta"}, {}};
  for (const auto& [label, model] : choices) chi.header.push_back(label);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    std::vector<std::string> row{format_number(betas[i], digits)};
    for (const auto& [label, model] : choices) {
      row.push_back(format_number(chi_beta(betas[i], family, model, numeric[i]), 2));
    }
    chi.rows.push_back(row);
  }
  tables.push_back(chi);

  if (family == Family::Funnel) {
    const double beta = 0.5;
    const EigenTable num = numeric_table(family, beta, config);
    const NLevelModel set1 = published_model(family, 1);
    const NLevelModel nc = coulomb_model();
    TextTable eig{name + ": eigenvalues at beta = 0.5 (numeric / set1 / N_C)",
                  {"l", "n=0", "n=1", "n=2", "n=3"},
                  {}};
    for (int l = 0; l <= 3; ++l) {
      std::vector<std::string> row{std::to_string(l)};
      for (int n = 0; n <= 3; ++n) {
        const QuantumNumbers q(n, l);
        row.push_back(format_number(num.energy(q), digits) + " / " +
                      format_number(approximate_energy(family, beta, set1.n_value(beta, q)),
                                    digits) +
                      " / " +
                      format_number(approximate_energy(family, beta, nc.n_value(beta, q)),
                                    digits));
      }
      eig.rows.push_back(row);
    }
    tables.push_back(eig);
  }
  return tables;
}

}  // namespace afm::calibration
