#pragma once

// Calibration of the quantum-number combination N(beta) = b(beta) n + l + c(beta)
// against numerical spectra of the reduced anharmonic, quadratic+Coulomb and
// funnel Hamiltonians (epsilon forms).
//
//   chi(beta) = 1/16 sum_{n,l=0..3} (eps_num - eps_app)^2
//   chi(d)    = sum_beta (d_min(beta) - d_fit(beta))^2,  d = b or c

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "afm/eigen_table.hpp"
#include "afm/potentials.hpp"
#include "afm/spectral_solver.hpp"

namespace afm::calibration {

enum class ModelKind {
  Constant,   // d = p1
  Hyperbola,  // d = (p1 beta + p2) / (beta + p3)
  ExpCubic,   // d = 1 + p1 exp(-p2 (beta - p3)^3)
  Gaussian,   // d = 1 + p1 exp(-p2^2 (beta - p3)^2)
};

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

using Params = std::array<double, 3>;

double evaluate_model(ModelKind kind, const Params& p, double beta);

/// Which parameters a fit may move. `origin` pins d(0) by solving for one
/// tied parameter (p2 for a hyperbola, p1 otherwise), which must not be fixed.
struct ParamConstraints {
  std::array<bool, 3> fixed{false, false, false};
  std::optional<double> origin;

  /// Index of the parameter determined by `origin`, or -1.
  int tied_index(ModelKind kind) const;
  int free_count(ModelKind kind) const;
};

/// Overwrites the tied parameter so that d(0) equals the pinned origin.
void apply_origin(ModelKind kind, const ParamConstraints& constraints, Params& p);

struct NLevelModel {
  ModelKind kind = ModelKind::Constant;
  Params b_params{2.0, 0.0, 0.0};
  Params c_params{1.5, 0.0, 0.0};
  ParamConstraints b_constraints;
  ParamConstraints c_constraints;

  double b(double beta) const { return evaluate_model(kind, b_params, beta); }
  double c(double beta) const { return evaluate_model(kind, c_params, beta); }

  /// Throws Domain when b n + l + c is not positive.
  NValue n_value(double beta, const QuantumNumbers& q) const;

  /// Hyperbola models need p3, q3 > 0.
  void validate() const;
};

NLevelModel constant_model(double b, double c);
NLevelModel harmonic_model();  // N = 2n + l + 3/2
NLevelModel coulomb_model();   // N = n + l + 1

/// Built-in parameter sets (1 or 2) for Anharmonic, QuadCoulomb and Funnel,
/// with the constraint masks they were obtained under.
NLevelModel published_model(Family family, int set);

/// The model kind used for each calibrated family.
ModelKind model_kind_for(Family family);

/// (b, c) at beta = 0, where the minimizer starts.
std::pair<double, double> origin_anchor(Family family);

/// Geometric grid of 15 beta values per family.
std::vector<double> default_beta_grid(Family family);

/// The 16 levels (n, l) in 0..3.
std::vector<QuantumNumbers> chi_levels();

/// Numerical table of the epsilon-form reduced problem over chi_levels().
EigenTable numeric_table(Family family, double beta, const spectral::SolverConfig& config = {});

/// AFM closed-form energy of the reduced problem at the given N.
double approximate_energy(Family family, double beta, NValue N);

double chi_beta(double beta, Family family, const NLevelModel& model, const EigenTable& numeric);
double chi_beta(double beta, Family family, double b, double c, const EigenTable& numeric);

struct BcMinimum {
  double beta = 0.0;
  double b = 0.0;
  double c = 0.0;
  double chi = 0.0;
};

/// Local minimum of chi over (b, c) by alternating golden-section line
/// searches from the family's beta = 0 anchor.
BcMinimum minimize_bc(double beta, Family family, const EigenTable& numeric);

/// (beta, d) pairs for fit_coefficient.
struct Sample {
  double beta;
  double value;
};

struct CoefficientFit {
  Params params{};
  double chi_d = 0.0;
};

/// Least-squares fit of one coefficient model, starting from `initial`.
CoefficientFit fit_coefficient(const std::vector<Sample>& samples, ModelKind kind,
                               const ParamConstraints& constraints, const Params& initial);

struct FitReport {
  Family family = Family::Funnel;
  std::vector<BcMinimum> per_beta_minima;
  NLevelModel fitted_params;
  double chi_d_b = 0.0;
  double chi_d_c = 0.0;
};

/// Fits b(beta) and c(beta) separately, each under its constraint mask.
/// `initial` supplies the kind, starting values and constraints.
FitReport fit_model(Family family, const std::vector<BcMinimum>& minima,
                    const NLevelModel& initial);

/// Numeric tables and (b, c) minima over `betas`, one task per beta.
std::vector<BcMinimum> per_beta_minima(Family family, const std::vector<double>& betas,
                                       const spectral::SolverConfig& config = {});

/// per_beta_minima followed by fit_model.
FitReport calibrate(Family family, const std::vector<double>& betas, const NLevelModel& initial,
                    const spectral::SolverConfig& config = {});

/// A titled table of already formatted cells.
struct TextTable {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string render_text(const TextTable& table);
std::string render_csv(const TextTable& table);

/// Parameter table, chi(beta) table and, for the funnel, the 4x4 eigenvalue
/// table (numeric / set 1 / N = n + l + 1 per cell).
std::vector<TextTable> reproduce_tables(Family family, const spectral::SolverConfig& config = {},
                                        int digits = 6);

/// The beta values of the printed chi tables.
std::vector<double> chi_table_betas(Family family);

}  // namespace afm::calibration
