#pragma once

// Command-line front end.
//
//   spectrum  numerical eigenvalues
//   afm       AFM eigenvalues (closed form for named families, generic solver otherwise)
//   compare   numeric vs AFM, with deviations and chi(beta)
//   fit       per-beta (b, c) minima and a fitted N(beta) model
//   tables    the parameter, chi(beta) and funnel eigenvalue tables
//
// CSV schemas:
//   spectrum, afm  family,beta,formulation,n,l,energy,provenance,accuracy
//   compare        family,beta,formulation,n,l,numeric,afm,abs_dev,rel_dev
//                  followed by a "# chi=<value>" line when all 16 levels are present
//   fit            beta,b_min,c_min,chi_min,b_fit,c_fit

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "afm/potentials.hpp"

namespace afm::cli {

/// Environment variable naming a directory for output files.
inline constexpr const char* kOutputDirEnv = "AFM_OUTPUT_DIR";

struct RunConfig {
  std::string command;
  std::optional<Family> family;
  std::optional<double> beta;
  std::optional<std::vector<double>> physical;  // m, a[, b]
  std::optional<PotentialSpec> potential;       // explicit terms, from --config
  Formulation formulation = Formulation::Epsilon;
  int centrifugal_sign = 1;
  std::optional<int> n;  // single level; otherwise the window below
  std::optional<int> l;
  int n_max = 3;
  int l_max = 3;
  std::string nmodel = "natural";  // natural | ho | coulomb | set1 | set2 | explicit
  std::optional<double> b;         // explicit model
  std::optional<double> c;
  bool generic = false;  // use the generic AFM solver even when a closed form exists
  double eta = 2.0;      // starting exponent for the generic solver
  std::string constraints = "set1";  // fit: set1 | set2
  std::vector<double> betas;         // fit: sample grid; empty for the default
  std::string numeric_input;         // compare: CSV from `spectrum`
  std::string format = "csv";        // csv | json | text
  int digits = 6;
  int mesh_size = 100;
  std::string output;  // file path; empty writes to the output stream

  /// Throws InvalidConfig naming the offending option.
  void validate() const;
};

/// Runs one command, writing to `out` unless an output file is configured.
void run(const RunConfig& config, std::ostream& out);

/// Parses arguments (and --config), runs, and maps errors to a nonzero status.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace afm::cli
