#include "afm/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "afm/afm_engine.hpp"
#include "afm/calibration.hpp"
#include "afm/closed_form.hpp"
#include "afm/eigen_table.hpp"
#include "afm/error.hpp"
#include "afm/io.hpp"
#include "afm/spectral_solver.hpp"

namespace afm::cli {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& message) {
  throw Error("cli", ErrorCode::InvalidConfig, message);
}

std::string fmt(double v, int digits) {
  std::ostringstream out;
  out << std::setprecision(digits) << v;
  return out.str();
}

// The value a reader of the printed output would see.
double quantize(double v, int digits) { return std::stod(fmt(v, digits)); }

void round_numbers(json& j, int digits) {
  if (j.is_number_float()) {
    j = quantize(j.get<double>(), digits);
  } else if (j.is_structured()) {
    for (auto& child : j) round_numbers(child, digits);
  }
}

bool is_calibrated(Family f) {
  return f == Family::Anharmonic || f == Family::QuadCoulomb || f == Family::Funnel;
}

bool has_closed_form(Family f) {
  return f == Family::Kratzer || f == Family::QuadCentrifugal || is_calibrated(f);
}

std::vector<QuantumNumbers> levels(const RunConfig& cfg) {
  std::vector<QuantumNumbers> out;
  const int l_lo = cfg.l.value_or(0);
  const int l_hi = cfg.l.value_or(cfg.l_max);
  const int n_lo = cfg.n.value_or(0);
  const int n_hi = cfg.n.value_or(cfg.n_max);
  for (int l = l_lo; l <= l_hi; ++l) {
    for (int n = n_lo; n <= n_hi; ++n) out.emplace_back(n, l);
  }
  return out;
}

PotentialSpec physical_spec(Family family, const std::vector<double>& p, int sign) {
  const double m = p[0];
  const double a = p[1];
  const double b = p.size() > 2 ? p[2] : 0.0;
  switch (family) {
    case Family::Kratzer: return make_kratzer(m, a);
    case Family::QuadCentrifugal: return make_quad_centrifugal(m, a, b, sign);
    case Family::Anharmonic: return make_anharmonic(m, a, b);
    case Family::QuadCoulomb: return make_quad_coulomb(m, a, b);
    case Family::Funnel: return make_funnel(m, a, b);
    default: break;
  }
  invalid("--physical: family '" + std::string(to_string(family)) +
          "' needs explicit terms via --config");
}

// The problem a command works on, in reduced form when one exists.
struct Target {
  PotentialSpec spec;
  std::optional<ReducedProblem> reduced;
  double scale = 1.0;
  std::optional<double> beta_column;  // printed beta; empty for physical input
};

Target resolve(const RunConfig& cfg) {
  if (cfg.beta) {
    ReducedProblem p{*cfg.family, *cfg.beta, cfg.formulation, cfg.centrifugal_sign};
    p.validate();
    return {embed(p), p, 1.0, *cfg.beta};
  }
  PotentialSpec spec = cfg.physical
                           ? physical_spec(*cfg.family, *cfg.physical, cfg.centrifugal_sign)
                           : *cfg.potential;
  Target t{spec, std::nullopt, 1.0, std::nullopt};
  if (spec.family() != Family::PurePower && spec.family() != Family::TwoPower) {
    const Reduction r = reduce(spec, cfg.formulation);
    t.reduced = r.problem;
    t.scale = r.energy_scale;
  }
  return t;
}

double start_exponent(const RunConfig& cfg, const Target& t) {
  if (cfg.generic || !t.reduced) return cfg.eta;
  return closed_form::natural_start_exponent(t.reduced->family, t.reduced->formulation);
}

NValue n_value(const RunConfig& cfg, const Target& t, const QuantumNumbers& q) {
  const std::string& m = cfg.nmodel;
  if (m == "natural") return start_exponent(cfg, t) > 0.0 ? n_harmonic(q) : n_coulomb(q);
  if (m == "ho") return n_harmonic(q);
  if (m == "coulomb") return n_coulomb(q);
  if (m == "explicit") return calibration::constant_model(*cfg.b, *cfg.c).n_value(0.0, q);
  const int set = m == "set1" ? 1 : 2;
  if (!t.reduced || !is_calibrated(t.reduced->family) ||
      t.reduced->formulation != Formulation::Epsilon) {
    invalid("--nmodel: " + m + " is defined for the epsilon forms of anharmonic, "
            "quad-coulomb and funnel only");
  }
  return calibration::published_model(t.reduced->family, set)
      .n_value(t.reduced->beta, q);
}

EigenTable afm_table(const RunConfig& cfg, const Target& t) {
  EigenTable table;
  const bool closed = !cfg.generic && t.reduced && has_closed_form(t.reduced->family);
  for (const auto& q : levels(cfg)) {
    const NValue N = n_value(cfg, t, q);
    EigenEntry e;
    e.family = t.spec.family();
    e.beta = t.beta_column;
    e.formulation = cfg.formulation;
    e.q = q;
    if (closed) {
      e.energy = t.scale * closed_form::afm_energy(*t.reduced, N);
      e.provenance = Provenance::AfmClosedForm;
    } else {
      e.energy = engine::solve(t.spec, cfg.eta, N).energy;
      e.provenance = Provenance::AfmGeneric;
    }
    table.add(e);
  }
  return table;
}

EigenTable numeric_table(const RunConfig& cfg, const Target& t) {
  spectral::SolverConfig sc;
  sc.mesh_size = cfg.mesh_size;
  EigenTable raw = spectral::eigenvalues(t.spec, levels(cfg), sc);
  EigenTable table;
  for (EigenEntry e : raw.entries()) {
    e.family = t.spec.family();
    e.beta = t.beta_column;
    e.formulation = cfg.formulation;
    table.add(e);
  }
  return table;
}

std::string render_eigen(const EigenTable& table, const RunConfig& cfg) {
  std::ostringstream out;
  if (cfg.format == "csv") {
    write_csv(out, table, cfg.digits);
  } else if (cfg.format == "json") {
    json j = io::to_json(table);
    round_numbers(j, cfg.digits);
    out << j.dump(2) << '\n';
  } else {
    calibration::TextTable tt{"", {"family", "beta", "form", "n", "l", "energy", "provenance",
                                   "accuracy"}, {}};
    for (const auto& e : table.entries()) {
      tt.rows.push_back({std::string(to_string(e.family)), e.beta ? fmt(*e.beta, cfg.digits) : "",
                         std::string(to_string(e.formulation)), std::to_string(e.q.n()),
                         std::to_string(e.q.l()), fmt(e.energy, cfg.digits),
                         std::string(to_string(e.provenance)), fmt(e.accuracy, 3)});
    }
    std::string s = calibration::render_text(tt);
    out << s.substr(s.find('\n') + 1);
  }
  return out.str();
}

std::string run_compare(const RunConfig& cfg) {
  const Target t = resolve(cfg);
  EigenTable numeric;
  if (!cfg.numeric_input.empty()) {
    std::ifstream in(cfg.numeric_input);
    if (!in) invalid("--numeric: cannot open '" + cfg.numeric_input + "'");
    numeric = read_csv(in);
  } else {
    // Same rounding as a printed `spectrum` table, so both routes agree digit for digit.
    for (EigenEntry e : numeric_table(cfg, t).entries()) {
      e.energy = quantize(e.energy, cfg.digits);
      numeric.add(e);
    }
  }
  const EigenTable approx = afm_table(cfg, t);

  struct Row {
    EigenEntry num;
    double afm;
  };
  std::vector<Row> rows;
  for (const auto& e : approx.entries()) {
    const EigenEntry* n = numeric.find(e.q);
    if (!n) {
      throw Error("cli", ErrorCode::IncompleteTable,
                  "numeric input lacks (n=" + std::to_string(e.q.n()) +
                      ", l=" + std::to_string(e.q.l()) + ")");
    }
    rows.push_back({*n, e.energy});
  }
  std::optional<double> chi;
  {
    double sum = 0.0;
    int count = 0;
    for (const auto& q : calibration::chi_levels()) {
      const EigenEntry* n = numeric.find(q);
      const EigenEntry* a = approx.find(q);
      if (!n || !a) break;
      sum += (n->energy - a->energy) * (n->energy - a->energy);
      ++count;
    }
    if (count == 16) chi = sum / 16.0;
  }

  const int d = cfg.digits;
  calibration::TextTable tt{"", {"family", "beta", "formulation", "n", "l", "numeric", "afm",
                                 "abs_dev", "rel_dev"}, {}};
  json j_rows = json::array();
  for (const auto& r : rows) {
    const double dev = r.afm - r.num.energy;
    const double rel = r.num.energy != 0.0 ? dev / std::abs(r.num.energy) : 0.0;
    const std::string beta = t.beta_column ? fmt(*t.beta_column, d) : "";
    tt.rows.push_back({std::string(to_string(t.spec.family())), beta,
                       std::string(to_string(cfg.formulation)), std::to_string(r.num.q.n()),
                       std::to_string(r.num.q.l()), fmt(r.num.energy, d), fmt(r.afm, d),
                       fmt(std::abs(dev), d), fmt(rel, d)});
    j_rows.push_back({{"n", r.num.q.n()},
                      {"l", r.num.q.l()},
                      {"numeric", r.num.energy},
                      {"afm", r.afm},
                      {"abs_dev", std::abs(dev)},
                      {"rel_dev", rel}});
  }
  std::ostringstream out;
  if (cfg.format == "csv") {
    out << calibration::render_csv(tt);
    if (chi) out << "# chi=" << fmt(*chi, d) << '\n';
  } else if (cfg.format == "json") {
    json j{{"family", std::string(to_string(t.spec.family()))}, {"rows", j_rows}};
    j["beta"] = t.beta_column ? json(*t.beta_column) : json(nullptr);
    j["chi"] = chi ? json(*chi) : json(nullptr);
    round_numbers(j, d);
    out << j.dump(2) << '\n';
  } else {
    std::string s = calibration::render_text(tt);
    out << s.substr(s.find('\n') + 1);
    if (chi) out << "chi(beta) = " << fmt(*chi, d) << '\n';
  }
  return out.str();
}

std::string run_fit(const RunConfig& cfg) {
  const Family family = *cfg.family;
  calibration::NLevelModel initial = calibration::published_model(family, 1);
  if (cfg.constraints == "set2") {
    initial.b_constraints = {};
    initial.c_constraints = {};
  }
  const std::vector<double> betas =
      cfg.betas.empty() ? calibration::default_beta_grid(family) : cfg.betas;
  spectral::SolverConfig sc;
  sc.mesh_size = cfg.mesh_size;
  const calibration::FitReport report = calibration::calibrate(family, betas, initial, sc);
  const auto& model = report.fitted_params;
  const int d = cfg.digits;
  std::ostringstream out;
  if (cfg.format == "json") {
    json j = io::to_json(report);
    round_numbers(j, d);
    out << j.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    out << "beta,b_min,c_min,chi_min,b_fit,c_fit\n";
    for (const auto& m : report.per_beta_minima) {
      out << fmt(m.beta, d) << ',' << fmt(m.b, d) << ',' << fmt(m.c, d) << ',' << fmt(m.chi, d)
          << ',' << fmt(model.b(m.beta), d) << ',' << fmt(model.c(m.beta), d) << '\n';
    }
  } else {
    out << to_string(family) << " fit (" << calibration::to_string(model.kind) << ", "
        << cfg.constraints << " constraints)\n";
    out << "p = " << fmt(model.b_params[0], d) << ' ' << fmt(model.b_params[1], d) << ' '
        << fmt(model.b_params[2], d) << "\n";
    out << "q = " << fmt(model.c_params[0], d) << ' ' << fmt(model.c_params[1], d) << ' '
        << fmt(model.c_params[2], d) << "\n";
    out << "chi(b) = " << fmt(report.chi_d_b, d) << "  chi(c) = " << fmt(report.chi_d_c, d)
        << '\n';
  }
  return out.str();
}

std::string run_tables(const RunConfig& cfg) {
  std::vector<Family> families;
  if (cfg.family) {
    families.push_back(*cfg.family);
  } else {
    families = {Family::Anharmonic, Family::QuadCoulomb, Family::Funnel};
  }
  spectral::SolverConfig sc;
  sc.mesh_size = cfg.mesh_size;
  std::ostringstream out;
  json all = json::array();
  bool first = true;
  for (Family f : families) {
    for (const auto& t : calibration::reproduce_tables(f, sc, cfg.digits)) {
      if (cfg.format == "json") {
        all.push_back({{"title", t.title}, {"header", t.header}, {"rows", t.rows}});
        continue;
      }
      if (!first) out << '\n';
      first = false;
      if (cfg.format == "csv") {
        out << "# " << t.title << '\n' << calibration::render_csv(t);
      } else {
        out << calibration::render_text(t);
      }
    }
  }
  if (cfg.format == "json") out << all.dump(2) << '\n';
  return out.str();
}

std::filesystem::path output_path(const RunConfig& cfg) {
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir && *dir) {
    const std::string ext = cfg.format == "text" ? "txt" : cfg.format;
    const std::filesystem::path name = cfg.output.empty()
                                           ? std::filesystem::path(cfg.command + "." + ext)
                                           : std::filesystem::path(cfg.output).filename();
    return std::filesystem::path(dir) / name;
  }
  return cfg.output;
}

void apply_config_file(const std::string& path, RunConfig& cfg, const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) invalid("--config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("cli", ErrorCode::Parse, std::string("--config: ") + e.what());
  }
  auto given = [&](const char* name) { return sub.count(std::string("--") + name) > 0; };
  try {
    if (j.contains("family") && !given("family")) {
      cfg.family = family_from_string(j["family"].get<std::string>());
    }
    if (j.contains("beta") && !given("beta")) cfg.beta = j["beta"].get<double>();
    if (j.contains("physical") && !given("physical")) {
      cfg.physical = j["physical"].get<std::vector<double>>();
    }
    if (j.contains("potential")) cfg.potential = io::potential_from_json(j["potential"]);
    if (j.contains("formulation") && !given("formulation")) {
      cfg.formulation = formulation_from_string(j["formulation"].get<std::string>());
    }
    if (j.contains("sign") && !given("sign")) cfg.centrifugal_sign = j["sign"].get<int>();
    if (j.contains("n") && !given("n")) cfg.n = j["n"].get<int>();
    if (j.contains("l") && !given("l")) cfg.l = j["l"].get<int>();
    if (j.contains("n_max") && !given("n-max")) cfg.n_max = j["n_max"].get<int>();
    if (j.contains("l_max") && !given("l-max")) cfg.l_max = j["l_max"].get<int>();
    if (j.contains("nmodel") && !given("nmodel")) cfg.nmodel = j["nmodel"].get<std::string>();
    if (j.contains("b") && !given("b")) cfg.b = j["b"].get<double>();
    if (j.contains("c") && !given("c")) cfg.c = j["c"].get<double>();
    if (j.contains("eta") && !given("eta")) cfg.eta = j["eta"].get<double>();
    if (j.contains("generic") && !given("generic")) cfg.generic = j["generic"].get<bool>();
    if (j.contains("constraints") && !given("constraints")) {
      cfg.constraints = j["constraints"].get<std::string>();
    }
    if (j.contains("betas") && !given("betas")) cfg.betas = j["betas"].get<std::vector<double>>();
    if (j.contains("format") && !given("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("digits") && !given("digits")) cfg.digits = j["digits"].get<int>();
    if (j.contains("mesh") && !given("mesh")) cfg.mesh_size = j["mesh"].get<int>();
    if (j.contains("output") && !given("output")) cfg.output = j["output"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error("cli", ErrorCode::Parse, std::string("--config: ") + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  static const std::vector<std::string> commands{"spectrum", "afm", "compare", "fit", "tables"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    invalid("command: unknown '" + command + "'");
  }
  if (format != "csv" && format != "json" && format != "text") {
    invalid("--format: expected csv, json or text");
  }
  if (digits < 1 || digits > 17) invalid("--digits: expected 1..17");
  if (n && *n < 0) invalid("--n: must be >= 0");
  if (l && *l < 0) invalid("--l: must be >= 0");
  if (n_max < 0) invalid("--n-max: must be >= 0");
  if (l_max < 0) invalid("--l-max: must be >= 0");
  if (centrifugal_sign != 1 && centrifugal_sign != -1) invalid("--sign: expected +1 or -1");

  if (command == "fit") {
    if (!family || !is_calibrated(*family)) {
      invalid("--family: fit needs anharmonic, quad-coulomb or funnel");
    }
    if (constraints != "set1" && constraints != "set2") {
      invalid("--constraints: expected set1 or set2");
    }
    if (!betas.empty() && betas.size() < 4) invalid("--betas: at least 4 values are needed");
    return;
  }
  if (command == "tables") {
    if (family && !is_calibrated(*family)) {
      invalid("--family: tables exist for anharmonic, quad-coulomb and funnel");
    }
    return;
  }
  const int sources = (beta ? 1 : 0) + (physical ? 1 : 0) + (potential ? 1 : 0);
  if (sources != 1) invalid("--beta/--physical: give exactly one of them");
  if ((beta || physical) && !family) invalid("--family: required with --beta or --physical");
  if (beta && !(*beta >= 0.0)) invalid("--beta: must be >= 0");
  if (physical && (physical->size() < 2 || physical->size() > 3)) {
    invalid("--physical: expected m a [b]");
  }
  if (nmodel == "explicit" && (!b || !c)) invalid("--nmodel: explicit needs --b and --c");
  static const std::vector<std::string> models{"natural", "ho",   "coulomb",
                                               "set1",    "set2", "explicit"};
  if (std::find(models.begin(), models.end(), nmodel) == models.end()) {
    invalid("--nmodel: unknown '" + nmodel + "'");
  }
}

void run(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  std::string text;
  if (cfg.command == "spectrum") {
    text = render_eigen(numeric_table(cfg, resolve(cfg)), cfg);
  } else if (cfg.command == "afm") {
    text = render_eigen(afm_table(cfg, resolve(cfg)), cfg);
  } else if (cfg.command == "compare") {
    text = run_compare(cfg);
  } else if (cfg.command == "fit") {
    text = run_fit(cfg);
  } else {
    text = run_tables(cfg);
  }
  const std::filesystem::path path = output_path(cfg);
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) invalid("--output: cannot write '" + path.string() + "'");
  file << text;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Auxiliary field method spectra, comparisons and calibrations"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string family;
  std::string formulation = "epsilon";
  std::string config_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--family", family, "potential family");
    sub->add_option("--format", cfg.format, "csv | json | text");
    sub->add_option("--digits", cfg.digits, "significant digits");
    sub->add_option("--output", cfg.output, "output file");
    sub->add_option("--config", config_path, "JSON file with option defaults");
    sub->add_option("--mesh", cfg.mesh_size, "spectral basis size");
  };
  auto add_problem = [&](CLI::App* sub) {
    sub->add_option("--beta", cfg.beta, "reduced coupling");
    sub->add_option("--physical", cfg.physical, "physical parameters m a [b]")->expected(2, 3);
    sub->add_option("--formulation", formulation, "epsilon | eta");
    sub->add_option("--sign", cfg.centrifugal_sign, "sign of the r^-2 term (quad-centrifugal)");
    sub->add_option("--n", cfg.n, "single radial quantum number");
    sub->add_option("--l", cfg.l, "single orbital quantum number");
    sub->add_option("--n-max", cfg.n_max, "largest n of the window");
    sub->add_option("--l-max", cfg.l_max, "largest l of the window");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--nmodel", cfg.nmodel, "natural | ho | coulomb | set1 | set2 | explicit");
    sub->add_option("--b", cfg.b, "explicit b");
    sub->add_option("--c", cfg.c, "explicit c");
    sub->add_flag("--generic", cfg.generic, "use the generic AFM solver");
    sub->add_option("--eta", cfg.eta, "starting exponent for the generic solver");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "numerical eigenvalues");
  add_common(spectrum);
  add_problem(spectrum);
  CLI::App* afm = app.add_subcommand("afm", "AFM eigenvalues");
  add_common(afm);
  add_problem(afm);
  add_model(afm);
  CLI::App* compare = app.add_subcommand("compare", "numeric vs AFM");
  add_common(compare);
  add_problem(compare);
  add_model(compare);
  compare->add_option("--numeric", cfg.numeric_input, "CSV written by spectrum");
  CLI::App* fit = app.add_subcommand("fit", "calibrate N(beta)");
  add_common(fit);
  fit->add_option("--constraints", cfg.constraints, "set1 | set2");
  fit->add_option("--betas", cfg.betas, "beta sample grid");
  CLI::App* tables = app.add_subcommand("tables", "parameter and chi(beta) tables");
  add_common(tables);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (!family.empty()) cfg.family = family_from_string(family);
    cfg.formulation = formulation_from_string(formulation);
    if (!config_path.empty()) apply_config_file(config_path, cfg, *sub);
    run(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace afm::cli
