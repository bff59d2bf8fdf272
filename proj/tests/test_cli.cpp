#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "afm/cli.hpp"
#include "afm/closed_form.hpp"
#include "afm/eigen_table.hpp"
#include "afm/error.hpp"
#include "doctest.h"

using namespace afm;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "afm_cli");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int status = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string chi_line(const std::string& text) {
  const auto pos = text.find("# chi=");
  REQUIRE(pos != std::string::npos);
  return text.substr(pos, text.find('\n', pos) - pos);
}

}  // namespace

TEST_CASE("afm command prints closed-form energies") {
  const Result r = run_cli({"afm", "--family", "funnel", "--beta", "0.5", "--n", "0", "--l", "0"});
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  const EigenTable t = read_csv(in);
  REQUIRE(t.size() == 1);
  CHECK(t.energy({0, 0}) == doctest::Approx(closed_form::funnel_afm(0.5, NValue(1.0))).epsilon(1e-5));
  CHECK(t.entries()[0].provenance == Provenance::AfmClosedForm);
}

TEST_CASE("quad-centrifugal at beta = 0 is the oscillator") {
  const Result r =
      run_cli({"afm", "--family", "quad-centrifugal", "--beta", "0", "--n", "0", "--l", "0"});
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  CHECK(read_csv(in).energy({0, 0}) == doctest::Approx(3.0));
}

TEST_CASE("generic solver path agrees with the closed form") {
  const Result a = run_cli({"afm", "--family", "anharmonic", "--beta", "1.5", "--digits", "12"});
  const Result g = run_cli(
      {"afm", "--family", "anharmonic", "--beta", "1.5", "--digits", "12", "--generic", "--eta", "2"});
  REQUIRE(a.status == 0);
  REQUIRE(g.status == 0);
  std::istringstream ia(a.out);
  std::istringstream ig(g.out);
  const EigenTable ta = read_csv(ia);
  const EigenTable tg = read_csv(ig);
  REQUIRE(ta.size() == 16);
  for (const auto& e : ta.entries()) {
    CHECK(tg.energy(e.q) == doctest::Approx(e.energy).epsilon(1e-10));
  }
  CHECK(tg.entries()[0].provenance == Provenance::AfmGeneric);
}

TEST_CASE("spectrum then compare reproduces the in-process chi") {
  const fs::path dir = scratch_dir("afm_cli_roundtrip");
  const std::string csv = (dir / "funnel.csv").string();
  REQUIRE(run_cli({"spectrum", "--family", "funnel", "--beta", "0.5", "--output", csv}).status == 0);
  const Result from_file = run_cli(
      {"compare", "--family", "funnel", "--beta", "0.5", "--nmodel", "set1", "--numeric", csv});
  const Result direct = run_cli({"compare", "--family", "funnel", "--beta", "0.5", "--nmodel", "set1"});
  REQUIRE(from_file.status == 0);
  REQUIRE(direct.status == 0);
  CHECK(chi_line(from_file.out) == chi_line(direct.out));
  fs::remove_all(dir);
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args{"spectrum", "--family", "quad-coulomb", "--beta", "1.2",
                                      "--n-max", "2", "--l-max", "1"};
  const Result a = run_cli(args);
  const Result b = run_cli(args);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = scratch_dir("afm_cli_outdir");
  setenv(cli::kOutputDirEnv, dir.c_str(), 1);
  const Result r =
      run_cli({"afm", "--family", "funnel", "--beta", "1", "--format", "json", "--n", "0", "--l", "0"});
  unsetenv(cli::kOutputDirEnv);
  REQUIRE(r.status == 0);
  const std::string body = slurp(dir / "afm.json");
  CHECK(body.find("\"energy\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("config file supplies defaults and flags win") {
  const fs::path dir = scratch_dir("afm_cli_config");
  std::ofstream(dir / "cfg.json") << R"({"family": "funnel", "beta": 2.0, "n": 1, "l": 0, "digits": 10})";
  const Result r = run_cli({"afm", "--config", (dir / "cfg.json").string(), "--beta", "0.5"});
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  const EigenTable t = read_csv(in);
  CHECK(*t.entries()[0].beta == 0.5);
  CHECK(t.energy({1, 0}) ==
        doctest::Approx(closed_form::funnel_afm(0.5, n_coulomb({1, 0}))).epsilon(1e-9));
  fs::remove_all(dir);
}

TEST_CASE("physical parameters are reduced") {
  const Result r = run_cli({"afm", "--family", "funnel", "--physical", "1.0", "0.5", "0.5", "--n",
                            "0", "--l", "0", "--digits", "12"});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("funnel") != std::string::npos);
}

TEST_CASE("errors map to nonzero status") {
  CHECK(run_cli({"afm", "--family", "funnel", "--beta", "-1"}).status == 2);
  CHECK(run_cli({"afm", "--family", "yukawa", "--beta", "1"}).status == 2);
  CHECK(run_cli({"afm", "--family", "funnel"}).status == 2);
  CHECK(run_cli({"afm", "--family", "funnel", "--beta", "1", "--nmodel", "explicit"}).status == 2);
  CHECK(run_cli({"afm", "--config", "/nonexistent/cfg.json"}).status == 2);
  CHECK(run_cli({"spectrum", "--family", "quad-centrifugal", "--beta", "0.5", "--sign", "-1"}).status ==
        2);
  const Result none = run_cli({});
  CHECK(none.status != 0);
  CHECK(run_cli({"afm", "--family", "funnel", "--beta", "1", "--format", "xml"}).err.find("format") !=
        std::string::npos);
}

TEST_CASE("tables command renders the funnel tables") {
  const Result r = run_cli({"tables", "--family", "funnel", "--format", "text"});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("0.39711") != std::string::npos);
}

TEST_CASE("RunConfig validation") {
  cli::RunConfig cfg;
  cfg.command = "afm";
  cfg.family = Family::Funnel;
  cfg.beta = 1.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.digits = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
