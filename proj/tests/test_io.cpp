#include <sstream>

#include "afm/calibration.hpp"
#include "afm/error.hpp"
#include "afm/io.hpp"
#include "doctest.h"

using namespace afm;
namespace cal = afm::calibration;

TEST_CASE("potential JSON round trip") {
  const PotentialSpec spec = make_quad_centrifugal(1.3, 0.7, 0.2, -1);
  const auto j = io::to_json(spec);
  CHECK(j.at("family") == "quad-centrifugal");
  CHECK(io::potential_from_json(j) == spec);
  CHECK(io::potential_from_json(nlohmann::json::parse(j.dump())) == spec);
}

TEST_CASE("malformed JSON is reported as a parse error") {
  try {
    io::potential_from_json(nlohmann::json::parse(R"({"family": "funnel"})"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(e.module() == "io");
  }
  CHECK_THROWS_AS(io::potential_from_json(nlohmann::json::parse(
                      R"({"family": "funnel", "mass": 1, "terms": [{"coeff": 1, "exp": 3, "sign": 1}]})")),
                  Error);
}

TEST_CASE("model and fit report round trip") {
  const cal::NLevelModel m = cal::published_model(Family::Anharmonic, 1);
  const cal::NLevelModel back = io::model_from_json(io::to_json(m));
  CHECK(back.kind == m.kind);
  CHECK(back.b_params == m.b_params);
  CHECK(back.c_params == m.c_params);
  CHECK(back.b_constraints.fixed == m.b_constraints.fixed);
  CHECK(back.c_constraints.origin == m.c_constraints.origin);

  cal::FitReport r;
  r.family = Family::QuadCoulomb;
  r.per_beta_minima = {{0.5, 1.8, 1.4, 1e-4}, {1.0, 1.6, 1.3, 2e-4}};
  r.fitted_params = cal::published_model(Family::QuadCoulomb, 2);
  r.chi_d_b = 0.01;
  r.chi_d_c = 0.02;
  const cal::FitReport rb = io::fit_report_from_json(io::to_json(r));
  CHECK(rb.family == r.family);
  REQUIRE(rb.per_beta_minima.size() == 2);
  CHECK(rb.per_beta_minima[1].c == 1.3);
  CHECK(rb.fitted_params.c_params == r.fitted_params.c_params);
  CHECK(rb.chi_d_c == 0.02);
}

TEST_CASE("eigen table JSON and CSV round trips") {
  EigenTable t;
  t.add({Family::Funnel, 0.5, Formulation::Eta, {1, 2}, 1.2345678901, Provenance::Numeric, 3e-11});
  t.add({Family::PurePower, std::nullopt, Formulation::Epsilon, {0, 0}, -0.5,
         Provenance::AfmGeneric, 0.0});
  const EigenTable j = io::eigen_table_from_json(io::to_json(t));
  REQUIRE(j.size() == 2);
  CHECK(j.entries()[0].energy == t.entries()[0].energy);
  CHECK_FALSE(j.entries()[1].beta.has_value());

  std::stringstream csv;
  write_csv(csv, t, 10);
  CHECK(csv.str().rfind(kCsvHeader, 0) == 0);
  const EigenTable c = read_csv(csv);
  REQUIRE(c.size() == 2);
  CHECK(c.entries()[0].energy == doctest::Approx(1.2345678901).epsilon(1e-10));
  CHECK(c.entries()[0].formulation == Formulation::Eta);
  CHECK(c.entries()[0].q == QuantumNumbers(1, 2));
  CHECK(c.entries()[1].provenance == Provenance::AfmGeneric);
  CHECK_FALSE(c.entries()[1].beta.has_value());

  std::stringstream bad("family,beta\nfunnel,x\n");
  CHECK_THROWS_AS(read_csv(bad), Error);
}

TEST_CASE("eigen table bookkeeping") {
  EigenTable t;
  t.add({Family::Funnel, 1.0, Formulation::Epsilon, {0, 0}, 1.0, Provenance::Numeric, 0.0});
  t.add({Family::Funnel, 1.0, Formulation::Epsilon, {0, 0}, 2.0, Provenance::Numeric, 0.0});
  CHECK(t.size() == 1);
  CHECK(t.energy({0, 0}) == 2.0);
  CHECK(t.find({1, 0}) == nullptr);
  try {
    t.energy({1, 0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompleteTable);
  }
}
