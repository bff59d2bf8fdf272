#include "afm/io.hpp"

#include "afm/error.hpp"

namespace afm::io {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw Error("io", ErrorCode::Parse, message);
}

// Wraps nlohmann's exceptions so callers see one error type.
template <class F>
auto guarded(const char* what, F f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(std::string(what) + ": " + e.what());
  }
}

json constraints_mask(const std::array<bool, 3>& mask) { return json(mask); }

}  // namespace

json to_json(const PotentialSpec& spec) {
  json terms = json::array();
  for (const PowerTerm& t : spec.terms()) {
    terms.push_back({{"coeff", t.coeff}, {"exp", t.exponent}, {"sign", t.sign}});
  }
  return {{"family", std::string(to_string(spec.family()))},
          {"mass", spec.mass()},
          {"terms", terms}};
}

PotentialSpec potential_from_json(const json& j) {
  return guarded("potential", [&] {
    std::vector<PowerTerm> terms;
    for (const auto& t : j.at("terms")) {
      terms.push_back({t.at("coeff").get<double>(), t.at("exp").get<double>(),
                       t.value("sign", 1)});
    }
    return PotentialSpec(family_from_string(j.at("family").get<std::string>()),
                         std::move(terms), j.at("mass").get<double>());
  });
}

json to_json(const calibration::NLevelModel& model) {
  json j{{"kind", std::string(calibration::to_string(model.kind))},
         {"b", model.b_params},
         {"c", model.c_params},
         {"b_fixed", constraints_mask(model.b_constraints.fixed)},
         {"c_fixed", constraints_mask(model.c_constraints.fixed)}};
  if (model.b_constraints.origin) j["b_origin"] = *model.b_constraints.origin;
  if (model.c_constraints.origin) j["c_origin"] = *model.c_constraints.origin;
  return j;
}

calibration::NLevelModel model_from_json(const json& j) {
  return guarded("model", [&] {
    calibration::NLevelModel m;
    m.kind = calibration::model_kind_from_string(j.at("kind").get<std::string>());
    m.b_params = j.at("b").get<calibration::Params>();
    m.c_params = j.at("c").get<calibration::Params>();
    if (j.contains("b_fixed")) m.b_constraints.fixed = j["b_fixed"].get<std::array<bool, 3>>();
    if (j.contains("c_fixed")) m.c_constraints.fixed = j["c_fixed"].get<std::array<bool, 3>>();
    if (j.contains("b_origin")) m.b_constraints.origin = j["b_origin"].get<double>();
    if (j.contains("c_origin")) m.c_constraints.origin = j["c_origin"].get<double>();
    return m;
  });
}

json to_json(const calibration::FitReport& report) {
  json minima = json::array();
  for (const auto& m : report.per_beta_minima) {
    minima.push_back({{"beta", m.beta}, {"b", m.b}, {"c", m.c}, {"chi", m.chi}});
  }
  return {{"family", std::string(to_string(report.family))},
          {"minima", minima},
          {"model", to_json(report.fitted_params)},
          {"chi_d_b", report.chi_d_b},
          {"chi_d_c", report.chi_d_c}};
}

calibration::FitReport fit_report_from_json(const json& j) {
  return guarded("fit report", [&] {
    calibration::FitReport r;
    r.family = family_from_string(j.at("family").get<std::string>());
    for (const auto& m : j.at("minima")) {
      r.per_beta_minima.push_back({m.at("beta").get<double>(), m.at("b").get<double>(),
                                   m.at("c").get<double>(), m.at("chi").get<double>()});
    }
    r.fitted_params = model_from_json(j.at("model"));
    r.chi_d_b = j.at("chi_d_b").get<double>();
    r.chi_d_c = j.at("chi_d_c").get<double>();
    return r;
  });
}

json to_json(const EigenTable& table) {
  json out = json::array();
  for (const auto& e : table.entries()) {
    json row{{"family", std::string(to_string(e.family))},
             {"formulation", std::string(to_string(e.formulation))},
             {"n", e.q.n()},
             {"l", e.q.l()},
             {"energy", e.energy},
             {"provenance", std::string(to_string(e.provenance))},
             {"accuracy", e.accuracy}};
    row["beta"] = e.beta ? json(*e.beta) : json(nullptr);
    out.push_back(row);
  }
  return out;
}

EigenTable eigen_table_from_json(const json& j) {
  return guarded("eigen table", [&] {
    EigenTable table;
    for (const auto& row : j) {
      EigenEntry e;
      e.family = family_from_string(row.at("family").get<std::string>());
      if (row.contains("beta") && !row["beta"].is_null()) e.beta = row["beta"].get<double>();
      e.formulation = formulation_from_string(row.at("formulation").get<std::string>());
      e.q = QuantumNumbers(row.at("n").get<int>(), row.at("l").get<int>());
      e.energy = row.at("energy").get<double>();
      e.provenance = provenance_from_string(row.at("provenance").get<std::string>());
      e.accuracy = row.value("accuracy", 0.0);
      table.add(std::move(e));
    }
    return table;
  });
}

}  // namespace afm::io
