#pragma once

// JSON forms of the library's value types.
//
//   PotentialSpec: {"family": "...", "mass": m,
//                   "terms": [{"coeff": c, "exp": e, "sign": +-1}, ...]}
//   NLevelModel:   {"kind": "...", "b": [p1, p2, p3], "c": [q1, q2, q3],
//                   "b_fixed": [..], "c_fixed": [..], "b_origin": d0, "c_origin": d0}
//   FitReport:     {"family": "...", "minima": [{"beta", "b", "c", "chi"}, ...],
//                   "model": NLevelModel, "chi_d_b": x, "chi_d_c": x}

#include <json.hpp>

#include "afm/calibration.hpp"
#include "afm/eigen_table.hpp"
#include "afm/potentials.hpp"

namespace afm::io {

using nlohmann::json;

json to_json(const PotentialSpec& spec);
PotentialSpec potential_from_json(const json& j);

json to_json(const calibration::NLevelModel& model);
calibration::NLevelModel model_from_json(const json& j);

json to_json(const calibration::FitReport& report);
calibration::FitReport fit_report_from_json(const json& j);

/// Array of {"family", "beta", "formulation", "n", "l", "energy", "provenance", "accuracy"}.
json to_json(const EigenTable& table);
EigenTable eigen_table_from_json(const json& j);

}  // namespace afm::io
