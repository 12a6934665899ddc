#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "equivact/format.hpp"
#include "equivact/se3.hpp"

namespace equivact {

/// Wire format used by every file schema:
///   {"t": [x, y, z], "q": [w, x, y, z]}  with unit quaternion, w >= 0.
inline void append_pose_json(JsonWriter& w, const Pose& p) {
  const auto q = to_quaternion(p.R);
  w.begin_object();
  w.key("t").begin_array();
  for (int i = 0; i < 3; ++i) w.value(p.t[i]);
  w.end_array();
  w.key("q").begin_array();
  for (double c : q) w.value(c);
  w.end_array();
  w.end_object();
}

inline std::string pose_to_json(const Pose& p) {
  JsonWriter w;
  append_pose_json(w, p);
  return w.take();
}

/// Parses and validates the wire format. The quaternion must be within 1e-6
/// of unit norm; it is renormalized exactly before conversion so the returned
/// rotation satisfies the Rotation invariants.
inline Pose pose_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("t") || !j.contains("q")) {
    throw PoseFormatError("pose must be an object with \"t\" and \"q\"");
  }
  const auto& jt = j.at("t");
  const auto& jq = j.at("q");
  if (!jt.is_array() || jt.size() != 3 || !jq.is_array() || jq.size() != 4) {
    throw PoseFormatError("pose \"t\" must have 3 entries and \"q\" 4");
  }
  Pose p;
  for (int i = 0; i < 3; ++i) {
    p.t[i] = jt.at(i).get<double>();
    if (!std::isfinite(p.t[i])) throw PoseFormatError("non-finite translation");
  }
  double q[4];
  double n2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    q[i] = jq.at(i).get<double>();
    if (!std::isfinite(q[i])) throw PoseFormatError("non-finite quaternion");
    n2 += q[i] * q[i];
  }
  const double n = std::sqrt(n2);
  if (std::abs(n - 1.0) > 1e-6) {
    throw PoseFormatError("quaternion norm " + format_double(n) +
                          " outside 1e-6 of 1");
  }
  p.R = from_quaternion(q[0] / n, q[1] / n, q[2] / n, q[3] / n);
  return p;
}

inline Pose pose_from_json_text(const std::string& text) {
  return pose_from_json(nlohmann::json::parse(text));
}

}  // namespace equivact
