#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "equivact/embodiment.hpp"
#include "equivact/se3.hpp"

namespace equivact {

using Vec10 = Eigen::Matrix<double, 10, 1>;

/// The network-side learning target y: a rotation, a translation and the
/// gripper scalar. Serialized as 10 numbers (3 translation, 6 rot6d,
/// 1 gripper).
struct ActionObjective {
  Mat3 rot = Mat3::Identity();
  Vec3 trans = Vec3::Zero();
  double gripper = 0.0;

  Pose pose() const { return {rot, trans}; }
};

inline ActionObjective objective_from_pose(const Pose& p, double gripper) {
  return {p.R, p.t, gripper};
}

/// Action-space codecs. be/ee/ce predict the end-effector target in base,
/// current-ee and camera coordinates respectively; ours_full conjugates the
/// camera-frame objective back through the configuration; ours_robust drops
/// the extrinsic-lever term from the translation path.
enum class CodecId { kBe, kEe, kCe, kOursFull, kOursRobust };

constexpr CodecId kAllCodecs[] = {CodecId::kBe, CodecId::kEe, CodecId::kCe,
                                  CodecId::kOursFull, CodecId::kOursRobust};

inline const char* to_string(CodecId c) {
  switch (c) {
    case CodecId::kBe: return "be";
    case CodecId::kEe: return "ee";
    case CodecId::kCe: return "ce";
    case CodecId::kOursFull: return "ours-full";
    case CodecId::kOursRobust: return "ours-robust";
  }
  return "?";
}

inline std::optional<CodecId> codec_from_string(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "be") return CodecId::kBe;
  if (s == "ee") return CodecId::kEe;
  if (s == "ce") return CodecId::kCe;
  if (s == "ours-full") return CodecId::kOursFull;
  if (s == "ours-robust") return CodecId::kOursRobust;
  return std::nullopt;
}

/// objective -> action under configuration m. The gripper passes through
/// unchanged for every codec.
inline Action decode(CodecId codec, const EmbodimentConfig& m,
                     const ActionObjective& y) {
  const Pose& ee = m.ee_in_base;
  const Pose& cam = m.cam_in_base;
  const Pose yp = y.pose();
  Action a;
  a.gripper = y.gripper;
  switch (codec) {
    case CodecId::kBe:
      a.target_ee_in_base = yp;
      break;
    case CodecId::kEe:
      a.target_ee_in_base = ee * yp;
      break;
    case CodecId::kCe:
      a.target_ee_in_base = cam * yp;
      break;
    case CodecId::kOursFull:
      a.target_ee_in_base = cam * yp * inverse(cam) * ee;
      break;
    case CodecId::kOursRobust:
      a.target_ee_in_base.R = cam.R * y.rot * cam.R.transpose() * ee.R;
      a.target_ee_in_base.t = cam.R * y.trans + ee.t;
      break;
  }
  return a;
}

/// action -> objective; the exact algebraic inverse of decode for fixed m,
/// so decode(codec, m, encode(codec, m, a)) == a.
inline ActionObjective encode(CodecId codec, const EmbodimentConfig& m,
                              const Action& a) {
  const Pose& ee = m.ee_in_base;
  const Pose& cam = m.cam_in_base;
  const Pose& tgt = a.target_ee_in_base;
  ActionObjective y;
  y.gripper = a.gripper;
  switch (codec) {
    case CodecId::kBe:
      y = objective_from_pose(tgt, a.gripper);
      break;
    case CodecId::kEe:
      y = objective_from_pose(inverse(ee) * tgt, a.gripper);
      break;
    case CodecId::kCe:
      y = objective_from_pose(inverse(cam) * tgt, a.gripper);
      break;
    case CodecId::kOursFull:
      y = objective_from_pose(inverse(cam) * tgt * inverse(ee) * cam,
                              a.gripper);
      break;
    case CodecId::kOursRobust:
      y.rot = cam.R.transpose() * tgt.R * ee.R.transpose() * cam.R;
      y.trans = cam.R.transpose() * (tgt.t - ee.t);
      break;
  }
  return y;
}

/// Layout: [t(3), rot6d(6), gripper(1)].
inline Vec10 objective_to_vec(const ActionObjective& y) {
  Vec10 v;
  v.head<3>() = y.trans;
  v.segment<6>(3) = to_rot6d(y.rot);
  v[9] = y.gripper;
  return v;
}

/// Inverse of objective_to_vec. Out-of-range gripper values are clamped to
/// [-1, 1]; recorded data routinely overshoots slightly, so this is reported
/// through the flag rather than rejected.
inline ActionObjective vec_to_objective(const Vec10& v,
                                        bool* gripper_clamped = nullptr) {
  ActionObjective y;
  y.trans = v.head<3>();
  y.rot = from_rot6d(v.segment<6>(3));
  const double g = v[9];
  y.gripper = std::clamp(g, -1.0, 1.0);
  if (gripper_clamped) *gripper_clamped = (g != y.gripper);
  return y;
}

}  // namespace equivact
