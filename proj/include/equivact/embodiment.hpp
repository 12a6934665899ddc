#pragma once

#include <string>

#include "equivact/se3.hpp"

namespace equivact {

/// m = [ee_in_base, cam_in_base]: where the robot reports its end-effector
/// and where its camera sits, both in the base frame.
struct EmbodimentConfig {
  Pose ee_in_base;
  Pose cam_in_base;
};

/// Desired end-effector pose in the base frame plus a gripper command in
/// [-1, 1] (-1 fully closed, +1 fully open).
struct Action {
  Pose target_ee_in_base;
  double gripper = 0.0;
};

/// g = [base_redef, ee_redef]: a re-definition of the base frame (left
/// factor) and of the end-effector frame (right factor). Changes coordinates,
/// never the physical robot.
struct GroupElement {
  Pose base_redef;  // new-base from old-base
  Pose ee_redef;    // old-ee from new-ee

  static GroupElement identity() { return {}; }
};

enum class SubgroupId { kFull, kBase, kEe, kEeRot, kEeTrans };

inline const char* to_string(SubgroupId s) {
  switch (s) {
    case SubgroupId::kFull: return "G_FULL";
    case SubgroupId::kBase: return "G_BASE";
    case SubgroupId::kEe: return "G_EE";
    case SubgroupId::kEeRot: return "G_EE_ROT";
    case SubgroupId::kEeTrans: return "G_EE_TRANS";
  }
  return "?";
}

constexpr SubgroupId kAllSubgroups[] = {SubgroupId::kBase, SubgroupId::kEe,
                                        SubgroupId::kEeRot, SubgroupId::kEeTrans,
                                        SubgroupId::kFull};

/// g * m = [base_redef * ee_in_base * ee_redef, base_redef * cam_in_base].
inline EmbodimentConfig act_on_config(const GroupElement& g,
                                      const EmbodimentConfig& m) {
  return {g.base_redef * m.ee_in_base * g.ee_redef,
          g.base_redef * m.cam_in_base};
}

/// g * a transforms the target pose; the gripper scalar is frame-free.
inline Action act_on_action(const GroupElement& g, const Action& a) {
  return {g.base_redef * a.target_ee_in_base * g.ee_redef, a.gripper};
}

/// Product law chosen so act(compose(g2, g1), m) == act(g2, act(g1, m)):
/// base factors compose left-to-right, ee factors in the reverse order.
inline GroupElement compose_group(const GroupElement& g2,
                                  const GroupElement& g1) {
  return {g2.base_redef * g1.base_redef, g1.ee_redef * g2.ee_redef};
}

inline GroupElement inverse_group(const GroupElement& g) {
  return {inverse(g.base_redef), inverse(g.ee_redef)};
}

/// Random element of the requested subgroup. Defaults are wide on purpose:
/// rotations up to pi and translations up to 1 m expose non-equivariance of
/// the baseline codecs clearly.
inline GroupElement sample_group(SubgroupId subgroup, Rng& rng,
                                 double rot_range = M_PI,
                                 double trans_range = 1.0) {
  auto random_element = [&] {
    Pose p;
    p.R = random_rotation_bounded(rng, rot_range);
    for (int i = 0; i < 3; ++i) p.t[i] = rng.uniform(-trans_range, trans_range);
    return p;
  };
  GroupElement g;
  switch (subgroup) {
    case SubgroupId::kFull:
      g.base_redef = random_element();
      g.ee_redef = random_element();
      break;
    case SubgroupId::kBase:
      g.base_redef = random_element();
      break;
    case SubgroupId::kEe:
      g.ee_redef = random_element();
      break;
    case SubgroupId::kEeRot:
      g.ee_redef.R = random_rotation_bounded(rng, rot_range);
      break;
    case SubgroupId::kEeTrans:
      for (int i = 0; i < 3; ++i) {
        g.ee_redef.t[i] = rng.uniform(-trans_range, trans_range);
      }
      break;
  }
  return g;
}

}  // namespace equivact
