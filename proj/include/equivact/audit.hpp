#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "equivact/codecs.hpp"
#include "equivact/parallel.hpp"

namespace equivact {

// Two-threshold verdict scheme: a hypothesis passes only if every residual
// stays below kEpsPass, and counts as refuted only if at least one residual
// exceeds kEpsFail. Residuals landing in between are reported as
// inconclusive instead of being silently classified.
constexpr double kEpsPass = 1e-8;
constexpr double kEpsFail = 1e-3;

struct ResidualSample {
  double rot_err = 0.0;    // radians
  double trans_err = 0.0;  // meters
  GroupElement g;
  std::uint64_t seed = 0;
};

enum class Verdict { kEquivariant, kInvariant, kNeither };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kEquivariant: return "EQUIVARIANT";
    case Verdict::kInvariant: return "INVARIANT";
    case Verdict::kNeither: return "NEITHER";
  }
  return "?";
}

struct Classification {
  CodecId codec;
  SubgroupId subgroup;
  Verdict verdict;
  double max_rot_err;    // under the claimed hypothesis (equivariance for
  double max_trans_err;  // EQUIVARIANT / NEITHER, invariance for INVARIANT)
  int trials;
};

/// Residual of the equivariance hypothesis D(g*m, y) == g * D(m, y).
inline ResidualSample decoder_residual(CodecId codec, const EmbodimentConfig& m,
                                       const ActionObjective& y,
                                       const GroupElement& g,
                                       std::uint64_t seed = 0) {
  const Pose lhs = decode(codec, act_on_config(g, m), y).target_ee_in_base;
  const Pose rhs = act_on_action(g, decode(codec, m, y)).target_ee_in_base;
  ResidualSample r;
  r.rot_err = geodesic_angle(lhs.R, rhs.R);
  r.trans_err = (lhs.t - rhs.t).norm();
  r.g = g;
  r.seed = seed;
  return r;
}

/// Residual of the invariance hypothesis D(g*m, y) == D(m, y).
inline ResidualSample decoder_invariance_residual(CodecId codec,
                                                  const EmbodimentConfig& m,
                                                  const ActionObjective& y,
                                                  const GroupElement& g,
                                                  std::uint64_t seed = 0) {
  const Pose lhs = decode(codec, act_on_config(g, m), y).target_ee_in_base;
  const Pose rhs = decode(codec, m, y).target_ee_in_base;
  ResidualSample r;
  r.rot_err = geodesic_angle(lhs.R, rhs.R);
  r.trans_err = (lhs.t - rhs.t).norm();
  r.g = g;
  r.seed = seed;
  return r;
}

struct TrialErrors {
  double eq_rot, eq_trans, inv_rot, inv_trans;
};

namespace detail {

inline EmbodimentConfig random_audit_config(Rng& rng) {
  return {random_pose(rng, 1.0), random_pose(rng, 1.0)};
}

/// Objectives are sampled directly (not encoded from actions): decoder
/// equivariance must hold for arbitrary network outputs.
inline ActionObjective random_audit_objective(Rng& rng) {
  ActionObjective y;
  y.rot = random_rotation(rng);
  for (int i = 0; i < 3; ++i) y.trans[i] = rng.uniform(-1.0, 1.0);
  y.gripper = rng.uniform(-1.0, 1.0);
  return y;
}

inline TrialErrors run_trial(CodecId codec, SubgroupId subgroup,
                             std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  const EmbodimentConfig m = random_audit_config(rng);
  const ActionObjective y = random_audit_objective(rng);
  const GroupElement g = sample_group(subgroup, rng);
  const ResidualSample eq = decoder_residual(codec, m, y, g, trial_seed);
  const ResidualSample inv =
      decoder_invariance_residual(codec, m, y, g, trial_seed);
  return {eq.rot_err, eq.trans_err, inv.rot_err, inv.trans_err};
}

inline std::uint64_t cell_stream(CodecId codec, SubgroupId subgroup) {
  return static_cast<std::uint64_t>(codec) * 8 +
         static_cast<std::uint64_t>(subgroup) + 1;
}

}  // namespace detail

/// Runs both hypotheses over `trials` random (m, y, g) samples and returns
/// the three-way verdict. Throws InconclusiveClassification when residuals
/// land between the pass and fail thresholds for every trial of a refuted
/// hypothesis, and std::invalid_argument for trials < 100.
inline Classification classify(CodecId codec, SubgroupId subgroup, int trials,
                               std::uint64_t seed,
                               std::vector<TrialErrors>* trial_log = nullptr) {
  if (trials < 100) {
    throw std::invalid_argument("classify requires at least 100 trials");
  }
  const std::uint64_t base = derive_seed(seed, detail::cell_stream(codec, subgroup));
  double eq_rot = 0, eq_trans = 0, inv_rot = 0, inv_trans = 0;
  if (trial_log) trial_log->reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const TrialErrors e =
        detail::run_trial(codec, subgroup, derive_seed(base, t));
    eq_rot = std::max(eq_rot, e.eq_rot);
    eq_trans = std::max(eq_trans, e.eq_trans);
    inv_rot = std::max(inv_rot, e.inv_rot);
    inv_trans = std::max(inv_trans, e.inv_trans);
    if (trial_log) trial_log->push_back(e);
  }

  Classification c{codec, subgroup, Verdict::kNeither, 0.0, 0.0, trials};
  const bool eq_ok = eq_rot < kEpsPass && eq_trans < kEpsPass;
  const bool inv_ok = inv_rot < kEpsPass && inv_trans < kEpsPass;
  const bool eq_refuted = eq_rot > kEpsFail || eq_trans > kEpsFail;
  const bool inv_refuted = inv_rot > kEpsFail || inv_trans > kEpsFail;
  if (eq_ok) {
    c.verdict = Verdict::kEquivariant;
    c.max_rot_err = eq_rot;
    c.max_trans_err = eq_trans;
  } else if (inv_ok) {
    c.verdict = Verdict::kInvariant;
    c.max_rot_err = inv_rot;
    c.max_trans_err = inv_trans;
  } else if (eq_refuted && inv_refuted) {
    c.verdict = Verdict::kNeither;
    c.max_rot_err = eq_rot;
    c.max_trans_err = eq_trans;
  } else {
    throw InconclusiveClassification(
        std::string("residuals between thresholds for ") + to_string(codec) +
        " x " + to_string(subgroup));
  }
  return c;
}

/// Analytic expectation for every (codec, subgroup) cell.
inline Verdict expected_verdict(CodecId codec, SubgroupId subgroup) {
  switch (codec) {
    case CodecId::kBe:
      // Decode never reads m.
      return Verdict::kInvariant;
    case CodecId::kEe:
      return subgroup == SubgroupId::kBase ? Verdict::kEquivariant
                                           : Verdict::kNeither;
    case CodecId::kCe:
      if (subgroup == SubgroupId::kBase) return Verdict::kEquivariant;
      if (subgroup == SubgroupId::kFull) return Verdict::kNeither;
      return Verdict::kInvariant;  // ee-only subgroups never touch cam_in_base
    case CodecId::kOursFull:
      return Verdict::kEquivariant;
    case CodecId::kOursRobust:
      return (subgroup == SubgroupId::kBase || subgroup == SubgroupId::kEeRot)
                 ? Verdict::kEquivariant
                 : Verdict::kNeither;
  }
  return Verdict::kNeither;
}

struct ClassificationCell {
  Classification result;
  Verdict expected;
  bool match;
  std::vector<TrialErrors> trial_log;  // filled when log_trials is set
};

/// 5 codecs x 5 subgroups, empirical verdicts against the analytic table.
/// Cells run in parallel; per-trial seeds make the outcome independent of
/// scheduling.
inline std::vector<ClassificationCell> full_classification_table(
    int trials, std::uint64_t seed, bool log_trials = false) {
  struct CellSpec {
    CodecId codec;
    SubgroupId subgroup;
  };
  std::vector<CellSpec> specs;
  for (CodecId codec : kAllCodecs) {
    for (SubgroupId subgroup : kAllSubgroups) {
      specs.push_back({codec, subgroup});
    }
  }
  std::vector<ClassificationCell> cells(specs.size());
  std::vector<std::string> errors(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) {
    ClassificationCell& cell = cells[i];
    try {
      cell.result =
          classify(specs[i].codec, specs[i].subgroup, trials, seed,
                   log_trials ? &cell.trial_log : nullptr);
    } catch (const InconclusiveClassification& e) {
      errors[i] = e.what();
      return;
    }
    cell.expected = expected_verdict(specs[i].codec, specs[i].subgroup);
    cell.match = cell.result.verdict == cell.expected;
  });
  for (const std::string& e : errors) {
    if (!e.empty()) throw InconclusiveClassification(e);
  }
  return cells;
}

enum class NoiseKind { kExtrinsicRot, kExtrinsicTrans };

inline const char* to_string(NoiseKind k) {
  return k == NoiseKind::kExtrinsicRot ? "EXTRINSIC_ROT" : "EXTRINSIC_TRANS";
}

struct SensitivityReport {
  NoiseKind noise_kind;
  double eps;                    // radians (rot) or meters (trans)
  double objective_delta_full;   // mean |dy^t| of the full objective
  double objective_delta_robust; // mean |dy^t| of the robust objective
  double lever_arm;              // ||e_c t||
  double motion_norm;            // ||e_{e*} t||
};

/// Perturbs the camera extrinsic of m by `eps` (rotation about a random axis,
/// or translation along a random direction) and reports the mean shift of the
/// translation component of the full and robust learning objectives. The same
/// per-trial axis sequence is used for every eps so sweeps are comparable
/// point to point.
inline std::vector<SensitivityReport> calibration_sensitivity(
    const EmbodimentConfig& m, const Action& a,
    const std::vector<double>& eps_values, int trials, std::uint64_t seed,
    NoiseKind kind = NoiseKind::kExtrinsicRot) {
  const Pose ee_to_cam = inverse(m.ee_in_base) * m.cam_in_base;
  const double lever_arm = ee_to_cam.t.norm();
  if (!(lever_arm > 0.0)) {
    throw std::invalid_argument("calibration_sensitivity needs ||e_c t|| > 0");
  }
  const double motion_norm =
      (inverse(m.ee_in_base) * a.target_ee_in_base).t.norm();

  const ActionObjective ref_full = encode(CodecId::kOursFull, m, a);
  const ActionObjective ref_robust = encode(CodecId::kOursRobust, m, a);

  std::vector<Vec3> axes(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    Vec3 v;
    double n = 0.0;
    do {
      for (int i = 0; i < 3; ++i) v[i] = rng.normal();
      n = v.norm();
    } while (n < 1e-12);
    axes[static_cast<std::size_t>(t)] = v / n;
  }

  std::vector<SensitivityReport> reports;
  reports.reserve(eps_values.size());
  for (double eps : eps_values) {
    double sum_full = 0.0, sum_robust = 0.0;
    for (const Vec3& axis : axes) {
      EmbodimentConfig pert = m;
      if (kind == NoiseKind::kExtrinsicRot) {
        pert.cam_in_base.R = m.cam_in_base.R * axis_angle(axis, eps);
      } else {
        pert.cam_in_base.t = m.cam_in_base.t + eps * axis;
      }
      sum_full +=
          (encode(CodecId::kOursFull, pert, a).trans - ref_full.trans).norm();
      sum_robust += (encode(CodecId::kOursRobust, pert, a).trans -
                     ref_robust.trans).norm();
    }
    reports.push_back({kind, eps, sum_full / trials, sum_robust / trials,
                       lever_arm, motion_norm});
  }
  return reports;
}

}  // namespace equivact
