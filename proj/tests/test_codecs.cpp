#include "equivact/codecs.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace equivact;

namespace {

double pose_distance(const Pose& a, const Pose& b) {
  return std::max(geodesic_angle(a.R, b.R), (a.t - b.t).norm());
}

EmbodimentConfig random_config(Rng& rng) {
  return {random_pose(rng, 1.0), random_pose(rng, 1.0)};
}

ActionObjective random_objective(Rng& rng) {
  ActionObjective y;
  y.rot = random_rotation(rng);
  for (int i = 0; i < 3; ++i) y.trans[i] = rng.uniform(-1.0, 1.0);
  y.gripper = rng.uniform(-1.0, 1.0);
  return y;
}

Action random_action(Rng& rng) {
  return {random_pose(rng, 1.0), rng.uniform(-1.0, 1.0)};
}

// Direct transcription of the robust decoder block formula, written with
// plain loops so it shares nothing with the library implementation.
void robust_decode_oracle(const EmbodimentConfig& m, const ActionObjective& y,
                          double r_out[3][3], double t_out[3]) {
  double cr[3][3], er[3][3], yr[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      cr[i][j] = m.cam_in_base.R(i, j);
      er[i][j] = m.ee_in_base.R(i, j);
      yr[i][j] = y.rot(i, j);
    }
  }
  double tmp[3][3], tmp2[3][3];
  // tmp = cr * yr
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += cr[i][k] * yr[k][j];
      tmp[i][j] = s;
    }
  // tmp2 = tmp * cr^T
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += tmp[i][k] * cr[j][k];
      tmp2[i][j] = s;
    }
  // r_out = tmp2 * er
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += tmp2[i][k] * er[k][j];
      r_out[i][j] = s;
    }
  for (int i = 0; i < 3; ++i) {
    double s = 0;
    for (int k = 0; k < 3; ++k) s += cr[i][k] * y.trans[k];
    t_out[i] = s + m.ee_in_base.t[i];
  }
}

TEST(Decode, OursFullWithCoincidingFramesIsIdentityMap) {
  Rng rng(1);
  const ActionObjective y = random_objective(rng);
  EmbodimentConfig m;  // both identity
  const Action a = decode(CodecId::kOursFull, m, y);
  EXPECT_LT(pose_distance(a.target_ee_in_base, y.pose()), 1e-12);
}

TEST(Decode, BeIgnoresConfiguration) {
  Rng rng(2);
  const ActionObjective y = random_objective(rng);
  const EmbodimentConfig m1 = random_config(rng);
  const EmbodimentConfig m2 = random_config(rng);
  const Action a1 = decode(CodecId::kBe, m1, y);
  const Action a2 = decode(CodecId::kBe, m2, y);
  EXPECT_EQ(pose_distance(a1.target_ee_in_base, a2.target_ee_in_base), 0.0);
}

TEST(Decode, OursRobustMatchesBlockMatrixOracle) {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const EmbodimentConfig m = random_config(rng);
    const ActionObjective y = random_objective(rng);
    const Action a = decode(CodecId::kOursRobust, m, y);
    double r[3][3], t[3];
    robust_decode_oracle(m, y, r, t);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(a.target_ee_in_base.t[i], t[i], 1e-11);
      for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(a.target_ee_in_base.R(i, j), r[i][j], 1e-11);
      }
    }
  }
}

TEST(Encode, EeNullMotionGivesIdentityObjective) {
  Rng rng(4);
  const EmbodimentConfig m = random_config(rng);
  const Action a{m.ee_in_base, 0.2};
  const ActionObjective y = encode(CodecId::kEe, m, a);
  EXPECT_LT(geodesic_angle(y.rot, Mat3::Identity()), 1e-12);
  EXPECT_LT(y.trans.norm(), 1e-12);
}

TEST(Encode, OursFullWithCoincidingFramesIsIdentityMap) {
  Rng rng(5);
  EmbodimentConfig m;
  const Action a = random_action(rng);
  const ActionObjective y = encode(CodecId::kOursFull, m, a);
  EXPECT_LT(pose_distance(y.pose(), a.target_ee_in_base), 1e-12);
}

TEST(Encode, DecodeOfEncodeIsIdentityForAllCodecs) {
  Rng rng(6);
  for (int rep = 0; rep < 1000; ++rep) {
    const EmbodimentConfig m = random_config(rng);
    const Action a = random_action(rng);
    for (CodecId codec : kAllCodecs) {
      const Action back = decode(codec, m, encode(codec, m, a));
      EXPECT_LT(geodesic_angle(back.target_ee_in_base.R, a.target_ee_in_base.R),
                1e-10);
      EXPECT_LT((back.target_ee_in_base.t - a.target_ee_in_base.t).norm(),
                1e-10);
      EXPECT_EQ(back.gripper, a.gripper);
    }
  }
}

TEST(ObjectiveVec, IdentityLayout) {
  ActionObjective y;
  y.gripper = 1.0;
  const Vec10 v = objective_to_vec(y);
  Vec10 expected;
  expected << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1;
  EXPECT_EQ((v - expected).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ObjectiveVec, RoundTripExact) {
  Rng rng(7);
  for (int rep = 0; rep < 500; ++rep) {
    const ActionObjective y = random_objective(rng);
    bool clamped = true;
    const ActionObjective back = vec_to_objective(objective_to_vec(y), &clamped);
    EXPECT_FALSE(clamped);
    EXPECT_LT(geodesic_angle(y.rot, back.rot), 1e-12);
    EXPECT_LT((y.trans - back.trans).norm(), 1e-12);
    EXPECT_EQ(y.gripper, back.gripper);
  }
}

TEST(ObjectiveVec, GripperOvershootClampedWithFlag) {
  Vec10 v;
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1.5;
  bool clamped = false;
  const ActionObjective y = vec_to_objective(v, &clamped);
  EXPECT_TRUE(clamped);
  EXPECT_EQ(y.gripper, 1.0);
}

TEST(ObjectiveVec, DegenerateRotBlockRejected) {
  Vec10 v = Vec10::Zero();
  EXPECT_THROW(vec_to_objective(v), DegenerateRot6d);
}

TEST(ObjectiveInvariance, OursFullInvariantUnderFullGroup) {
  Rng rng(8);
  for (int rep = 0; rep < 500; ++rep) {
    const EmbodimentConfig m = random_config(rng);
    const Action a = random_action(rng);
    const GroupElement g = sample_group(SubgroupId::kFull, rng);
    const ActionObjective y = encode(CodecId::kOursFull, m, a);
    const ActionObjective yg =
        encode(CodecId::kOursFull, act_on_config(g, m), act_on_action(g, a));
    EXPECT_LT(geodesic_angle(y.rot, yg.rot), 1e-10);
    EXPECT_LT((y.trans - yg.trans).norm(), 1e-10);
  }
}

TEST(ObjectiveInvariance, OursRobustInvariantUnderBaseAndEeRot) {
  Rng rng(9);
  for (SubgroupId sub : {SubgroupId::kBase, SubgroupId::kEeRot}) {
    for (int rep = 0; rep < 300; ++rep) {
      const EmbodimentConfig m = random_config(rng);
      const Action a = random_action(rng);
      const GroupElement g = sample_group(sub, rng);
      const ActionObjective y = encode(CodecId::kOursRobust, m, a);
      const ActionObjective yg =
          encode(CodecId::kOursRobust, act_on_config(g, m), act_on_action(g, a));
      EXPECT_LT(geodesic_angle(y.rot, yg.rot), 1e-10);
      EXPECT_LT((y.trans - yg.trans).norm(), 1e-10);
    }
  }
}

TEST(ObjectiveInvariance, OursRobustEeTranslationResidualMatchesExpansion) {
  // Under a pure end-effector translation the rotation block stays invariant
  // and the translation residual is exactly ||(R_rel - I) * e_t|| where R_rel
  // is the action rotation relative to the current end-effector frame.
  Rng rng(10);
  for (int rep = 0; rep < 300; ++rep) {
    const EmbodimentConfig m = random_config(rng);
    const Action a = random_action(rng);
    const GroupElement g = sample_group(SubgroupId::kEeTrans, rng);
    const ActionObjective y = encode(CodecId::kOursRobust, m, a);
    const ActionObjective yg =
        encode(CodecId::kOursRobust, act_on_config(g, m), act_on_action(g, a));

    EXPECT_LT(geodesic_angle(y.rot, yg.rot), 1e-10);

    const Mat3 rel =
        m.ee_in_base.R.transpose() * a.target_ee_in_base.R;  // e_{e*} rotation
    const double expected = ((rel - Mat3::Identity()) * g.ee_redef.t).norm();
    EXPECT_NEAR((yg.trans - y.trans).norm(), expected, 1e-10);
  }
}

TEST(ObjectiveInvariance, CeObjectiveRightEquivariantUnderEeGroup) {
  Rng rng(11);
  for (int rep = 0; rep < 300; ++rep) {
    const EmbodimentConfig m = random_config(rng);
    const Action a = random_action(rng);
    const GroupElement g = sample_group(SubgroupId::kEe, rng);
    const ActionObjective y = encode(CodecId::kCe, m, a);
    const ActionObjective yg =
        encode(CodecId::kCe, act_on_config(g, m), act_on_action(g, a));
    const Pose expected = y.pose() * g.ee_redef;
    EXPECT_LT(pose_distance(yg.pose(), expected), 1e-10);
  }
}

TEST(CodecNames, RoundTripAndCaseInsensitive) {
  for (CodecId codec : kAllCodecs) {
    EXPECT_EQ(codec_from_string(to_string(codec)), codec);
  }
  EXPECT_EQ(codec_from_string("OURS-Robust"), CodecId::kOursRobust);
  EXPECT_EQ(codec_from_string("BE"), CodecId::kBe);
  EXPECT_FALSE(codec_from_string("im").has_value());
}

}  // namespace
