#pragma once

#include <cmath>
#include <vector>

#include "equivact/codecs.hpp"

namespace equivact {

struct CameraIntrinsics {
  double fx = 0, fy = 0;  // focal lengths, pixels
  double cx = 0, cy = 0;  // principal point, pixels
  int width = 0, height = 0;

  bool valid() const {
    return fx > 0 && fy > 0 && cx > 0 && cx < width && cy > 0 && cy < height;
  }
};

/// Visual tokens with their normalized camera-plane coordinates and the
/// camera pose each token was observed from.
struct TokenSet {
  Eigen::MatrixXd tokens;       // N x d
  Eigen::MatrixXd planes;       // N x 2
  std::vector<Pose> cam_poses;  // N, cam-in-base per token
};

struct AttentionWeights {
  Eigen::MatrixXd Wq, Wk, Wv;  // d x d
  Eigen::MatrixXd Wp;          // d x 2

  static AttentionWeights random_init(int d, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(d));
    auto fill = [&](Eigen::MatrixXd& m, int rows, int cols) {
      m.resize(rows, cols);
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
      }
    };
    AttentionWeights w;
    fill(w.Wq, d, d);
    fill(w.Wk, d, d);
    fill(w.Wv, d, d);
    fill(w.Wp, d, 2);
    return w;
  }
};

/// Block-diagonal stack of d/4 copies of a 4x4 homogeneous matrix.
inline Eigen::MatrixXd sigma(const Mat4& T, int d) {
  if (d <= 0 || d % 4 != 0) {
    throw DimensionNotMultipleOf4("sigma needs d divisible by 4, got " +
                                  std::to_string(d));
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int b = 0; b < d / 4; ++b) out.block<4, 4>(4 * b, 4 * b) = T;
  return out;
}

inline Eigen::MatrixXd sigma(const Pose& T, int d) { return sigma(T.matrix(), d); }

struct AttentionResult {
  Eigen::MatrixXd outputs;  // N x d
  Eigen::MatrixXd weights;  // N x N row-stochastic softmax
};

/// Single-head attention with relative-camera-pose embedding:
///   q'_i = sigma(inv(T_i)^T) q_i,  k'_i = sigma(T_j) k_j,  v' likewise,
///   o_i  = sigma(inv(T_i)) sum_j softmax_j(q'_i . k'_j / sqrt(d)) v'_j
/// where T_i is the cam-in-base pose of token i. The query-side transpose is
/// the literal matrix transpose of the homogeneous matrix, as opposed to a
/// second inverse; paired with k' it makes every logit a function of the
/// relative pose inv(T_i) * T_j only, so common base transforms cancel.
inline AttentionResult pose_embedded_attention_full(const TokenSet& ts,
                                                    const AttentionWeights& w) {
  const int n = static_cast<int>(ts.tokens.rows());
  const int d = static_cast<int>(ts.tokens.cols());
  if (ts.planes.rows() != n || ts.planes.cols() != 2 ||
      static_cast<int>(ts.cam_poses.size()) != n) {
    throw ShapeMismatch("token set fields disagree on N");
  }
  if (w.Wq.rows() != d || w.Wq.cols() != d || w.Wk.rows() != d ||
      w.Wk.cols() != d || w.Wv.rows() != d || w.Wv.cols() != d ||
      w.Wp.rows() != d || w.Wp.cols() != 2) {
    throw ShapeMismatch("attention weights do not match token dimension");
  }

  const Eigen::MatrixXd x = ts.tokens + ts.planes * w.Wp.transpose();
  const Eigen::MatrixXd q = x * w.Wq.transpose();
  const Eigen::MatrixXd k = x * w.Wk.transpose();
  const Eigen::MatrixXd v = x * w.Wv.transpose();

  Eigen::MatrixXd qp(n, d), kp(n, d), vp(n, d);
  std::vector<Eigen::MatrixXd> out_transport(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Mat4 cam = ts.cam_poses[static_cast<std::size_t>(i)].matrix();
    const Mat4 cam_inv =
        inverse(ts.cam_poses[static_cast<std::size_t>(i)]).matrix();
    qp.row(i) = (sigma(Mat4(cam_inv.transpose()), d) * q.row(i).transpose())
                    .transpose();
    kp.row(i) = (sigma(cam, d) * k.row(i).transpose()).transpose();
    vp.row(i) = (sigma(cam, d) * v.row(i).transpose()).transpose();
    out_transport[static_cast<std::size_t>(i)] = sigma(cam_inv, d);
  }

  Eigen::MatrixXd logits = qp * kp.transpose() / std::sqrt(double(d));
  Eigen::MatrixXd weights(n, n);
  for (int i = 0; i < n; ++i) {
    const double row_max = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - row_max).exp();
    weights.row(i) = (e / e.sum()).matrix();
  }

  Eigen::MatrixXd mixed = weights * vp;  // N x d
  AttentionResult res;
  res.outputs.resize(n, d);
  for (int i = 0; i < n; ++i) {
    res.outputs.row(i) =
        (out_transport[static_cast<std::size_t>(i)] * mixed.row(i).transpose())
            .transpose();
  }
  res.weights = std::move(weights);
  return res;
}

inline Eigen::MatrixXd pose_embedded_attention(const TokenSet& ts,
                                               const AttentionWeights& w) {
  return pose_embedded_attention_full(ts, w).outputs;
}

struct ImagePoint {
  double u = 0, v = 0;     // normalized by width/height
  bool in_image = false;   // off-screen projections are allowed, just flagged
};

/// Pinhole projection of a base-frame point into normalized image
/// coordinates. Throws BehindCamera for non-positive depth.
inline ImagePoint project_point(const CameraIntrinsics& intr,
                                const Pose& cam_in_base,
                                const Vec3& point_in_base) {
  const Vec3 pc = inverse(cam_in_base).apply(point_in_base);
  if (pc.z() <= 1e-6) {
    throw BehindCamera("point depth " + std::to_string(pc.z()) +
                       " not in front of camera");
  }
  ImagePoint p;
  p.u = (intr.fx * pc.x() / pc.z() + intr.cx) / intr.width;
  p.v = (intr.fy * pc.y() / pc.z() + intr.cy) / intr.height;
  p.in_image = p.u >= 0.0 && p.u <= 1.0 && p.v >= 0.0 && p.v <= 1.0;
  return p;
}

/// Positional embedding for a noisy action token: decode the objective,
/// project the decoded target position into the camera, multiply by Wp.
inline Eigen::VectorXd action_positional_embedding(
    const CameraIntrinsics& intr, const EmbodimentConfig& m, CodecId codec,
    const ActionObjective& y_noisy, const Eigen::MatrixXd& w_p) {
  const Action a = decode(codec, m, y_noisy);
  const ImagePoint p = project_point(intr, m.cam_in_base, a.target_ee_in_base.t);
  return w_p * Eigen::Vector2d(p.u, p.v);
}

}  // namespace equivact
