#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "equivact/codecs.hpp"
#include "equivact/format.hpp"

namespace equivact {

/// Forward-process schedule: linear betas with cumulative alpha products.
struct NoiseSchedule {
  int num_train_steps = 0;
  std::vector<double> betas;
  std::vector<double> alphas_cumprod;

  static NoiseSchedule linear(int steps = 100, double beta_start = 1e-4,
                              double beta_end = 2e-2) {
    if (steps < 1 || beta_start <= 0 || beta_end >= 1 || beta_end < beta_start) {
      throw std::invalid_argument("invalid noise schedule parameters");
    }
    NoiseSchedule s;
    s.num_train_steps = steps;
    s.betas.resize(steps);
    s.alphas_cumprod.resize(steps);
    double prod = 1.0;
    for (int k = 0; k < steps; ++k) {
      const double beta =
          steps == 1 ? beta_start
                     : beta_start + (beta_end - beta_start) * k / (steps - 1);
      s.betas[k] = beta;
      prod *= 1.0 - beta;
      s.alphas_cumprod[k] = prod;
    }
    return s;
  }
};

/// x_k = sqrt(abar_k) x0 + sqrt(1 - abar_k) noise.
inline Vec10 q_sample(const NoiseSchedule& s, const Vec10& x0, int k,
                      const Vec10& noise) {
  if (k < 0 || k >= s.num_train_steps) {
    throw StepOutOfRange("q_sample step " + std::to_string(k) +
                         " outside [0, " + std::to_string(s.num_train_steps) +
                         ")");
  }
  const double a = s.alphas_cumprod[static_cast<std::size_t>(k)];
  return std::sqrt(a) * x0 + std::sqrt(1.0 - a) * noise;
}

/// Sinusoidal embedding of an integer step, transformer-style frequencies.
inline Eigen::VectorXd timestep_embedding(int k, int dim) {
  Eigen::VectorXd e(dim);
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq =
        std::exp(-std::log(10000.0) * static_cast<double>(i) / half);
    e[2 * i] = std::sin(k * freq);
    e[2 * i + 1] = std::cos(k * freq);
  }
  if (dim % 2) e[dim - 1] = 0.0;
  return e;
}

/// Two-hidden-layer tanh MLP over [obs; x_k; temb] with FiLM timestep
/// conditioning on each hidden pre-activation. Output is the predicted noise
/// (epsilon parameterization).
struct DenoiserModel {
  int obs_dim = 0;
  int hidden = 128;
  int temb_dim = 16;

  Eigen::MatrixXd w1, w2, w3;
  Eigen::MatrixXd skip_w;  // linear input->output path; carries the affine
                           // part of the epsilon target
  Eigen::VectorXd b1, b2, b3;
  Eigen::MatrixXd gamma1_w, beta1_w, gamma2_w, beta2_w;  // FiLM projections
  Eigen::MatrixXd gamma3_w, beta3_w;                     // output-layer FiLM
  Eigen::VectorXd gamma1_b, beta1_b, gamma2_b, beta2_b;
  Eigen::VectorXd gamma3_b, beta3_b;

  int input_dim() const { return obs_dim + 10 + temb_dim; }

  template <typename Self, typename F>
  static void visit_params(Self& self, F&& f) {
    f("w1", self.w1);
    f("b1", self.b1);
    f("gamma1_w", self.gamma1_w);
    f("gamma1_b", self.gamma1_b);
    f("beta1_w", self.beta1_w);
    f("beta1_b", self.beta1_b);
    f("w2", self.w2);
    f("b2", self.b2);
    f("gamma2_w", self.gamma2_w);
    f("gamma2_b", self.gamma2_b);
    f("beta2_w", self.beta2_w);
    f("beta2_b", self.beta2_b);
    f("w3", self.w3);
    f("b3", self.b3);
    f("skip_w", self.skip_w);
    f("gamma3_w", self.gamma3_w);
    f("gamma3_b", self.gamma3_b);
    f("beta3_w", self.beta3_w);
    f("beta3_b", self.beta3_b);
  }

  static DenoiserModel zeros(int obs_dim, int hidden = 128, int temb_dim = 16) {
    DenoiserModel m;
    m.obs_dim = obs_dim;
    m.hidden = hidden;
    m.temb_dim = temb_dim;
    m.w1 = Eigen::MatrixXd::Zero(hidden, m.input_dim());
    m.b1 = Eigen::VectorXd::Zero(hidden);
    m.w2 = Eigen::MatrixXd::Zero(hidden, hidden);
    m.b2 = Eigen::VectorXd::Zero(hidden);
    m.w3 = Eigen::MatrixXd::Zero(10, hidden);
    m.b3 = Eigen::VectorXd::Zero(10);
    m.skip_w = Eigen::MatrixXd::Zero(10, m.input_dim());
    m.gamma1_w = Eigen::MatrixXd::Zero(hidden, temb_dim);
    m.gamma1_b = Eigen::VectorXd::Zero(hidden);
    m.beta1_w = Eigen::MatrixXd::Zero(hidden, temb_dim);
    m.beta1_b = Eigen::VectorXd::Zero(hidden);
    m.gamma2_w = Eigen::MatrixXd::Zero(hidden, temb_dim);
    m.gamma2_b = Eigen::VectorXd::Zero(hidden);
    m.beta2_w = Eigen::MatrixXd::Zero(hidden, temb_dim);
    m.beta2_b = Eigen::VectorXd::Zero(hidden);
    m.gamma3_w = Eigen::MatrixXd::Zero(10, temb_dim);
    m.gamma3_b = Eigen::VectorXd::Zero(10);
    m.beta3_w = Eigen::MatrixXd::Zero(10, temb_dim);
    m.beta3_b = Eigen::VectorXd::Zero(10);
    return m;
  }

  /// Uniform fan-in init for the MLP path; FiLM projections start at zero so
  /// conditioning ramps in from an identity transform.
  static DenoiserModel random_init(int obs_dim, Rng& rng, int hidden = 128,
                                   int temb_dim = 16) {
    DenoiserModel m = zeros(obs_dim, hidden, temb_dim);
    auto fill = [&](Eigen::MatrixXd& w) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
          w(i, j) = rng.uniform(-bound, bound);
        }
      }
    };
    fill(m.w1);
    fill(m.w2);
    fill(m.w3);
    return m;
  }
};

struct ForwardCache {
  Eigen::MatrixXd x, temb;
  Eigen::MatrixXd z1, gamma1, h1;
  Eigen::MatrixXd z2, gamma2, h2;
  Eigen::MatrixXd z3, gamma3, out;
};

/// Batched forward pass; columns are samples.
inline Eigen::MatrixXd denoiser_forward(const DenoiserModel& m,
                                        const Eigen::MatrixXd& obs,
                                        const Eigen::MatrixXd& x_noisy,
                                        const std::vector<int>& steps,
                                        ForwardCache* cache = nullptr) {
  const Eigen::Index batch = obs.cols();
  if (obs.rows() != m.obs_dim || x_noisy.rows() != 10 ||
      x_noisy.cols() != batch ||
      static_cast<Eigen::Index>(steps.size()) != batch) {
    throw ShapeMismatch("denoiser_forward inputs disagree with model topology");
  }
  Eigen::MatrixXd temb(m.temb_dim, batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    temb.col(i) = timestep_embedding(steps[static_cast<std::size_t>(i)],
                                     m.temb_dim);
  }
  Eigen::MatrixXd x(m.input_dim(), batch);
  x.topRows(m.obs_dim) = obs;
  x.middleRows(m.obs_dim, 10) = x_noisy;
  x.bottomRows(m.temb_dim) = temb;

  const Eigen::MatrixXd z1 = (m.w1 * x).colwise() + m.b1;
  const Eigen::MatrixXd gamma1 = (m.gamma1_w * temb).colwise() + m.gamma1_b;
  const Eigen::MatrixXd beta1 = (m.beta1_w * temb).colwise() + m.beta1_b;
  const Eigen::MatrixXd h1 =
      (z1.array() * (1.0 + gamma1.array()) + beta1.array()).tanh().matrix();

  const Eigen::MatrixXd z2 = (m.w2 * h1).colwise() + m.b2;
  const Eigen::MatrixXd gamma2 = (m.gamma2_w * temb).colwise() + m.gamma2_b;
  const Eigen::MatrixXd beta2 = (m.beta2_w * temb).colwise() + m.beta2_b;
  const Eigen::MatrixXd h2 =
      (z2.array() * (1.0 + gamma2.array()) + beta2.array()).tanh().matrix();

  const Eigen::MatrixXd z3 = ((m.w3 * h2) + (m.skip_w * x)).colwise() + m.b3;
  const Eigen::MatrixXd gamma3 = (m.gamma3_w * temb).colwise() + m.gamma3_b;
  const Eigen::MatrixXd beta3 = (m.beta3_w * temb).colwise() + m.beta3_b;
  Eigen::MatrixXd out =
      (z3.array() * (1.0 + gamma3.array()) + beta3.array()).matrix();
  if (cache) {
    cache->x = x;
    cache->temb = temb;
    cache->z1 = z1;
    cache->gamma1 = gamma1;
    cache->h1 = h1;
    cache->z2 = z2;
    cache->gamma2 = gamma2;
    cache->h2 = h2;
    cache->z3 = z3;
    cache->gamma3 = gamma3;
    cache->out = out;
  }
  return out;
}

inline Vec10 predict_noise(const DenoiserModel& m, const Eigen::VectorXd& obs,
                           const Vec10& x_noisy, int k) {
  Eigen::MatrixXd out =
      denoiser_forward(m, obs, Eigen::MatrixXd(x_noisy), {k});
  return out.col(0);
}

struct DiffusionBatch {
  Eigen::MatrixXd obs;           // obs_dim x B
  Eigen::MatrixXd x_noisy;       // 10 x B
  std::vector<int> steps;        // B
  Eigen::MatrixXd noise_target;  // 10 x B
};

using Gradients = DenoiserModel;

/// Mean-squared noise-prediction error with manually accumulated
/// reverse-mode gradients.
inline double loss_and_grad(const DenoiserModel& m, const DiffusionBatch& batch,
                            Gradients& grad) {
  if (batch.obs.cols() == 0) {
    throw std::invalid_argument("loss_and_grad requires a nonempty batch");
  }
  ForwardCache c;
  denoiser_forward(m, batch.obs, batch.x_noisy, batch.steps, &c);

  const Eigen::Index batch_size = batch.obs.cols();
  const double denom = static_cast<double>(10 * batch_size);
  const Eigen::MatrixXd residual = c.out - batch.noise_target;
  const double loss = residual.squaredNorm() / denom;

  grad = DenoiserModel::zeros(m.obs_dim, m.hidden, m.temb_dim);

  const Eigen::MatrixXd d_out = (2.0 / denom) * residual;
  grad.gamma3_w = (d_out.array() * c.z3.array()).matrix() * c.temb.transpose();
  grad.gamma3_b = (d_out.array() * c.z3.array()).matrix().rowwise().sum();
  grad.beta3_w = d_out * c.temb.transpose();
  grad.beta3_b = d_out.rowwise().sum();
  const Eigen::MatrixXd d_z3 =
      (d_out.array() * (1.0 + c.gamma3.array())).matrix();
  grad.w3 = d_z3 * c.h2.transpose();
  grad.b3 = d_z3.rowwise().sum();
  grad.skip_w = d_z3 * c.x.transpose();

  const Eigen::MatrixXd d_h2 = m.w3.transpose() * d_z3;
  const Eigen::MatrixXd d_zt2 =
      (d_h2.array() * (1.0 - c.h2.array().square())).matrix();
  const Eigen::MatrixXd d_z2 =
      (d_zt2.array() * (1.0 + c.gamma2.array())).matrix();
  grad.gamma2_w = (d_zt2.array() * c.z2.array()).matrix() * c.temb.transpose();
  grad.gamma2_b = (d_zt2.array() * c.z2.array()).matrix().rowwise().sum();
  grad.beta2_w = d_zt2 * c.temb.transpose();
  grad.beta2_b = d_zt2.rowwise().sum();
  grad.w2 = d_z2 * c.h1.transpose();
  grad.b2 = d_z2.rowwise().sum();

  const Eigen::MatrixXd d_h1 = m.w2.transpose() * d_z2;
  const Eigen::MatrixXd d_zt1 =
      (d_h1.array() * (1.0 - c.h1.array().square())).matrix();
  const Eigen::MatrixXd d_z1 =
      (d_zt1.array() * (1.0 + c.gamma1.array())).matrix();
  grad.gamma1_w = (d_zt1.array() * c.z1.array()).matrix() * c.temb.transpose();
  grad.gamma1_b = (d_zt1.array() * c.z1.array()).matrix().rowwise().sum();
  grad.beta1_w = d_zt1 * c.temb.transpose();
  grad.beta1_b = d_zt1.rowwise().sum();
  grad.w1 = d_z1 * c.x.transpose();
  grad.b1 = d_z1.rowwise().sum();

  return loss;
}

/// Deterministic DDIM sampler, eta = 0, evenly strided steps.
inline Vec10 ddim_sample(const DenoiserModel& m, const NoiseSchedule& s,
                         const Eigen::VectorXd& obs, int num_infer_steps,
                         std::uint64_t seed) {
  if (num_infer_steps < 1 || num_infer_steps > s.num_train_steps) {
    throw StepOutOfRange("num_infer_steps must lie in [1, num_train_steps]");
  }
  Rng rng(seed);
  Vec10 x;
  for (int i = 0; i < 10; ++i) x[i] = rng.normal();

  const int stride = s.num_train_steps / num_infer_steps;
  for (int i = 0; i < num_infer_steps; ++i) {
    const int t = s.num_train_steps - 1 - i * stride;
    const int t_prev = t - stride;
    const double a_t = s.alphas_cumprod[static_cast<std::size_t>(t)];
    const double a_prev =
        t_prev >= 0 ? s.alphas_cumprod[static_cast<std::size_t>(t_prev)] : 1.0;
    const Vec10 eps = predict_noise(m, obs, x, t);
    const Vec10 x0 = (x - std::sqrt(1.0 - a_t) * eps) / std::sqrt(a_t);
    x = std::sqrt(a_prev) * x0 + std::sqrt(1.0 - a_prev) * eps;
  }
  return x;
}

struct TrainConfig {
  double learning_rate = 0.02;
  int iterations = 8000;
  int batch_size = 64;
  std::uint64_t seed = 0;
  double clip_norm = 5.0;

  void validate() const {
    if (learning_rate <= 0 || iterations <= 0 || batch_size <= 0 ||
        clip_norm <= 0) {
      throw std::invalid_argument("TrainConfig fields must be positive");
    }
  }
};

struct TrainStats {
  double loss_first_tenth = 0.0;
  double loss_last_tenth = 0.0;
};

/// Plain SGD with global-norm gradient clipping on the DDPM epsilon MSE.
/// Deterministic per seed: batch order, steps and noise are all drawn from
/// one generator. Starts from `init` when given (fine-tuning), otherwise from
/// a seeded random init.
inline DenoiserModel fit(
    const std::vector<std::pair<Eigen::VectorXd, Vec10>>& dataset,
    const NoiseSchedule& schedule, const TrainConfig& cfg,
    const DenoiserModel* init = nullptr, TrainStats* stats = nullptr,
    int hidden = 128, int temb_dim = 16) {
  cfg.validate();
  if (dataset.empty()) {
    throw std::invalid_argument("fit requires a nonempty dataset");
  }
  const int obs_dim = static_cast<int>(dataset.front().first.size());
  for (const auto& [obs, y] : dataset) {
    if (obs.size() != obs_dim || !obs.allFinite() || !y.allFinite()) {
      throw std::invalid_argument("dataset rows must be finite and uniform");
    }
  }

  Rng rng(derive_seed(cfg.seed, 0xf17));
  DenoiserModel model =
      init ? *init : DenoiserModel::random_init(obs_dim, rng, hidden, temb_dim);
  if (model.obs_dim != obs_dim) {
    throw ShapeMismatch("initial model obs_dim does not match dataset");
  }

  const int batch = static_cast<int>(
      std::min<std::size_t>(dataset.size(), static_cast<std::size_t>(cfg.batch_size)));
  DiffusionBatch b;
  b.obs.resize(obs_dim, batch);
  b.x_noisy.resize(10, batch);
  b.noise_target.resize(10, batch);
  b.steps.resize(static_cast<std::size_t>(batch));

  Gradients grad;
  std::vector<double> losses;
  losses.reserve(static_cast<std::size_t>(cfg.iterations));
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    for (int i = 0; i < batch; ++i) {
      const auto& [obs, y] =
          dataset[static_cast<std::size_t>(rng.index(dataset.size()))];
      const int k = static_cast<int>(
          rng.index(static_cast<std::uint64_t>(schedule.num_train_steps)));
      Vec10 noise;
      for (int j = 0; j < 10; ++j) noise[j] = rng.normal();
      b.obs.col(i) = obs;
      b.steps[static_cast<std::size_t>(i)] = k;
      b.x_noisy.col(i) = q_sample(schedule, y, k, noise);
      b.noise_target.col(i) = noise;
    }
    const double loss = loss_and_grad(model, b, grad);
    if (!std::isfinite(loss)) {
      throw NonFiniteLoss("training loss became non-finite at iteration " +
                          std::to_string(iter) + " (lr " +
                          format_double(cfg.learning_rate) + ")");
    }
    losses.push_back(loss);

    double norm2 = 0.0;
    DenoiserModel::visit_params(grad, [&](const char*, const auto& p) {
      norm2 += p.squaredNorm();
    });
    const double norm = std::sqrt(norm2);
    const double scale =
        norm > cfg.clip_norm ? cfg.clip_norm / norm : 1.0;
    // Cosine-decayed step size; stateless, so determinism only depends on
    // the seed-driven batch sequence.
    const double decay =
        0.5 * (1.0 + std::cos(M_PI * iter / std::max(1, cfg.iterations - 1)));
    const double step = cfg.learning_rate * decay * scale;

    model.w1 -= step * grad.w1;
    model.b1 -= step * grad.b1;
    model.gamma1_w -= step * grad.gamma1_w;
    model.gamma1_b -= step * grad.gamma1_b;
    model.beta1_w -= step * grad.beta1_w;
    model.beta1_b -= step * grad.beta1_b;
    model.w2 -= step * grad.w2;
    model.b2 -= step * grad.b2;
    model.gamma2_w -= step * grad.gamma2_w;
    model.gamma2_b -= step * grad.gamma2_b;
    model.beta2_w -= step * grad.beta2_w;
    model.beta2_b -= step * grad.beta2_b;
    model.w3 -= step * grad.w3;
    model.b3 -= step * grad.b3;
    model.skip_w -= step * grad.skip_w;
    model.gamma3_w -= step * grad.gamma3_w;
    model.gamma3_b -= step * grad.gamma3_b;
    model.beta3_w -= step * grad.beta3_w;
    model.beta3_b -= step * grad.beta3_b;
  }

  if (stats) {
    const std::size_t tenth =
        std::max<std::size_t>(1, losses.size() / 10);
    double first = 0, last = 0;
    for (std::size_t i = 0; i < tenth; ++i) first += losses[i];
    for (std::size_t i = losses.size() - tenth; i < losses.size(); ++i) {
      last += losses[i];
    }
    stats->loss_first_tenth = first / static_cast<double>(tenth);
    stats->loss_last_tenth = last / static_cast<double>(tenth);
  }
  return model;
}

/// Versioned, binary-free JSON checkpoint: shapes plus flat row-major arrays.
inline std::string save_model(const DenoiserModel& m) {
  JsonWriter w;
  w.begin_object();
  w.key("format").value("equivact-denoiser");
  w.key("version").value(1);
  w.key("obs_dim").value(m.obs_dim);
  w.key("hidden").value(m.hidden);
  w.key("temb_dim").value(m.temb_dim);
  w.key("params").begin_object();
  DenoiserModel::visit_params(const_cast<DenoiserModel&>(m),
                              [&](const char* name, const auto& p) {
    w.key(name).begin_object();
    w.key("shape").begin_array();
    w.value(static_cast<long long>(p.rows()));
    w.value(static_cast<long long>(p.cols()));
    w.end_array();
    w.key("data").begin_array();
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = 0; j < p.cols(); ++j) {
        w.value(double(p(i, j)));
      }
    }
    w.end_array();
    w.end_object();
  });
  w.end_object();
  w.end_object();
  return w.take();
}

inline DenoiserModel load_model(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "equivact-denoiser" || j.value("version", 0) != 1) {
    throw ShapeMismatch("unrecognized checkpoint format");
  }
  DenoiserModel m = DenoiserModel::zeros(j.at("obs_dim").get<int>(),
                                         j.at("hidden").get<int>(),
                                         j.at("temb_dim").get<int>());
  const auto& params = j.at("params");
  DenoiserModel::visit_params(m, [&](const char* name, auto& p) {
    const auto& entry = params.at(name);
    const auto& shape = entry.at("shape");
    if (shape.at(0).get<Eigen::Index>() != p.rows() ||
        shape.at(1).get<Eigen::Index>() != p.cols()) {
      throw ShapeMismatch(std::string("checkpoint shape mismatch for ") + name);
    }
    const auto& data = entry.at("data");
    if (static_cast<Eigen::Index>(data.size()) != p.size()) {
      throw ShapeMismatch(std::string("checkpoint data size mismatch for ") +
                          name);
    }
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j2 = 0; j2 < p.cols(); ++j2) {
        p(i, j2) = data.at(idx++).template get<double>();
      }
    }
  });
  return m;
}

}  // namespace equivact
