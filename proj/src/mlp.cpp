/**
 * @file mlp.cpp
 * @brief Tiny fully connected network: forward pass, backprop, training
 */

#include "dhogm/error.hpp"
#include "dhogm/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dhogm {

namespace {

struct LayerSpan {
  std::size_t fan_in;
  std::size_t fan_out;
  std::size_t weight_offset;
  std::size_t bias_offset;
};

std::vector<LayerSpan> layout(std::span<const std::size_t> sizes) {
  std::vector<LayerSpan> layers;
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    LayerSpan s{sizes[l], sizes[l + 1], offset, offset + sizes[l] * sizes[l + 1]};
    offset = s.bias_offset + s.fan_out;
    layers.push_back(s);
  }
  return layers;
}

// Output logit; activations[l] holds post-activation values of layer l
// (activations[0] is the input).
double forward_logit(const MlpModel &m, const MlpInput &x,
                     std::vector<std::vector<double>> &activations) {
  const auto layers = layout(m.layer_sizes);
  activations.resize(m.layer_sizes.size());
  activations[0].assign(x.begin(), x.end());
  double logit = 0.0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto &L = layers[l];
    auto &out = activations[l + 1];
    out.assign(L.fan_out, 0.0);
    const auto &in = activations[l];
    const bool last = l + 1 == layers.size();
    for (std::size_t o = 0; o < L.fan_out; ++o) {
      double z = m.params[L.bias_offset + o];
      const double *w = m.params.data() + L.weight_offset + o * L.fan_in;
      for (std::size_t i = 0; i < L.fan_in; ++i) {
        z += w[i] * in[i];
      }
      out[o] = last ? z : std::max(z, 0.0);
    }
    if (last) {
      logit = out[0];
    }
  }
  return logit;
}

// log(1 + exp(z)) without overflow
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void require_finite(const MlpInput &x) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteInput, "MLP input contains NaN or Inf");
    }
  }
}

} // namespace

double logistic(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::size_t parameter_count(std::span<const std::size_t> sizes) {
  if (sizes.size() < 2 || sizes.front() != 3 || sizes.back() != 1) {
    throw Error(ErrorCode::InvalidArgument,
                "MLP layout must map 3 inputs to 1 output");
  }
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    if (sizes[l] == 0 || sizes[l + 1] == 0) {
      throw Error(ErrorCode::InvalidArgument, "MLP layers must be non-empty");
    }
    n += (sizes[l] + 1) * sizes[l + 1];
  }
  return n;
}

MlpModel make_mlp(std::span<const std::size_t> sizes, const MlpTrainConfig &cfg) {
  MlpModel m;
  m.layer_sizes.assign(sizes.begin(), sizes.end());
  m.params.resize(parameter_count(sizes));
  m.train_config = cfg;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dist(-cfg.init_range, cfg.init_range);
  for (auto &p : m.params) {
    p = dist(rng);
  }
  return m;
}

MlpModel zero_mlp(std::span<const std::size_t> sizes) {
  MlpModel m;
  m.layer_sizes.assign(sizes.begin(), sizes.end());
  m.params.assign(parameter_count(sizes), 0.0);
  return m;
}

double mlp_forward(const MlpModel &m, const MlpInput &x) {
  require_finite(x);
  if (m.params.size() != parameter_count(m.layer_sizes)) {
    throw Error(ErrorCode::MalformedModel, "parameter vector does not match layout");
  }
  std::vector<std::vector<double>> act;
  return logistic(forward_logit(m, x, act));
}

double mlp_forward(const MlpModel &m, const SliceTriplet &t) {
  return mlp_forward(m, MlpInput{t.axial, t.coronal, t.sagittal});
}

LossAndGradient mlp_loss_gradient(const MlpModel &m, std::span<const MlpInput> inputs,
                                  std::span<const double> targets) {
  if (inputs.size() != targets.size() || inputs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "inputs and targets must be non-empty and aligned");
  }
  const auto layers = layout(m.layer_sizes);
  LossAndGradient out;
  out.gradient.assign(m.params.size(), 0.0);
  std::vector<std::vector<double>> act;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  const double inv_n = 1.0 / static_cast<double>(inputs.size());

  for (std::size_t s = 0; s < inputs.size(); ++s) {
    require_finite(inputs[s]);
    const double z = forward_logit(m, inputs[s], act);
    const double y = targets[s];
    out.loss += (softplus(z) - y * z) * inv_n;

    delta.assign(1, (logistic(z) - y) * inv_n);
    for (std::size_t l = layers.size(); l-- > 0;) {
      const auto &L = layers[l];
      const auto &in = act[l];
      for (std::size_t o = 0; o < L.fan_out; ++o) {
        double *gw = out.gradient.data() + L.weight_offset + o * L.fan_in;
        for (std::size_t i = 0; i < L.fan_in; ++i) {
          gw[i] += delta[o] * in[i];
        }
        out.gradient[L.bias_offset + o] += delta[o];
      }
      if (l == 0) {
        break;
      }
      prev_delta.assign(L.fan_in, 0.0);
      for (std::size_t o = 0; o < L.fan_out; ++o) {
        const double *w = m.params.data() + L.weight_offset + o * L.fan_in;
        for (std::size_t i = 0; i < L.fan_in; ++i) {
          prev_delta[i] += w[i] * delta[o];
        }
      }
      // ReLU derivative, taken as 0 at exactly 0
      for (std::size_t i = 0; i < L.fan_in; ++i) {
        if (!(in[i] > 0.0)) {
          prev_delta[i] = 0.0;
        }
      }
      delta.swap(prev_delta);
    }
  }
  return out;
}

MlpTrainResult mlp_train_samples(std::span<const MlpInput> inputs,
                                 std::span<const double> targets,
                                 const MlpTrainConfig &cfg,
                                 std::span<const std::size_t> layer_sizes) {
  if (!(cfg.learning_rate > 0.0) || cfg.epochs == 0) {
    throw Error(ErrorCode::InvalidArgument, "learning rate and epochs must be positive");
  }
  MlpTrainResult r;
  r.model = make_mlp(layer_sizes, cfg);
  r.loss_history.reserve(cfg.epochs + 1);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto lg = mlp_loss_gradient(r.model, inputs, targets);
    r.loss_history.push_back(lg.loss);
    for (std::size_t i = 0; i < r.model.params.size(); ++i) {
      r.model.params[i] -= cfg.learning_rate * lg.gradient[i];
    }
  }
  r.model.final_loss = mlp_loss_gradient(r.model, inputs, targets).loss;
  r.loss_history.push_back(r.model.final_loss);
  return r;
}

MlpTrainResult mlp_train(std::span<const SliceFeatureSeries> features,
                         std::span<const QualityLabel> labels,
                         const MlpTrainConfig &cfg,
                         std::span<const std::size_t> layer_sizes) {
  if (features.size() != labels.size()) {
    throw Error(ErrorCode::InvalidArgument, "features and labels differ in length");
  }
  const auto good = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), QualityLabel::Good));
  const std::size_t poor = labels.size() - good;
  if (good == 0 || poor == 0) {
    throw Error(ErrorCode::ClassMissing, "MLP training needs both quality classes");
  }
  if (good < 2 || poor < 2) {
    throw Error(ErrorCode::InsufficientData,
                "MLP training needs at least two subjects per class");
  }
  std::vector<MlpInput> inputs;
  std::vector<double> targets;
  for (std::size_t s = 0; s < features.size(); ++s) {
    const double y = labels[s] == QualityLabel::Poor ? 1.0 : 0.0;
    const auto &f = features[s];
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f.degenerate[i]) {
        continue;
      }
      const auto &t = f.triplets[i];
      inputs.push_back({t.axial, t.coronal, t.sagittal});
      targets.push_back(y);
    }
  }
  if (inputs.empty()) {
    throw Error(ErrorCode::InsufficientData, "no usable slice triplets");
  }
  return mlp_train_samples(inputs, targets, cfg, layer_sizes);
}

PathDecision predict_2d(const MlpModel &m, const SliceFeatureSeries &s) {
  const std::size_t n = s.size();
  if (n == 0 || majority_degenerate(s.n_degenerate(), n)) {
    return PathDecision::unscorable();
  }
  std::size_t votes_poor = 0;
  std::size_t used = 0;
  double sum_p2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.degenerate[i]) {
      continue;
    }
    const double p2 = mlp_forward(m, s.triplets[i]);
    sum_p2 += p2;
    votes_poor += p2 > 0.5 ? 1 : 0;
    ++used;
  }
  if (used == 0) {
    return PathDecision::unscorable();
  }
  PathDecision d;
  d.label = 2 * votes_poor >= used ? QualityLabel::Poor : QualityLabel::Good;
  d.p_c2 = sum_p2 / static_cast<double>(used);
  d.p_c1 = 1.0 - d.p_c2;
  return d;
}

} // namespace dhogm
