#include "neuridx/neural.hpp"

#include <cmath>
#include <cstring>

#include "neuridx/error.hpp"
#include "neuridx/rng.hpp"

namespace neuridx {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Logistic: return "logistic";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "logistic") return Activation::Logistic;
  if (name == "identity") return Activation::Identity;
  fail(Errc::invalid_config, "unknown activation: " + name);
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.biases.size();
  return n;
}

namespace {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: return std::tanh(z);
    case Activation::Logistic: return 1.0 / (1.0 + std::exp(-z));
    case Activation::Identity: return z;
  }
  return z;
}

// Derivative expressed through the activation output.
double activate_deriv(Activation a, double y) {
  switch (a) {
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::Logistic: return y * (1.0 - y);
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

void validate_config(const NetworkConfig& config) {
  if (config.connection_offset != 1)
    fail(Errc::invalid_config,
         "only feedforward networks (s=1) are supported, got s=" +
             std::to_string(config.connection_offset));
  if (config.layer_sizes.size() < 2)
    fail(Errc::invalid_config, "need at least input and output layer sizes");
  for (std::size_t n : config.layer_sizes)
    if (n < 1) fail(Errc::invalid_config, "layer sizes must be >= 1");
}

}  // namespace

Network init_network(const NetworkConfig& config) {
  validate_config(config);
  Network net;
  net.config = config;
  Rng rng(config.seed);
  std::size_t num_layers = config.layer_sizes.size() - 1;
  net.layers.resize(num_layers);
  for (std::size_t j = 0; j < num_layers; ++j) {
    Layer& layer = net.layers[j];
    layer.in = config.layer_sizes[j];
    layer.out = config.layer_sizes[j + 1];
    layer.activation = (j + 1 == num_layers) ? config.output_activation
                                             : config.hidden_activation;
    double r = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    layer.weights.resize(layer.out * layer.in);
    for (double& w : layer.weights) w = rng.uniform(-r, r);
    layer.biases.assign(layer.out, 0.0);
  }
  return net;
}

std::vector<double> forward(const Network& net, std::span<const double> x,
                            ForwardCache* cache) {
  if (x.size() != net.input_dim())
    fail(Errc::dimension_mismatch,
         "input has dimension " + std::to_string(x.size()) + ", expected " +
             std::to_string(net.input_dim()));
  if (cache) {
    cache->activations.resize(net.layers.size() + 1);
    cache->activations[0].assign(x.begin(), x.end());
  }
  std::vector<double> current(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t j = 0; j < net.layers.size(); ++j) {
    const Layer& layer = net.layers[j];
    next.resize(layer.out);
    for (std::size_t m = 0; m < layer.out; ++m) {
      double acc = layer.biases[m];
      const double* row = layer.weights.data() + m * layer.in;
      for (std::size_t n = 0; n < layer.in; ++n) acc += row[n] * current[n];
      next[m] = activate(layer.activation, acc);
    }
    current.swap(next);
    if (cache) cache->activations[j + 1] = current;
  }
  return current;
}

Gradients compute_gradients(const Network& net,
                            std::span<const TrainSample> batch) {
  Gradients grads;
  grads.weights.resize(net.layers.size());
  grads.biases.resize(net.layers.size());
  for (std::size_t j = 0; j < net.layers.size(); ++j) {
    grads.weights[j].assign(net.layers[j].weights.size(), 0.0);
    grads.biases[j].assign(net.layers[j].biases.size(), 0.0);
  }
  if (batch.empty()) return grads;

  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  ForwardCache cache;
  std::vector<double> delta, prev_delta;
  for (const TrainSample& sample : batch) {
    if (sample.target.size() != net.output_dim())
      fail(Errc::dimension_mismatch, "target dimension mismatch");
    std::vector<double> y = forward(net, sample.input, &cache);

    delta.resize(net.output_dim());
    for (std::size_t k = 0; k < y.size(); ++k) {
      double err = y[k] - sample.target[k];
      grads.loss += err * err * inv_batch;
      delta[k] = 2.0 * err * inv_batch *
                 activate_deriv(net.layers.back().activation, y[k]);
    }

    for (std::size_t j = net.layers.size(); j-- > 0;) {
      const Layer& layer = net.layers[j];
      const auto& input = cache.activations[j];
      auto& wgrad = grads.weights[j];
      auto& bgrad = grads.biases[j];
      for (std::size_t m = 0; m < layer.out; ++m) {
        double d = delta[m];
        bgrad[m] += d;
        double* wrow = wgrad.data() + m * layer.in;
        for (std::size_t n = 0; n < layer.in; ++n) wrow[n] += d * input[n];
      }
      if (j == 0) break;
      prev_delta.assign(layer.in, 0.0);
      for (std::size_t m = 0; m < layer.out; ++m) {
        double d = delta[m];
        const double* wrow = layer.weights.data() + m * layer.in;
        for (std::size_t n = 0; n < layer.in; ++n) prev_delta[n] += wrow[n] * d;
      }
      const auto& below = cache.activations[j];
      for (std::size_t n = 0; n < layer.in; ++n)
        prev_delta[n] *= activate_deriv(net.layers[j - 1].activation, below[n]);
      delta.swap(prev_delta);
    }
  }
  return grads;
}

double train_step(Network& net, std::span<const TrainSample> batch, double lr) {
  Gradients grads = compute_gradients(net, batch);
  if (!std::isfinite(grads.loss))
    fail(Errc::non_finite_loss, "training loss is not finite");
  for (std::size_t j = 0; j < net.layers.size(); ++j) {
    Layer& layer = net.layers[j];
    const auto& wgrad = grads.weights[j];
    const auto& bgrad = grads.biases[j];
    for (std::size_t i = 0; i < layer.weights.size(); ++i)
      layer.weights[i] -= lr * wgrad[i];
    for (std::size_t i = 0; i < layer.biases.size(); ++i)
      layer.biases[i] -= lr * bgrad[i];
  }
  return grads.loss;
}

double train_step_momentum(Network& net, std::span<const TrainSample> batch,
                           double lr, double momentum, MomentumState& state) {
  Gradients grads = compute_gradients(net, batch);
  if (!std::isfinite(grads.loss))
    fail(Errc::non_finite_loss, "training loss is not finite");
  if (!state.initialized()) {
    state.weight_velocity.resize(net.layers.size());
    state.bias_velocity.resize(net.layers.size());
    for (std::size_t j = 0; j < net.layers.size(); ++j) {
      state.weight_velocity[j].assign(net.layers[j].weights.size(), 0.0);
      state.bias_velocity[j].assign(net.layers[j].biases.size(), 0.0);
    }
  }
  for (std::size_t j = 0; j < net.layers.size(); ++j) {
    Layer& layer = net.layers[j];
    auto& wvel = state.weight_velocity[j];
    auto& bvel = state.bias_velocity[j];
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      wvel[i] = momentum * wvel[i] - lr * grads.weights[j][i];
      layer.weights[i] += wvel[i];
    }
    for (std::size_t i = 0; i < layer.biases.size(); ++i) {
      bvel[i] = momentum * bvel[i] - lr * grads.biases[j][i];
      layer.biases[i] += bvel[i];
    }
  }
  return grads.loss;
}

namespace {

double sample_loss(const Network& net, const TrainSample& sample) {
  std::vector<double> y = forward(net, sample.input);
  double loss = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    double err = y[k] - sample.target[k];
    loss += err * err;
  }
  return loss;
}

}  // namespace

double gradient_check(const Network& net, const TrainSample& sample,
                      double epsilon) {
  TrainSample batch[] = {sample};
  Gradients analytic = compute_gradients(net, batch);

  Network probe = net;
  double max_rel_err = 0.0;
  auto check_param = [&](double& param, double agrad) {
    double saved = param;
    param = saved + epsilon;
    double plus = sample_loss(probe, sample);
    param = saved - epsilon;
    double minus = sample_loss(probe, sample);
    param = saved;
    double ngrad = (plus - minus) / (2.0 * epsilon);
    double denom = std::max({std::fabs(agrad), std::fabs(ngrad), 1e-12});
    max_rel_err = std::max(max_rel_err, std::fabs(agrad - ngrad) / denom);
  };
  for (std::size_t j = 0; j < probe.layers.size(); ++j) {
    Layer& layer = probe.layers[j];
    for (std::size_t i = 0; i < layer.weights.size(); ++i)
      check_param(layer.weights[i], analytic.weights[j][i]);
    for (std::size_t i = 0; i < layer.biases.size(); ++i)
      check_param(layer.biases[i], analytic.biases[j][i]);
  }
  return max_rel_err;
}

}  // namespace neuridx
