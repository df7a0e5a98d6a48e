#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace neuridx {

enum class Activation { Tanh, Logistic, Identity };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct NetworkConfig {
  std::vector<std::size_t> layer_sizes;  // [N0, N1, ..., NJ]
  Activation hidden_activation = Activation::Tanh;
  Activation output_activation = Activation::Identity;
  int connection_offset = 1;  // s; only s=1 (feedforward) is supported
  std::uint64_t seed = 0;
};

struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // row-major, out x in
  std::vector<double> biases;   // out
  Activation activation = Activation::Identity;
};

struct Network {
  NetworkConfig config;
  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.front().in; }
  std::size_t output_dim() const { return layers.back().out; }
  std::size_t parameter_count() const;
};

struct ForwardCache {
  // activations[0] is the input; activations[j] the output of layer j.
  std::vector<std::vector<double>> activations;
};

struct TrainSample {
  std::vector<double> input;
  std::vector<double> target;
};

struct Gradients {
  std::vector<std::vector<double>> weights;  // per layer, same shape as Layer
  std::vector<std::vector<double>> biases;
  double loss = 0.0;  // mean over batch of sum of squared output errors
};

/// Xavier-uniform weights, zero biases, deterministic per (config, seed).
Network init_network(const NetworkConfig& config);

std::vector<double> forward(const Network& net, std::span<const double> x,
                            ForwardCache* cache = nullptr);

Gradients compute_gradients(const Network& net,
                            std::span<const TrainSample> batch);

/// One full-batch gradient-descent step on MSE; returns the pre-update loss.
double train_step(Network& net, std::span<const TrainSample> batch, double lr);

/// Velocity buffers for momentum training; sized lazily on first use.
struct MomentumState {
  std::vector<std::vector<double>> weight_velocity;
  std::vector<std::vector<double>> bias_velocity;

  bool initialized() const { return !weight_velocity.empty(); }
};

/// Gradient-descent step with classical (heavy-ball) momentum:
/// v = momentum*v - lr*grad, theta += v. Returns the pre-update loss.
double train_step_momentum(Network& net, std::span<const TrainSample> batch,
                           double lr, double momentum, MomentumState& state);

/// Max relative error between backprop and central finite differences over
/// every parameter, on a single sample.
double gradient_check(const Network& net, const TrainSample& sample,
                      double epsilon = 1e-5);

}  // namespace neuridx
