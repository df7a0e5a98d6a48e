#include <doctest.h>

#include <cmath>

#include "neuridx/error.hpp"
#include "neuridx/neural.hpp"
#include "neuridx/rng.hpp"

using namespace neuridx;

namespace {

NetworkConfig make_config(std::vector<std::size_t> sizes, std::uint64_t seed,
                          Activation hidden = Activation::Tanh,
                          Activation output = Activation::Identity) {
  NetworkConfig config;
  config.layer_sizes = std::move(sizes);
  config.hidden_activation = hidden;
  config.output_activation = output;
  config.seed = seed;
  return config;
}

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

TEST_CASE("init_network is deterministic and shape-correct") {
  NetworkConfig config = make_config({3, 2, 2}, 99);
  Network a = init_network(config);
  Network b = init_network(config);
  REQUIRE(a.layers.size() == 2);
  CHECK(a.layers[0].in == 3);
  CHECK(a.layers[0].out == 2);
  CHECK(a.layers[0].weights.size() == 6);
  CHECK(a.layers[0].biases.size() == 2);
  CHECK(a.layers[1].in == 2);
  CHECK(a.layers[1].out == 2);
  CHECK(a.layers[0].weights == b.layers[0].weights);
  CHECK(a.layers[1].weights == b.layers[1].weights);
  for (double bias : a.layers[0].biases) CHECK(bias == 0.0);

  double r = std::sqrt(6.0 / (3 + 2));
  for (double w : a.layers[0].weights) {
    CHECK(w > -r);
    CHECK(w < r);
  }
}

TEST_CASE("init_network rejects non-feedforward connection offsets") {
  NetworkConfig config = make_config({3, 2}, 0);
  config.connection_offset = 2;
  try {
    init_network(config);
    FAIL("expected invalid_config");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_config);
  }
  config.connection_offset = 1;
  config.layer_sizes = {3};
  CHECK_THROWS_AS(init_network(config), Error);
  config.layer_sizes = {3, 0};
  CHECK_THROWS_AS(init_network(config), Error);
}

TEST_CASE("forward of the zero network is zero") {
  NetworkConfig config = make_config({3, 2, 2}, 1, Activation::Identity);
  Network net = init_network(config);
  for (auto& layer : net.layers) {
    for (double& w : layer.weights) w = 0.0;
  }
  std::vector<double> x{0.3, -0.7, 2.0};
  for (double y : forward(net, x)) CHECK(y == 0.0);
}

TEST_CASE("single identity layer passes the input through") {
  NetworkConfig config = make_config({3, 3}, 1);
  Network net = init_network(config);
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t n = 0; n < 3; ++n)
      net.layers[0].weights[m * 3 + n] = m == n ? 1.0 : 0.0;
  std::vector<double> x{0.25, -1.5, 3.0};
  CHECK(forward(net, x) == x);
}

TEST_CASE("single neuron computes the affine form") {
  NetworkConfig config = make_config({2, 1}, 1);
  Network net = init_network(config);
  net.layers[0].weights = {1.0, 2.0};
  net.layers[0].biases = {0.5};
  std::vector<double> x{1.0, 1.0};
  CHECK(forward(net, x)[0] == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("forward rejects dimension mismatches") {
  Network net = init_network(make_config({3, 2}, 1));
  std::vector<double> x{1.0, 2.0};
  CHECK_THROWS_AS(forward(net, x), Error);
}

TEST_CASE("single-layer identity network equals direct matrix arithmetic") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t in = 1 + rng.next_index(6);
    std::size_t out = 1 + rng.next_index(6);
    Network net = init_network(make_config({in, out}, rng.next_u64()));
    for (double& b : net.layers[0].biases) b = rng.uniform(-1.0, 1.0);
    std::vector<double> x = random_vector(rng, in);

    std::vector<double> y = forward(net, x);
    for (std::size_t m = 0; m < out; ++m) {
      double acc = net.layers[0].biases[m];
      for (std::size_t n = 0; n < in; ++n)
        acc += net.layers[0].weights[m * in + n] * x[n];
      CHECK(y[m] == acc);
    }
  }
}

TEST_CASE("train_step at a zero-gradient fixed point changes nothing") {
  Network net = init_network(make_config({2, 3, 2}, 5));
  std::vector<double> x{0.5, -0.25};
  std::vector<double> y = forward(net, x);
  std::vector<TrainSample> batch{{x, y}};
  Network before = net;
  double loss = train_step(net, batch, 0.1);
  CHECK(loss == 0.0);
  for (std::size_t j = 0; j < net.layers.size(); ++j) {
    CHECK(net.layers[j].weights == before.layers[j].weights);
    CHECK(net.layers[j].biases == before.layers[j].biases);
  }
}

TEST_CASE("train_step applies the hand-computed gradient") {
  // Single linear neuron w=0, b=0, sample x=1 -> t=1:
  // loss = 1, dL/dw = dL/db = -2, so lr 0.1 gives w = b = 0.2.
  Network net = init_network(make_config({1, 1}, 0));
  net.layers[0].weights = {0.0};
  std::vector<TrainSample> batch{{{1.0}, {1.0}}};
  double loss = train_step(net, batch, 0.1);
  CHECK(loss == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(net.layers[0].weights[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(net.layers[0].biases[0] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("train_step with zero learning rate reports loss only") {
  Network net = init_network(make_config({2, 2}, 9));
  std::vector<TrainSample> batch{{{1.0, 0.0}, {0.5, 0.5}}};
  Network before = net;
  double loss = train_step(net, batch, 0.0);
  CHECK(loss > 0.0);
  CHECK(net.layers[0].weights == before.layers[0].weights);
}

TEST_CASE("train_step rejects inconsistent targets") {
  Network net = init_network(make_config({2, 2}, 9));
  std::vector<TrainSample> batch{{{1.0, 0.0}, {0.5}}};
  CHECK_THROWS_AS(train_step(net, batch, 0.1), Error);
}

TEST_CASE("gradient check on a fresh tanh network") {
  Network net = init_network(make_config({4, 6, 2}, 77));
  Rng rng(78);
  TrainSample sample{random_vector(rng, 4), random_vector(rng, 2)};
  CHECK(gradient_check(net, sample) < 1e-4);
}

TEST_CASE("gradient check on an exactly linear network is tight") {
  Network net = init_network(make_config({3, 2}, 31));
  Rng rng(32);
  TrainSample sample{random_vector(rng, 3), random_vector(rng, 2)};
  CHECK(gradient_check(net, sample) < 1e-7);
}

TEST_CASE("gradient check survives the zero-gradient case") {
  // Targets equal to outputs: the analytic gradient is exactly zero and
  // the numeric one only curvature noise, so the 1e-12 floor must keep the
  // ratio finite rather than dividing by zero.
  Network net = init_network(make_config({2, 2, 2}, 15));
  std::vector<double> x{0.1, -0.2};
  TrainSample sample{x, forward(net, x)};
  TrainSample batch[] = {sample};
  Gradients analytic = compute_gradients(net, batch);
  CHECK(analytic.loss == 0.0);
  for (const auto& layer : analytic.weights)
    for (double g : layer) CHECK(g == 0.0);
  double err = gradient_check(net, sample);
  CHECK(std::isfinite(err));
}

TEST_CASE("backprop matches finite differences on random networks") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t in = 1 + rng.next_index(5);
    std::size_t out = 1 + rng.next_index(3);
    std::vector<std::size_t> sizes{in};
    std::size_t hidden_layers = rng.next_index(3);
    for (std::size_t h = 0; h < hidden_layers; ++h)
      sizes.push_back(1 + rng.next_index(8));
    sizes.push_back(out);
    Activation hidden = trial % 2 == 0 ? Activation::Tanh : Activation::Logistic;
    Activation output = trial % 3 == 0 ? Activation::Tanh : Activation::Identity;
    Network net = init_network(make_config(sizes, rng.next_u64(), hidden, output));
    TrainSample sample{random_vector(rng, in), random_vector(rng, out)};
    double err = gradient_check(net, sample);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("small-step descent never increases loss on a linear network") {
  Rng rng(4321);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t in = 1 + rng.next_index(8);
    std::size_t out = 1 + rng.next_index(4);
    Network net = init_network(
        make_config({in, out}, rng.next_u64(), Activation::Identity));
    std::vector<TrainSample> batch;
    for (std::size_t s = 0; s < 1 + rng.next_index(6); ++s)
      batch.push_back({random_vector(rng, in), random_vector(rng, out)});
    double before = train_step(net, batch, 1e-3);
    double after = compute_gradients(net, batch).loss;
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("identical seeds and batches give bitwise-identical weights") {
  auto run = [] {
    Network net = init_network(make_config({3, 4, 2}, 2024));
    Rng rng(777);
    std::vector<TrainSample> batch;
    for (int s = 0; s < 5; ++s)
      batch.push_back({random_vector(rng, 3), random_vector(rng, 2)});
    for (int epoch = 0; epoch < 50; ++epoch) train_step(net, batch, 0.05);
    return net;
  };
  Network a = run();
  Network b = run();
  for (std::size_t j = 0; j < a.layers.size(); ++j) {
    CHECK(a.layers[j].weights == b.layers[j].weights);
    CHECK(a.layers[j].biases == b.layers[j].biases);
  }
}
