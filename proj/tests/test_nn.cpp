#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "piglet/nn.hpp"
#include "piglet/rng.hpp"

using namespace piglet;
using namespace piglet::nn;

namespace {

// Random values with a margin away from zero so PReLU kinks and pooling ties
// cannot sit inside the finite-difference step.
Tensor margin_random(Shape shape, std::uint64_t seed, double lo = 0.1, double hi = 1.0) {
  Rng rng(seed);
  Tensor t(std::move(shape));
  for (auto& v : t.values) {
    const double mag = rng.uniform(lo, hi);
    v = static_cast<float>(rng.uniform() < 0.5 ? -mag : mag);
  }
  return t;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

// Dense layer whose backward scales every weight gradient, for checking that
// gradient_check actually detects broken backprop.
class CorruptDense final : public Layer {
 public:
  CorruptDense(int n_in, int n_out) : inner_(make_dense(n_in, n_out)) {}
  LayerKind kind() const override { return inner_->kind(); }
  Shape output_shape(const Shape& in) const override { return inner_->output_shape(in); }
  void bind(const Shape& in) override {
    Layer::bind(in);
    inner_->bind(in);
  }
  void forward(const float* in, float* out) override { inner_->forward(in, out); }
  void forward_const(const float* in, float* out) const override {
    inner_->forward_const(in, out);
  }
  void forward_fp64(const double* in, double* out, const double* params) const override {
    inner_->forward_fp64(in, out, params);
  }
  void backward(const float* grad_out, float* grad_in) override {
    inner_->backward(grad_out, grad_in);
    for (auto& g : inner_->array_grads(0)) g *= 1.5f;
  }
  int n_arrays() const override { return inner_->n_arrays(); }
  std::vector<float>& array_values(int i) override { return inner_->array_values(i); }
  std::vector<float>& array_grads(int i) override { return inner_->array_grads(i); }
  std::string array_name(int i) const override { return inner_->array_name(i); }
  Shape serial_dims() const override { return inner_->serial_dims(); }
  void init_params(Rng& rng) override { inner_->init_params(rng); }

 private:
  std::unique_ptr<Layer> inner_;
};

}  // namespace

TEST_CASE("dense identity forward") {
  Network net;
  net.add(make_dense(3, 3));
  net.bind({3});
  auto params = net.params();
  // W = I, b = 0.
  (*params[0].values)[0] = 1.0f;
  (*params[0].values)[4] = 1.0f;
  (*params[0].values)[8] = 1.0f;
  const Tensor x({3}, {0.5f, -1.25f, 2.0f});
  const Tensor y = net.forward(x);
  CHECK(y.values == x.values);
}

TEST_CASE("prelu definition") {
  Network net;
  net.add(make_prelu(2));
  net.bind({2});
  const Tensor y = net.forward(Tensor({2}, {-2.0f, 3.0f}));
  CHECK(y[0] == doctest::Approx(-0.5));
  CHECK(y[1] == doctest::Approx(3.0));
}

TEST_CASE("conv2d all-ones kernel on a one-hot image") {
  Network net;
  net.add(make_conv2d(1, 1, 3));
  net.bind({1, 6, 6});
  auto params = net.params();
  std::fill(params[0].values->begin(), params[0].values->end(), 1.0f);
  Tensor x({1, 6, 6});
  x.values[2 * 6 + 3] = 1.0f;  // hot at row 2, col 3
  const Tensor y = net.forward(x);
  // Valid cross-correlation: a 3x3 plateau of ones where the kernel overlaps
  // the hot pixel; output is 4x4.
  REQUIRE(y.shape == Shape{1, 4, 4});
  int ones = 0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const float v = y.values[r * 4 + c];
      if (r >= 0 && r <= 2 && c >= 1 && c <= 3) {
        CHECK(v == doctest::Approx(1.0));
        ++ones;
      } else {
        CHECK(v == doctest::Approx(0.0));
      }
    }
  CHECK(ones == 9);
}

TEST_CASE("dense backward against the hand derivation") {
  // L = sum(y) => dL/dW = outer(1, x), dL/db = 1.
  Network net;
  net.add(make_dense(3, 2));
  net.bind({3});
  net.init_params(1);
  const Tensor x({3}, {0.3f, -0.7f, 1.1f});
  net.zero_grads();
  net.forward(x);
  net.backward(Tensor({2}, {1.0f, 1.0f}));
  auto params = net.params();
  const auto& gw = *params[0].grads;
  const auto& gb = *params[1].grads;
  for (int o = 0; o < 2; ++o) {
    CHECK(gb[o] == doctest::Approx(1.0));
    CHECK(gw[o * 3 + 0] == doctest::Approx(0.3));
    CHECK(gw[o * 3 + 1] == doctest::Approx(-0.7));
    CHECK(gw[o * 3 + 2] == doctest::Approx(1.1));
  }
}

TEST_CASE("prelu slope gradient is zero for non-negative inputs") {
  Network net;
  net.add(make_prelu(3));
  net.bind({3});
  net.zero_grads();
  net.forward(Tensor({3}, {0.5f, 0.0f, 2.0f}));
  net.backward(Tensor({3}, {1.0f, 1.0f, 1.0f}));
  for (float g : *net.params()[0].grads) CHECK(g == 0.0f);
}

TEST_CASE("backward without forward is rejected") {
  Network net;
  net.add(make_dense(2, 2));
  net.bind({2});
  CHECK_THROWS_AS(net.backward(Tensor({2})), std::logic_error);
}

TEST_CASE("finite differences agree for every layer kind") {
  struct Case {
    const char* name;
    Network net;
    Shape in;
  };
  std::vector<Case> cases;
  {
    Case c{"dense", {}, {7}};
    c.net.add(make_dense(7, 4));
    cases.push_back(std::move(c));
  }
  {
    Case c{"conv1d", {}, {3, 9}};
    c.net.add(make_conv1d(3, 4, 3));
    cases.push_back(std::move(c));
  }
  {
    Case c{"conv2d", {}, {2, 6, 7}};
    c.net.add(make_conv2d(2, 3, 3));
    cases.push_back(std::move(c));
  }
  {
    // Pooling has no parameters; check it through a surrounding conv+dense.
    Case c{"conv2d+pool+dense", {}, {1, 6, 6}};
    c.net.add(make_conv2d(1, 2, 3));
    c.net.add(make_maxpool2d());
    c.net.add(make_flatten());
    c.net.add(make_dense(8, 3));
    cases.push_back(std::move(c));
  }
  {
    Case c{"prelu", {}, {4, 5}};
    c.net.add(make_conv1d(4, 4, 2));
    c.net.add(make_prelu(4));
    cases.push_back(std::move(c));
  }

  for (auto& c : cases) {
    CAPTURE(c.name);
    c.net.bind(c.in);
    c.net.init_params(99);
    const Tensor input = margin_random(c.in, 7);
    const Tensor target = margin_random(c.net.output_shape(), 8);
    const auto report = gradient_check(c.net, input, target, 1e-4);
    CAPTURE(report.worst_param);
    CHECK(report.max_rel_error < 1e-4);
    CHECK(report.pass);
  }
}

TEST_CASE("gradient_check flags a corrupted backward") {
  Network net;
  net.add(std::make_unique<CorruptDense>(5, 3));
  net.bind({5});
  net.init_params(3);
  const auto report = gradient_check(net, margin_random({5}, 1), margin_random({3}, 2));
  CHECK_FALSE(report.pass);
  CHECK(report.max_rel_error > 1e-2);
}

TEST_CASE("gradient_check trivially passes without parameters") {
  Network net;
  net.add(make_flatten());
  net.bind({2, 3});
  const auto report = gradient_check(net, margin_random({2, 3}, 4), margin_random({6}, 5));
  CHECK(report.pass);
  CHECK(report.n_params == 0);
}

TEST_CASE("mse loss examples") {
  const auto zero = mse_loss(Tensor({2}, {1.0f, 2.0f}), Tensor({2}, {1.0f, 2.0f}));
  CHECK(zero.loss == doctest::Approx(0.0));
  CHECK(zero.grad.values[0] == 0.0f);

  const auto r = mse_loss(Tensor({2}, {1.0f, 2.0f}), Tensor({2}, {0.0f, 0.0f}));
  CHECK(r.loss == doctest::Approx(2.5));
  CHECK(r.grad.values[0] == doctest::Approx(1.0));
  CHECK(r.grad.values[1] == doctest::Approx(2.0));

  CHECK_THROWS_AS(mse_loss(Tensor({2}), Tensor({3})), std::invalid_argument);

  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    Tensor a({4}), b({4});
    for (int j = 0; j < 4; ++j) {
      a.values[j] = static_cast<float>(rng.normal());
      b.values[j] = static_cast<float>(rng.normal());
    }
    CHECK(mse_loss(a, b).loss >= 0.0);
  }
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Network net;
  net.add(make_dense(4, 2));
  net.bind({4});
  net.init_params(12);
  const auto before = *net.params()[0].values;
  Adam adam(net, {});
  net.zero_grads();
  adam.step();
  CHECK(*net.params()[0].values == before);
}

TEST_CASE("adam: first step with unit gradient moves by about -lr") {
  Network net;
  net.add(make_dense(1, 1));
  net.bind({1});
  auto params = net.params();
  (*params[0].values)[0] = 0.5f;
  AdamConfig config;
  CHECK(config.lr == doctest::Approx(1e-4));  // default per the training recipe
  Adam adam(net, config);
  net.zero_grads();
  (*params[0].grads)[0] = 1.0f;
  (*params[1].grads)[0] = 0.0f;
  adam.step();
  // Bias-corrected m_hat = 1, v_hat = 1 => step = lr/(1+eps).
  CHECK((*params[0].values)[0] == doctest::Approx(0.5 - 1e-4).epsilon(1e-6));
}

TEST_CASE("adam rejects non-finite gradients") {
  Network net;
  net.add(make_dense(1, 1));
  net.bind({1});
  Adam adam(net, {});
  (*net.params()[0].grads)[0] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(adam.step(), std::runtime_error);
}

TEST_CASE("forward is deterministic bit for bit") {
  Network net;
  net.add(make_conv2d(2, 4, 3));
  net.add(make_prelu(4));
  net.add(make_maxpool2d());
  net.add(make_flatten());
  net.add(make_dense(4 * 2 * 2, 3));
  net.bind({2, 7, 7});
  net.init_params(5);
  const Tensor x = margin_random({2, 7, 7}, 9);
  const Tensor a = net.forward(x);
  const Tensor b = net.forward(x);
  const Tensor c = net.predict(x);
  CHECK(a.values == b.values);
  CHECK(a.values == c.values);
}

TEST_CASE("maxpool matches a brute-force nested-loop max") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int c = static_cast<int>(rng.uniform_int(1, 3));
    const int h = static_cast<int>(rng.uniform_int(2, 9));
    const int w = static_cast<int>(rng.uniform_int(2, 9));
    Network net;
    net.add(make_maxpool2d());
    net.bind({c, h, w});
    Tensor x({c, h, w});
    for (auto& v : x.values) v = static_cast<float>(rng.normal());
    const Tensor y = net.forward(x);
    const int oh = h / 2, ow = w / 2;
    for (int ch = 0; ch < c; ++ch)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          float best = -1e30f;
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx)
              best = std::max(best, x.values[(ch * h + 2 * oy + dy) * w + 2 * ox + dx]);
          CHECK(y.values[(ch * oh + oy) * ow + ox] == best);
        }
  }
}

TEST_CASE("one small-step update decreases the loss on the same batch") {
  Network net;
  net.add(make_dense(6, 8));
  net.add(make_prelu(8));
  net.add(make_dense(8, 2));
  net.bind({6});
  net.init_params(21);
  const Tensor x = margin_random({6}, 22);
  const Tensor target = margin_random({2}, 23);

  AdamConfig config;
  config.lr = 1e-5;
  Adam adam(net, config);
  const double loss0 = mse_loss(net.forward(x), target).loss;
  net.zero_grads();
  const auto r = mse_loss(net.forward(x), target);
  net.backward(r.grad);
  adam.step();
  const double loss1 = mse_loss(net.forward(x), target).loss;
  CHECK(loss1 < loss0);
}

TEST_CASE("weights round trip bitwise") {
  Network net;
  net.add(make_conv2d(4, 6, 3));
  net.add(make_prelu(6));
  net.add(make_maxpool2d());
  net.add(make_flatten());
  net.add(make_dense(6 * 2 * 3, 5));
  net.bind({4, 7, 8});
  net.init_params(31);

  const std::string path_a = temp_path("piglet_nn_roundtrip_a.pgnn");
  const std::string path_b = temp_path("piglet_nn_roundtrip_b.pgnn");
  save_weights(net, path_a);
  Network loaded = load_weights(path_a);
  loaded.bind({4, 7, 8});

  for (int i = 0; i < net.n_layers(); ++i) {
    CHECK(loaded.layer(i).kind() == net.layer(i).kind());
    for (int j = 0; j < net.layer(i).n_arrays(); ++j)
      CHECK(loaded.layer(i).array_values(j) == net.layer(i).array_values(j));
  }

  // save -> load -> save must reproduce the file byte for byte.
  save_weights(loaded, path_b);
  std::ifstream fa(path_a, std::ios::binary), fb(path_b, std::ios::binary);
  const std::string bytes_a((std::istreambuf_iterator<char>(fa)), {});
  const std::string bytes_b((std::istreambuf_iterator<char>(fb)), {});
  CHECK(bytes_a == bytes_b);
  CHECK(!bytes_a.empty());
  std::filesystem::remove(path_a);
  std::filesystem::remove(path_b);
}

TEST_CASE("load_into validates the architecture") {
  Network net;
  net.add(make_dense(4, 3));
  net.bind({4});
  net.init_params(41);
  const std::string path = temp_path("piglet_nn_arch.pgnn");
  save_weights(net, path);

  Network other;
  other.add(make_dense(5, 3));
  CHECK_THROWS_WITH_AS(load_into(other, path), doctest::Contains("shape mismatch"),
                       std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt weight files are rejected with the documented errors") {
  Network net;
  net.add(make_dense(4, 3));
  net.add(make_prelu(3));
  net.bind({4});
  net.init_params(51);
  const std::string path = temp_path("piglet_nn_corrupt.pgnn");
  save_weights(net, path);

  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  in.close();

  SUBCASE("bad magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    std::ofstream(path, std::ios::binary).write(bad.data(), bad.size());
    CHECK_THROWS_WITH_AS(load_weights(path), doctest::Contains("bad magic"),
                         std::runtime_error);
  }
  SUBCASE("truncation names the layer") {
    // Cut inside the second layer's slope parameters.
    const std::string cut = bytes.substr(0, bytes.size() - 6);
    std::ofstream(path, std::ios::binary).write(cut.data(), cut.size());
    CHECK_THROWS_WITH_AS(load_weights(path), doctest::Contains("layer 1"),
                         std::runtime_error);
  }
  SUBCASE("trailing bytes are rejected") {
    std::string padded = bytes + "zz";
    std::ofstream(path, std::ios::binary).write(padded.data(), padded.size());
    CHECK_THROWS_WITH_AS(load_weights(path), doctest::Contains("trailing"),
                         std::runtime_error);
  }
  std::filesystem::remove(path);
}
