#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "piglet/rng.hpp"

namespace piglet::nn {

using Shape = std::vector<int>;

int numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Row-major 32-bit tensor. Gradients live next to the parameters inside the
// layers, not here; this is the activation/value container.
struct Tensor {
  Shape shape;
  std::vector<float> values;

  Tensor() = default;
  explicit Tensor(Shape s) : shape(std::move(s)), values(numel(shape), 0.0f) {}
  Tensor(Shape s, std::vector<float> v);

  int size() const { return static_cast<int>(values.size()); }
  float& operator[](std::size_t i) { return values[i]; }
  float operator[](std::size_t i) const { return values[i]; }
};

enum class LayerKind : std::uint8_t {
  Dense = 0,
  Conv1D = 1,
  Conv2D = 2,
  MaxPool2D = 3,
  PReLU = 4,
  Flatten = 5,
};

const char* layer_kind_name(LayerKind kind);

// One parameter array of a layer (weights, bias or PReLU slopes).
struct ParamRef {
  int layer = 0;
  std::string name;
  std::vector<float>* values = nullptr;
  std::vector<float>* grads = nullptr;
};

// Sequential layer. forward()/backward() cache activations for training and
// are single-writer; predict-style calls go through forward_const which
// touches no shared state.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual LayerKind kind() const = 0;
  virtual Shape output_shape(const Shape& in) const = 0;

  // Fixes the input shape; must be called (via Network::bind) before use.
  virtual void bind(const Shape& in);

  virtual void forward(const float* in, float* out) = 0;
  virtual void backward(const float* grad_out, float* grad_in) = 0;
  virtual void forward_const(const float* in, float* out) const = 0;

  // fp64 shadow of forward_const for the finite-difference oracle; `params`
  // points at this layer's parameter arrays packed in declaration order.
  virtual void forward_fp64(const double* in, double* out, const double* params) const = 0;

  // Shadow forward with the nonlinearity routing (pool argmax, PReLU sign
  // mask) pinned from the last training forward. The finite-difference
  // oracle uses this so that a routing switch inside the +-h interval cannot
  // contaminate the quotient; layers without routing fall through to
  // forward_fp64.
  virtual void forward_fp64_pinned(const double* in, double* out,
                                   const double* params) const {
    forward_fp64(in, out, params);
  }

  virtual int n_arrays() const { return 0; }
  virtual std::vector<float>& array_values(int i);
  virtual std::vector<float>& array_grads(int i);
  virtual std::string array_name(int i) const;

  // Dims recorded in the weights file; empty for parameterless layers.
  virtual Shape serial_dims() const { return {}; }

  // Glorot-uniform weights, zero biases, PReLU slopes back to 0.25.
  virtual void init_params(Rng&) {}

  const Shape& in_shape() const { return in_shape_; }
  const Shape& out_shape() const { return out_shape_; }

 protected:
  Shape in_shape_;
  Shape out_shape_;
  std::vector<float> cached_input_;
};

std::unique_ptr<Layer> make_dense(int in_features, int out_features);
std::unique_ptr<Layer> make_conv1d(int in_channels, int out_channels, int kernel);
std::unique_ptr<Layer> make_conv2d(int in_channels, int out_channels, int kernel);
std::unique_ptr<Layer> make_maxpool2d();  // fixed 2x2, stride 2
std::unique_ptr<Layer> make_prelu(int channels, float slope = 0.25f);
std::unique_ptr<Layer> make_flatten();

class Network {
 public:
  Network() = default;
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  Network& add(std::unique_ptr<Layer> layer);

  // Composes and validates all layer shapes for the given input shape.
  void bind(const Shape& input_shape);
  bool bound() const { return bound_; }
  const Shape& input_shape() const;
  const Shape& output_shape() const;

  // Training-path forward: caches activations for backward.
  Tensor forward(const Tensor& input);
  // Reverse-mode gradients for all parameters; returns dL/dinput.
  Tensor backward(const Tensor& loss_grad);
  // Stateless forward for concurrent readers of frozen weights.
  Tensor predict(const Tensor& input) const;

  void zero_grads();
  void init_params(std::uint64_t seed);

  std::vector<ParamRef> params();
  std::size_t param_count() const;
  int n_layers() const { return static_cast<int>(layers_.size()); }
  Layer& layer(int i) { return *layers_[i]; }
  const Layer& layer(int i) const { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<std::vector<float>> activations_;  // output of each layer
  std::vector<std::vector<float>> grad_bufs_;
  Shape input_shape_;
  bool bound_ = false;
  bool have_forward_ = false;
};

// MSE loss with double accumulation: loss = mean((pred-target)^2),
// grad = 2 (pred-target) / N.
struct LossResult {
  double loss = 0.0;
  Tensor grad;
};
LossResult mse_loss(const Tensor& pred, const Tensor& target);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a network's parameters. Throws on non-finite
// gradients (training divergence).
class Adam {
 public:
  Adam(Network& network, AdamConfig config);
  void step();
  int step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  Network* network_;
  AdamConfig config_;
  std::vector<std::vector<float>> m_;
  std::vector<std::vector<float>> v_;
  int step_ = 0;
};

// Central-difference gradient verification on an fp64 shadow of the whole
// network (h = 1e-3). Relative error uses max(|analytic|, |fd|, 1e-3) as
// the scale so near-zero gradients do not blow up the ratio.
struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  int n_params = 0;
  bool pass = false;
};
GradCheckReport gradient_check(Network& network, const Tensor& input,
                               const Tensor& target, double tolerance = 1e-4);

// Weights file: magic "PGNN", version u32, layer count u32; per layer a
// kind byte, a rank byte, u32 dims, then the little-endian f32 parameter
// arrays. Bit-exact round trip.
void save_weights(const Network& network, const std::string& path);
Network load_weights(const std::string& path);
// Loads into an existing architecture, validating kinds and dims.
void load_into(Network& network, const std::string& path);

}  // namespace piglet::nn
