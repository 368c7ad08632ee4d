#include <cmath>
#include <stdexcept>

#include "piglet/nn.hpp"

namespace piglet::nn {

Network& Network::add(std::unique_ptr<Layer> layer) {
  layers_.push_back(std::move(layer));
  bound_ = false;
  return *this;
}

void Network::bind(const Shape& input_shape) {
  if (layers_.empty()) throw std::logic_error("Network: no layers");
  Shape cur = input_shape;
  for (auto& layer : layers_) {
    layer->bind(cur);
    cur = layer->out_shape();
  }
  input_shape_ = input_shape;
  activations_.resize(layers_.size());
  grad_bufs_.resize(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    activations_[i].assign(numel(layers_[i]->out_shape()), 0.0f);
    grad_bufs_[i].assign(numel(layers_[i]->in_shape()), 0.0f);
  }
  bound_ = true;
  have_forward_ = false;
}

const Shape& Network::input_shape() const {
  if (!bound_) throw std::logic_error("Network: not bound");
  return input_shape_;
}

const Shape& Network::output_shape() const {
  if (!bound_) throw std::logic_error("Network: not bound");
  return layers_.back()->out_shape();
}

Tensor Network::forward(const Tensor& input) {
  if (!bound_ || input.shape != input_shape_) bind(input.shape);
  const float* cur = input.values.data();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->forward(cur, activations_[i].data());
    cur = activations_[i].data();
  }
  have_forward_ = true;
  return Tensor(layers_.back()->out_shape(), activations_.back());
}

Tensor Network::backward(const Tensor& loss_grad) {
  if (!have_forward_) throw std::logic_error("Network: backward without forward");
  if (loss_grad.shape != layers_.back()->out_shape())
    throw std::invalid_argument("Network: loss gradient shape mismatch");
  const float* cur = loss_grad.values.data();
  for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
    layers_[i]->backward(cur, grad_bufs_[i].data());
    cur = grad_bufs_[i].data();
  }
  return Tensor(input_shape_, grad_bufs_.front());
}

Tensor Network::predict(const Tensor& input) const {
  if (!bound_) throw std::logic_error("Network: predict before bind");
  if (input.shape != input_shape_)
    throw std::invalid_argument("Network: input shape " + shape_str(input.shape) +
                                " does not match bound shape " + shape_str(input_shape_));
  std::vector<float> a;
  std::vector<float> b(numel(layers_.front()->out_shape()));
  layers_.front()->forward_const(input.values.data(), b.data());
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    a.swap(b);
    b.assign(numel(layers_[i]->out_shape()), 0.0f);
    layers_[i]->forward_const(a.data(), b.data());
  }
  return Tensor(layers_.back()->out_shape(), std::move(b));
}

void Network::zero_grads() {
  for (auto& layer : layers_)
    for (int i = 0; i < layer->n_arrays(); ++i) {
      auto& g = layer->array_grads(i);
      std::fill(g.begin(), g.end(), 0.0f);
    }
}

void Network::init_params(std::uint64_t seed) {
  Rng rng(seed);
  for (auto& layer : layers_) layer->init_params(rng);
}

std::vector<ParamRef> Network::params() {
  std::vector<ParamRef> refs;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (int j = 0; j < layers_[i]->n_arrays(); ++j) {
      ParamRef ref;
      ref.layer = static_cast<int>(i);
      ref.name = std::string(layer_kind_name(layers_[i]->kind())) + "[" +
                 std::to_string(i) + "]." + layers_[i]->array_name(j);
      ref.values = &layers_[i]->array_values(j);
      ref.grads = &layers_[i]->array_grads(j);
      refs.push_back(ref);
    }
  }
  return refs;
}

std::size_t Network::param_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_)
    for (int j = 0; j < layer->n_arrays(); ++j)
      n += const_cast<Layer&>(*layer).array_values(j).size();
  return n;
}

LossResult mse_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape != target.shape)
    throw std::invalid_argument("mse_loss: shape mismatch " + shape_str(pred.shape) +
                                " vs " + shape_str(target.shape));
  const std::size_t n = pred.values.size();
  LossResult result;
  result.grad = Tensor(pred.shape);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(pred.values[i]) - target.values[i];
    acc += d * d;
    result.grad.values[i] = static_cast<float>(2.0 * d / static_cast<double>(n));
  }
  result.loss = acc / static_cast<double>(n);
  if (!std::isfinite(result.loss)) throw std::runtime_error("mse_loss: non-finite loss");
  return result;
}

Adam::Adam(Network& network, AdamConfig config) : network_(&network), config_(config) {
  for (auto& ref : network.params()) {
    m_.emplace_back(ref.values->size(), 0.0f);
    v_.emplace_back(ref.values->size(), 0.0f);
  }
}

void Adam::step() {
  ++step_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double corr1 = 1.0 - std::pow(b1, step_);
  const double corr2 = 1.0 - std::pow(b2, step_);
  auto refs = network_->params();
  if (refs.size() != m_.size()) throw std::logic_error("Adam: network changed shape");
  for (std::size_t p = 0; p < refs.size(); ++p) {
    auto& values = *refs[p].values;
    auto& grads = *refs[p].grads;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grads[i];
      if (!std::isfinite(g))
        throw std::runtime_error("Adam: non-finite gradient in " + refs[p].name);
      const double m = b1 * m_[p][i] + (1.0 - b1) * g;
      const double v = b2 * v_[p][i] + (1.0 - b2) * g * g;
      m_[p][i] = static_cast<float>(m);
      v_[p][i] = static_cast<float>(v);
      const double m_hat = m / corr1;
      const double v_hat = v / corr2;
      values[i] = static_cast<float>(values[i] - config_.lr * m_hat /
                                                     (std::sqrt(v_hat) + config_.eps));
    }
  }
}

}  // namespace piglet::nn
