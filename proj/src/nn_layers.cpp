#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "piglet/nn.hpp"

namespace piglet::nn {

int numel(const Shape& shape) {
  int n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("non-positive tensor dimension");
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Tensor::Tensor(Shape s, std::vector<float> v) : shape(std::move(s)), values(std::move(v)) {
  if (numel(shape) != static_cast<int>(values.size()))
    throw std::invalid_argument("tensor shape does not match value count");
}

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Dense: return "Dense";
    case LayerKind::Conv1D: return "Conv1D";
    case LayerKind::Conv2D: return "Conv2D";
    case LayerKind::MaxPool2D: return "MaxPool2D";
    case LayerKind::PReLU: return "PReLU";
    case LayerKind::Flatten: return "Flatten";
  }
  return "?";
}

void Layer::bind(const Shape& in) {
  out_shape_ = output_shape(in);  // validates
  in_shape_ = in;
}

std::vector<float>& Layer::array_values(int) { throw std::logic_error("layer has no parameters"); }
std::vector<float>& Layer::array_grads(int) { throw std::logic_error("layer has no parameters"); }
std::string Layer::array_name(int) const { return ""; }

namespace {

// ---------------------------------------------------------------------------
// Scalar-templated kernels shared by the f32 training path and the f64
// shadow path of the finite-difference oracle.
// ---------------------------------------------------------------------------

// Dot products use four independent accumulators: a fixed reassociation the
// compiler can vectorize without breaking bit-for-bit determinism.
template <typename T>
void dense_fwd(const T* in, T* out, const T* w, const T* b, int n_in, int n_out) {
  for (int o = 0; o < n_out; ++o) {
    const T* row = w + static_cast<std::size_t>(o) * n_in;
    T acc0 = 0, acc1 = 0, acc2 = 0, acc3 = 0;
    int i = 0;
    for (; i + 4 <= n_in; i += 4) {
      acc0 += row[i] * in[i];
      acc1 += row[i + 1] * in[i + 1];
      acc2 += row[i + 2] * in[i + 2];
      acc3 += row[i + 3] * in[i + 3];
    }
    for (; i < n_in; ++i) acc0 += row[i] * in[i];
    out[o] = b[o] + ((acc0 + acc1) + (acc2 + acc3));
  }
}

template <typename T>
void conv1d_fwd(const T* in, T* out, const T* w, const T* b, int ic, int len,
                int oc, int k) {
  const int out_len = len - k + 1;
  for (int o = 0; o < oc; ++o) {
    T* outp = out + static_cast<std::size_t>(o) * out_len;
    std::fill(outp, outp + out_len, b[o]);
    for (int i = 0; i < ic; ++i) {
      const T* inp = in + static_cast<std::size_t>(i) * len;
      const T* wp = w + (static_cast<std::size_t>(o) * ic + i) * k;
      for (int kk = 0; kk < k; ++kk) {
        const T wv = wp[kk];
        const T* irow = inp + kk;
        for (int x = 0; x < out_len; ++x) outp[x] += wv * irow[x];
      }
    }
  }
}

template <typename T>
void conv2d_fwd(const T* in, T* out, const T* w, const T* b, int ic, int ih,
                int iw, int oc, int k) {
  const int oh = ih - k + 1, ow = iw - k + 1;
  for (int o = 0; o < oc; ++o) {
    T* outp = out + static_cast<std::size_t>(o) * oh * ow;
    std::fill(outp, outp + oh * ow, b[o]);
    for (int i = 0; i < ic; ++i) {
      const T* inp = in + static_cast<std::size_t>(i) * ih * iw;
      const T* wbase = w + ((static_cast<std::size_t>(o) * ic + i) * k) * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const T wv = wbase[ky * k + kx];
          for (int oy = 0; oy < oh; ++oy) {
            const T* irow = inp + (oy + ky) * iw + kx;
            T* orow = outp + oy * ow;
            for (int ox = 0; ox < ow; ++ox) orow[ox] += wv * irow[ox];
          }
        }
      }
    }
  }
}

// 2x2 stride-2 max pooling; odd trailing rows/columns are dropped. Ties keep
// the first element in row-major scan order.
template <typename T>
void maxpool_fwd(const T* in, T* out, int* argmax, int c, int h, int w) {
  const int oh = h / 2, ow = w / 2;
  for (int ch = 0; ch < c; ++ch) {
    const T* inp = in + static_cast<std::size_t>(ch) * h * w;
    T* outp = out + static_cast<std::size_t>(ch) * oh * ow;
    int* argp = argmax ? argmax + static_cast<std::size_t>(ch) * oh * ow : nullptr;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        int best = (2 * oy) * w + 2 * ox;
        T best_v = inp[best];
        const int cand[3] = {(2 * oy) * w + 2 * ox + 1, (2 * oy + 1) * w + 2 * ox,
                             (2 * oy + 1) * w + 2 * ox + 1};
        for (int idx : cand) {
          if (inp[idx] > best_v) {
            best_v = inp[idx];
            best = idx;
          }
        }
        outp[oy * ow + ox] = best_v;
        if (argp) argp[oy * ow + ox] = best;
      }
    }
  }
}

template <typename T>
void prelu_fwd(const T* in, T* out, const T* slope, int channels, int inner) {
  for (int c = 0; c < channels; ++c) {
    const T a = slope[c];
    const T* inp = in + static_cast<std::size_t>(c) * inner;
    T* outp = out + static_cast<std::size_t>(c) * inner;
    for (int i = 0; i < inner; ++i) outp[i] = inp[i] >= T(0) ? inp[i] : a * inp[i];
  }
}

// ---------------------------------------------------------------------------

class DenseLayer final : public Layer {
 public:
  DenseLayer(int n_in, int n_out) : n_in_(n_in), n_out_(n_out) {
    if (n_in <= 0 || n_out <= 0) throw std::invalid_argument("Dense: bad sizes");
    w_.assign(static_cast<std::size_t>(n_in) * n_out, 0.0f);
    b_.assign(n_out, 0.0f);
    gw_.assign(w_.size(), 0.0f);
    gb_.assign(b_.size(), 0.0f);
  }

  LayerKind kind() const override { return LayerKind::Dense; }

  Shape output_shape(const Shape& in) const override {
    if (in.size() != 1 || in[0] != n_in_)
      throw std::invalid_argument("Dense: expected input " + std::to_string(n_in_) +
                                  ", got " + shape_str(in));
    return {n_out_};
  }

  void forward(const float* in, float* out) override {
    cached_input_.assign(in, in + n_in_);
    dense_fwd(in, out, w_.data(), b_.data(), n_in_, n_out_);
  }

  void forward_const(const float* in, float* out) const override {
    dense_fwd(in, out, w_.data(), b_.data(), n_in_, n_out_);
  }

  void forward_fp64(const double* in, double* out, const double* params) const override {
    dense_fwd(in, out, params, params + w_.size(), n_in_, n_out_);
  }

  void backward(const float* grad_out, float* grad_in) override {
    if (cached_input_.empty()) throw std::logic_error("Dense: backward without forward");
    const float* x = cached_input_.data();
    for (int o = 0; o < n_out_; ++o) {
      const float g = grad_out[o];
      float* grow = gw_.data() + static_cast<std::size_t>(o) * n_in_;
      for (int i = 0; i < n_in_; ++i) grow[i] += g * x[i];
      gb_[o] += g;
    }
    std::fill(grad_in, grad_in + n_in_, 0.0f);
    for (int o = 0; o < n_out_; ++o) {
      const float g = grad_out[o];
      const float* row = w_.data() + static_cast<std::size_t>(o) * n_in_;
      for (int i = 0; i < n_in_; ++i) grad_in[i] += row[i] * g;
    }
  }

  int n_arrays() const override { return 2; }
  std::vector<float>& array_values(int i) override { return i == 0 ? w_ : b_; }
  std::vector<float>& array_grads(int i) override { return i == 0 ? gw_ : gb_; }
  std::string array_name(int i) const override { return i == 0 ? "weights" : "bias"; }
  Shape serial_dims() const override { return {n_out_, n_in_}; }

  void init_params(Rng& rng) override {
    const double limit = std::sqrt(6.0 / (n_in_ + n_out_));
    for (auto& v : w_) v = static_cast<float>(rng.uniform(-limit, limit));
    std::fill(b_.begin(), b_.end(), 0.0f);
  }

 private:
  int n_in_, n_out_;
  std::vector<float> w_, b_, gw_, gb_;
};

class Conv1DLayer final : public Layer {
 public:
  Conv1DLayer(int ic, int oc, int k) : ic_(ic), oc_(oc), k_(k) {
    if (ic <= 0 || oc <= 0 || k <= 0) throw std::invalid_argument("Conv1D: bad sizes");
    w_.assign(static_cast<std::size_t>(oc) * ic * k, 0.0f);
    b_.assign(oc, 0.0f);
    gw_.assign(w_.size(), 0.0f);
    gb_.assign(b_.size(), 0.0f);
  }

  LayerKind kind() const override { return LayerKind::Conv1D; }

  Shape output_shape(const Shape& in) const override {
    if (in.size() != 2 || in[0] != ic_ || in[1] < k_)
      throw std::invalid_argument("Conv1D: cannot apply to input " + shape_str(in));
    return {oc_, in[1] - k_ + 1};
  }

  void forward(const float* in, float* out) override {
    cached_input_.assign(in, in + numel(in_shape_));
    conv1d_fwd(in, out, w_.data(), b_.data(), ic_, in_shape_[1], oc_, k_);
  }

  void forward_const(const float* in, float* out) const override {
    conv1d_fwd(in, out, w_.data(), b_.data(), ic_, in_shape_[1], oc_, k_);
  }

  void forward_fp64(const double* in, double* out, const double* params) const override {
    conv1d_fwd(in, out, params, params + w_.size(), ic_, in_shape_[1], oc_, k_);
  }

  void backward(const float* grad_out, float* grad_in) override {
    if (cached_input_.empty()) throw std::logic_error("Conv1D: backward without forward");
    const int len = in_shape_[1];
    const int out_len = len - k_ + 1;
    const float* x = cached_input_.data();
    std::fill(grad_in, grad_in + numel(in_shape_), 0.0f);
    for (int o = 0; o < oc_; ++o) {
      const float* gout = grad_out + static_cast<std::size_t>(o) * out_len;
      double gb_acc = 0.0;
      for (int t = 0; t < out_len; ++t) gb_acc += gout[t];
      gb_[o] += static_cast<float>(gb_acc);
      for (int i = 0; i < ic_; ++i) {
        const float* xin = x + static_cast<std::size_t>(i) * len;
        float* gin = grad_in + static_cast<std::size_t>(i) * len;
        float* gw = gw_.data() + (static_cast<std::size_t>(o) * ic_ + i) * k_;
        const float* wp = w_.data() + (static_cast<std::size_t>(o) * ic_ + i) * k_;
        for (int kk = 0; kk < k_; ++kk) {
          double acc = 0.0;
          const float wv = wp[kk];
          for (int t = 0; t < out_len; ++t) {
            acc += static_cast<double>(gout[t]) * xin[t + kk];
            gin[t + kk] += wv * gout[t];
          }
          gw[kk] += static_cast<float>(acc);
        }
      }
    }
  }

  int n_arrays() const override { return 2; }
  std::vector<float>& array_values(int i) override { return i == 0 ? w_ : b_; }
  std::vector<float>& array_grads(int i) override { return i == 0 ? gw_ : gb_; }
  std::string array_name(int i) const override { return i == 0 ? "weights" : "bias"; }
  Shape serial_dims() const override { return {oc_, ic_, k_}; }

  void init_params(Rng& rng) override {
    const int fan_in = ic_ * k_, fan_out = oc_ * k_;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : w_) v = static_cast<float>(rng.uniform(-limit, limit));
    std::fill(b_.begin(), b_.end(), 0.0f);
  }

 private:
  int ic_, oc_, k_;
  std::vector<float> w_, b_, gw_, gb_;
};

class Conv2DLayer final : public Layer {
 public:
  Conv2DLayer(int ic, int oc, int k) : ic_(ic), oc_(oc), k_(k) {
    if (ic <= 0 || oc <= 0 || k <= 0) throw std::invalid_argument("Conv2D: bad sizes");
    w_.assign(static_cast<std::size_t>(oc) * ic * k * k, 0.0f);
    b_.assign(oc, 0.0f);
    gw_.assign(w_.size(), 0.0f);
    gb_.assign(b_.size(), 0.0f);
  }

  LayerKind kind() const override { return LayerKind::Conv2D; }

  Shape output_shape(const Shape& in) const override {
    if (in.size() != 3 || in[0] != ic_ || in[1] < k_ || in[2] < k_)
      throw std::invalid_argument("Conv2D: cannot apply to input " + shape_str(in));
    return {oc_, in[1] - k_ + 1, in[2] - k_ + 1};
  }

  void forward(const float* in, float* out) override {
    cached_input_.assign(in, in + numel(in_shape_));
    conv2d_fwd(in, out, w_.data(), b_.data(), ic_, in_shape_[1], in_shape_[2], oc_, k_);
  }

  void forward_const(const float* in, float* out) const override {
    conv2d_fwd(in, out, w_.data(), b_.data(), ic_, in_shape_[1], in_shape_[2], oc_, k_);
  }

  void forward_fp64(const double* in, double* out, const double* params) const override {
    conv2d_fwd(in, out, params, params + w_.size(), ic_, in_shape_[1], in_shape_[2], oc_, k_);
  }

  void backward(const float* grad_out, float* grad_in) override {
    if (cached_input_.empty()) throw std::logic_error("Conv2D: backward without forward");
    const int ih = in_shape_[1], iw = in_shape_[2];
    const int oh = ih - k_ + 1, ow = iw - k_ + 1;
    const float* x = cached_input_.data();
    std::fill(grad_in, grad_in + numel(in_shape_), 0.0f);
    for (int o = 0; o < oc_; ++o) {
      const float* goutp = grad_out + static_cast<std::size_t>(o) * oh * ow;
      double gb_acc = 0.0;
      for (int t = 0; t < oh * ow; ++t) gb_acc += goutp[t];
      gb_[o] += static_cast<float>(gb_acc);
      for (int i = 0; i < ic_; ++i) {
        const float* xin = x + static_cast<std::size_t>(i) * ih * iw;
        float* gin = grad_in + static_cast<std::size_t>(i) * ih * iw;
        const float* wbase = w_.data() + ((static_cast<std::size_t>(o) * ic_ + i) * k_) * k_;
        float* gwbase = gw_.data() + ((static_cast<std::size_t>(o) * ic_ + i) * k_) * k_;
        for (int ky = 0; ky < k_; ++ky) {
          for (int kx = 0; kx < k_; ++kx) {
            const float wv = wbase[ky * k_ + kx];
            double acc = 0.0;
            for (int oy = 0; oy < oh; ++oy) {
              const float* grow = goutp + oy * ow;
              const float* xrow = xin + (oy + ky) * iw + kx;
              float* girow = gin + (oy + ky) * iw + kx;
              for (int ox = 0; ox < ow; ++ox) {
                acc += static_cast<double>(grow[ox]) * xrow[ox];
                girow[ox] += wv * grow[ox];
              }
            }
            gwbase[ky * k_ + kx] += static_cast<float>(acc);
          }
        }
      }
    }
  }

  int n_arrays() const override { return 2; }
  std::vector<float>& array_values(int i) override { return i == 0 ? w_ : b_; }
  std::vector<float>& array_grads(int i) override { return i == 0 ? gw_ : gb_; }
  std::string array_name(int i) const override { return i == 0 ? "weights" : "bias"; }
  Shape serial_dims() const override { return {oc_, ic_, k_, k_}; }

  void init_params(Rng& rng) override {
    const int fan_in = ic_ * k_ * k_, fan_out = oc_ * k_ * k_;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : w_) v = static_cast<float>(rng.uniform(-limit, limit));
    std::fill(b_.begin(), b_.end(), 0.0f);
  }

 private:
  int ic_, oc_, k_;
  std::vector<float> w_, b_, gw_, gb_;
};

class MaxPool2DLayer final : public Layer {
 public:
  LayerKind kind() const override { return LayerKind::MaxPool2D; }

  Shape output_shape(const Shape& in) const override {
    if (in.size() != 3 || in[1] < 2 || in[2] < 2)
      throw std::invalid_argument("MaxPool2D: cannot apply to input " + shape_str(in));
    return {in[0], in[1] / 2, in[2] / 2};
  }

  void bind(const Shape& in) override {
    Layer::bind(in);
    argmax_.assign(numel(out_shape_), 0);
  }

  void forward(const float* in, float* out) override {
    have_forward_ = true;
    maxpool_fwd(in, out, argmax_.data(), in_shape_[0], in_shape_[1], in_shape_[2]);
  }

  void forward_const(const float* in, float* out) const override {
    maxpool_fwd<float>(in, out, nullptr, in_shape_[0], in_shape_[1], in_shape_[2]);
  }

  void forward_fp64(const double* in, double* out, const double*) const override {
    maxpool_fwd<double>(in, out, nullptr, in_shape_[0], in_shape_[1], in_shape_[2]);
  }

  void forward_fp64_pinned(const double* in, double* out, const double*) const override {
    if (!have_forward_) throw std::logic_error("MaxPool2D: no routing to pin");
    const int plane_out = (in_shape_[1] / 2) * (in_shape_[2] / 2);
    const int plane_in = in_shape_[1] * in_shape_[2];
    for (int ch = 0; ch < in_shape_[0]; ++ch) {
      const double* inp = in + static_cast<std::size_t>(ch) * plane_in;
      double* outp = out + static_cast<std::size_t>(ch) * plane_out;
      const int* argp = argmax_.data() + static_cast<std::size_t>(ch) * plane_out;
      for (int t = 0; t < plane_out; ++t) outp[t] = inp[argp[t]];
    }
  }

  void backward(const float* grad_out, float* grad_in) override {
    if (!have_forward_) throw std::logic_error("MaxPool2D: backward without forward");
    const int c = in_shape_[0], h = in_shape_[1], w = in_shape_[2];
    const int plane_out = (h / 2) * (w / 2);
    std::fill(grad_in, grad_in + numel(in_shape_), 0.0f);
    for (int ch = 0; ch < c; ++ch) {
      float* gin = grad_in + static_cast<std::size_t>(ch) * h * w;
      const float* gout = grad_out + static_cast<std::size_t>(ch) * plane_out;
      const int* argp = argmax_.data() + static_cast<std::size_t>(ch) * plane_out;
      for (int t = 0; t < plane_out; ++t) gin[argp[t]] += gout[t];
    }
  }

 private:
  std::vector<int> argmax_;
  bool have_forward_ = false;
};

class PReLULayer final : public Layer {
 public:
  PReLULayer(int channels, float slope) : channels_(channels) {
    if (channels <= 0) throw std::invalid_argument("PReLU: bad channel count");
    a_.assign(channels, slope);
    ga_.assign(channels, 0.0f);
    init_slope_ = slope;
  }

  LayerKind kind() const override { return LayerKind::PReLU; }

  Shape output_shape(const Shape& in) const override {
    if (in.empty() || in[0] != channels_)
      throw std::invalid_argument("PReLU: channel mismatch for input " + shape_str(in));
    return in;
  }

  void forward(const float* in, float* out) override {
    cached_input_.assign(in, in + numel(in_shape_));
    prelu_fwd(in, out, a_.data(), channels_, inner());
  }

  void forward_const(const float* in, float* out) const override {
    prelu_fwd(in, out, a_.data(), channels_, inner());
  }

  void forward_fp64(const double* in, double* out, const double* params) const override {
    prelu_fwd(in, out, params, channels_, inner());
  }

  void forward_fp64_pinned(const double* in, double* out, const double* params) const override {
    if (cached_input_.empty()) throw std::logic_error("PReLU: no routing to pin");
    const int m = inner();
    for (int c = 0; c < channels_; ++c) {
      const double a = params[c];
      const float* base = cached_input_.data() + static_cast<std::size_t>(c) * m;
      const double* inp = in + static_cast<std::size_t>(c) * m;
      double* outp = out + static_cast<std::size_t>(c) * m;
      for (int i = 0; i < m; ++i) outp[i] = base[i] >= 0.0f ? inp[i] : a * inp[i];
    }
  }

  void backward(const float* grad_out, float* grad_in) override {
    if (cached_input_.empty()) throw std::logic_error("PReLU: backward without forward");
    const int m = inner();
    for (int c = 0; c < channels_; ++c) {
      const float a = a_[c];
      const float* x = cached_input_.data() + static_cast<std::size_t>(c) * m;
      const float* go = grad_out + static_cast<std::size_t>(c) * m;
      float* gi = grad_in + static_cast<std::size_t>(c) * m;
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        if (x[i] >= 0.0f) {
          gi[i] = go[i];
        } else {
          gi[i] = a * go[i];
          acc += static_cast<double>(go[i]) * x[i];
        }
      }
      ga_[c] += static_cast<float>(acc);
    }
  }

  int n_arrays() const override { return 1; }
  std::vector<float>& array_values(int) override { return a_; }
  std::vector<float>& array_grads(int) override { return ga_; }
  std::string array_name(int) const override { return "slopes"; }
  Shape serial_dims() const override { return {channels_}; }

  void init_params(Rng&) override { std::fill(a_.begin(), a_.end(), init_slope_); }

 private:
  int inner() const { return numel(in_shape_) / channels_; }

  int channels_;
  float init_slope_ = 0.25f;
  std::vector<float> a_, ga_;
};

class FlattenLayer final : public Layer {
 public:
  LayerKind kind() const override { return LayerKind::Flatten; }

  Shape output_shape(const Shape& in) const override { return {numel(in)}; }

  void forward(const float* in, float* out) override {
    have_forward_ = true;
    std::copy(in, in + numel(in_shape_), out);
  }

  void forward_const(const float* in, float* out) const override {
    std::copy(in, in + numel(in_shape_), out);
  }

  void forward_fp64(const double* in, double* out, const double*) const override {
    std::copy(in, in + numel(in_shape_), out);
  }

  void backward(const float* grad_out, float* grad_in) override {
    if (!have_forward_) throw std::logic_error("Flatten: backward without forward");
    std::copy(grad_out, grad_out + numel(in_shape_), grad_in);
  }

 private:
  bool have_forward_ = false;
};

}  // namespace

std::unique_ptr<Layer> make_dense(int in_features, int out_features) {
  return std::make_unique<DenseLayer>(in_features, out_features);
}
std::unique_ptr<Layer> make_conv1d(int in_channels, int out_channels, int kernel) {
  return std::make_unique<Conv1DLayer>(in_channels, out_channels, kernel);
}
std::unique_ptr<Layer> make_conv2d(int in_channels, int out_channels, int kernel) {
  return std::make_unique<Conv2DLayer>(in_channels, out_channels, kernel);
}
std::unique_ptr<Layer> make_maxpool2d() { return std::make_unique<MaxPool2DLayer>(); }
std::unique_ptr<Layer> make_prelu(int channels, float slope) {
  return std::make_unique<PReLULayer>(channels, slope);
}
std::unique_ptr<Layer> make_flatten() { return std::make_unique<FlattenLayer>(); }

}  // namespace piglet::nn
