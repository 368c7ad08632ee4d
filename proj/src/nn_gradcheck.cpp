#include <cmath>

#include "piglet/nn.hpp"

namespace piglet::nn {

namespace {

// Offsets of each layer's packed parameter block in the fp64 shadow vector.
struct ShadowLayout {
  std::vector<double> params;
  std::vector<std::size_t> layer_offset;
};

ShadowLayout pack_params(Network& network) {
  ShadowLayout layout;
  layout.layer_offset.resize(network.n_layers(), 0);
  for (int i = 0; i < network.n_layers(); ++i) {
    layout.layer_offset[i] = layout.params.size();
    Layer& layer = network.layer(i);
    for (int j = 0; j < layer.n_arrays(); ++j)
      for (float v : layer.array_values(j)) layout.params.push_back(v);
  }
  return layout;
}

double shadow_loss(const Network& network, const ShadowLayout& layout,
                   const std::vector<double>& input, const std::vector<double>& target) {
  std::vector<double> a = input, b;
  for (int i = 0; i < network.n_layers(); ++i) {
    const Layer& layer = network.layer(i);
    b.assign(numel(layer.out_shape()), 0.0);
    layer.forward_fp64_pinned(a.data(), b.data(),
                              layout.params.data() + layout.layer_offset[i]);
    a.swap(b);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

}  // namespace

GradCheckReport gradient_check(Network& network, const Tensor& input,
                               const Tensor& target, double tolerance) {
  network.zero_grads();
  const Tensor out = network.forward(input);
  const LossResult loss = mse_loss(out, target);
  network.backward(loss.grad);

  // Snapshot the analytic gradients before any perturbation.
  std::vector<double> analytic;
  std::vector<std::string> names;
  for (auto& ref : network.params()) {
    for (float g : *ref.grads) {
      analytic.push_back(g);
      names.push_back(ref.name);
    }
  }

  ShadowLayout layout = pack_params(network);
  const std::vector<double> input64(input.values.begin(), input.values.end());
  const std::vector<double> target64(target.values.begin(), target.values.end());

  GradCheckReport report;
  report.n_params = static_cast<int>(layout.params.size());

  constexpr double h = 1e-3;
  for (std::size_t k = 0; k < layout.params.size(); ++k) {
    const double saved = layout.params[k];
    layout.params[k] = saved + h;
    const double loss_plus = shadow_loss(network, layout, input64, target64);
    layout.params[k] = saved - h;
    const double loss_minus = shadow_loss(network, layout, input64, target64);
    layout.params[k] = saved;

    const double fd = (loss_plus - loss_minus) / (2.0 * h);
    const double a = analytic[k];
    const double scale = std::max({std::abs(a), std::abs(fd), 1e-3});
    const double rel = std::abs(a - fd) / scale;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_param = names[k];
    }
  }
  report.pass = report.max_rel_error < tolerance;
  return report;
}

}  // namespace piglet::nn
