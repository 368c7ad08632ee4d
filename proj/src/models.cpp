#include "piglet/models.hpp"

#include <cmath>
#include <stdexcept>

namespace piglet::models {

nn::Network build_localizer(const LocalizerSpec& spec) {
  using namespace piglet::nn;
  int h = spec.input_height, w = spec.input_width;
  int channels = spec.input_channels;

  Network net;
  for (int stage = 0; stage < 4; ++stage) {
    const int out_ch = spec.conv_channels[stage];
    h -= spec.kernel - 1;
    w -= spec.kernel - 1;
    if (h < 2 || w < 2)
      throw std::invalid_argument("build_localizer: input " +
                                  std::to_string(spec.input_height) + "x" +
                                  std::to_string(spec.input_width) +
                                  " does not compose through the conv stack");
    net.add(make_conv2d(channels, out_ch, spec.kernel));
    net.add(make_prelu(out_ch));
    net.add(make_maxpool2d());
    h /= 2;
    w /= 2;
    channels = out_ch;
  }
  net.add(make_flatten());
  net.add(make_dense(channels * h * w, spec.dense_width));
  net.add(make_prelu(spec.dense_width));
  net.add(make_dense(spec.dense_width, 3));
  net.bind({spec.input_channels, spec.input_height, spec.input_width});
  return net;
}

nn::Network build_interceptor(const InterceptorSpec& spec) {
  using namespace piglet::nn;
  const int conv_out = spec.window - spec.kernel + 1;
  if (conv_out < 1) throw std::invalid_argument("build_interceptor: window too short");

  Network net;
  net.add(make_conv1d(spec.features, spec.conv_channels, spec.kernel));
  net.add(make_prelu(spec.conv_channels));
  net.add(make_flatten());
  net.add(make_dense(spec.conv_channels * conv_out, spec.dense1));
  net.add(make_prelu(spec.dense1));
  net.add(make_dense(spec.dense1, spec.dense2));
  net.add(make_prelu(spec.dense2));
  net.add(make_dense(spec.dense2, 2));
  net.bind({spec.features, spec.window});
  return net;
}

nn::Tensor frame_to_tensor(const sensors::Frame& frame, float depth_range) {
  nn::Tensor t({4, frame.height, frame.width});
  const std::size_t plane = static_cast<std::size_t>(frame.height) * frame.width;
  for (std::size_t i = 0; i < 3 * plane; ++i) t.values[i] = frame.data[i];
  for (std::size_t i = 3 * plane; i < 4 * plane; ++i)
    t.values[i] = frame.data[i] / depth_range;
  return t;
}

nn::Tensor pack_features(std::span<const sensors::Detection> detections,
                         double episode_t0, int window) {
  if (detections.empty()) throw std::invalid_argument("pack_features: empty buffer");
  const int n = static_cast<int>(detections.size());
  const int used = std::min(n, window);
  const int pad = window - used;

  nn::Tensor t({5, window});
  auto put = [&](int feature, int step, double value) {
    t.values[static_cast<std::size_t>(feature) * window + step] = static_cast<float>(value);
  };
  for (int i = 0; i < used; ++i) {
    const auto& d = detections[n - used + i];
    const int step = pad + i;  // oldest first, zeros lead
    put(0, step, d.position.x);
    put(1, step, d.position.y);
    put(2, step, d.position.z);
    put(3, step, d.t - episode_t0);
    put(4, step, d.source == sensors::Source::Radar ? 1.0 : 0.0);
  }
  return t;
}

nn::Tensor pack_features(const sensors::DetectionBuffer& buffer, int window) {
  return pack_features(std::span<const sensors::Detection>(buffer.items),
                       buffer.empty() ? 0.0 : buffer.front().t, window);
}

Vec3 localize_with_network(const nn::Network& network, const sensors::Frame& frame,
                           float depth_range) {
  const nn::Tensor out = network.predict(frame_to_tensor(frame, depth_range));
  return {out.values[0], out.values[1], out.values[2]};
}

std::optional<fit::InterceptionPoint> nn_predict_interception(
    const nn::Network& network, const sensors::DetectionBuffer& buffer,
    double z_plane, double gravity) {
  if (buffer.empty())
    throw std::invalid_argument("nn_predict_interception: empty buffer");
  if (buffer.size() < 3) return std::nullopt;

  const nn::Tensor out = network.predict(pack_features(buffer));

  // The network provides (x, y); the crossing time comes from the baseline
  // depth fit over the same detections.
  double t_cross;
  try {
    const auto estimate = fit::fit_trajectory(buffer, gravity);
    const double tau = (z_plane - estimate.a_z) / estimate.b_z;
    if (estimate.b_z >= 0.0) return std::nullopt;
    t_cross = estimate.t0 + tau;
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }

  fit::InterceptionPoint point;
  point.x = out.values[0];
  point.y = out.values[1];
  point.z_plane = z_plane;
  point.t_cross = t_cross;
  point.source = fit::PredictorSource::Network;
  return point;
}

}  // namespace piglet::models
