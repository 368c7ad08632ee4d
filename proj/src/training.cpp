#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "piglet/models.hpp"

namespace piglet::models {

namespace {

double evaluate(nn::Network& network, const SampleSource& samples) {
  if (samples.count == 0) return 0.0;
  nn::Tensor input, target;
  double acc = 0.0;
  for (int i = 0; i < samples.count; ++i) {
    samples.get(i, &input, &target);
    acc += nn::mse_loss(network.forward(input), target).loss;
  }
  return acc / samples.count;
}

void scale_grads(nn::Network& network, float factor) {
  for (auto& ref : network.params())
    for (auto& g : *ref.grads) g *= factor;
}

}  // namespace

TrainCurve train_network(nn::Network& network, const SampleSource& train,
                         const SampleSource& val, const TrainConfig& config) {
  if (train.count == 0) throw std::invalid_argument("train_network: empty dataset");
  if (config.batch_size < 1) throw std::invalid_argument("train_network: bad batch size");

  nn::AdamConfig adam_config;
  adam_config.lr = config.lr;
  nn::Adam adam(network, adam_config);

  std::vector<int> order(train.count);
  for (int i = 0; i < train.count; ++i) order[i] = i;

  TrainCurve curve;
  nn::Tensor input, target;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates with a per-epoch substream.
    Rng rng(substream_seed(config.seed, static_cast<std::uint64_t>(epoch)));
    for (int i = train.count - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_int(0, i));
      std::swap(order[i], order[j]);
    }

    double epoch_loss = 0.0;
    int done = 0;
    while (done < train.count) {
      const int batch = std::min(config.batch_size, train.count - done);
      network.zero_grads();
      for (int b = 0; b < batch; ++b) {
        train.get(order[done + b], &input, &target);
        const auto result = nn::mse_loss(network.forward(input), target);
        epoch_loss += result.loss;
        network.backward(result.grad);
      }
      scale_grads(network, 1.0f / batch);
      adam.step();
      done += batch;
    }
    epoch_loss /= train.count;
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error("train_network: diverged at epoch " + std::to_string(epoch));

    curve.train_loss.push_back(epoch_loss);
    curve.val_loss.push_back(evaluate(network, val));
    if (config.verbose)
      std::printf("epoch %3d  train %.6f  val %.6f\n", epoch,
                  curve.train_loss.back(), curve.val_loss.back());
  }
  return curve;
}

SampleSource SnapshotSet::source() const {
  const SnapshotSet* self = this;
  SampleSource src;
  src.count = count();
  src.get = [self](int i, nn::Tensor* input, nn::Tensor* target) {
    const auto [traj_idx, prefix] = self->index[i];
    const TrajectorySample& traj = (*self->trajectories)[traj_idx];
    *input = pack_features(
        std::span<const sensors::Detection>(traj.detections.data(), prefix),
        traj.detections.front().t, self->window);
    *target = nn::Tensor({2}, {static_cast<float>(traj.label_x),
                               static_cast<float>(traj.label_y)});
  };
  return src;
}

SnapshotSet make_snapshots(const std::vector<TrajectorySample>& trajectories,
                           int window) {
  SnapshotSet set;
  set.trajectories = &trajectories;
  set.window = window;
  for (int t = 0; t < static_cast<int>(trajectories.size()); ++t) {
    const int n = static_cast<int>(trajectories[t].detections.size());
    for (int prefix = 3; prefix <= n; ++prefix) set.index.emplace_back(t, prefix);
  }
  return set;
}

SampleSource localizer_source(const std::vector<LocalizerSample>& samples,
                              const sensors::SensorSetup& setup, float depth_range) {
  SampleSource src;
  src.count = static_cast<int>(samples.size());
  src.get = [&samples, setup, depth_range](int i, nn::Tensor* input, nn::Tensor* target) {
    const LocalizerSample& s = samples[i];
    *input = frame_to_tensor(render_localizer_sample(s, setup), depth_range);
    *target = nn::Tensor({3}, {static_cast<float>(s.position.x),
                               static_cast<float>(s.position.y),
                               static_cast<float>(s.position.z)});
  };
  return src;
}

AxisRmse interceptor_rmse(const nn::Network& network, const SnapshotSet& snapshots) {
  const SampleSource src = snapshots.source();
  nn::Tensor input, target;
  double sx = 0, sy = 0;
  for (int i = 0; i < src.count; ++i) {
    src.get(i, &input, &target);
    const nn::Tensor out = network.predict(input);
    const double dx = out.values[0] - target.values[0];
    const double dy = out.values[1] - target.values[1];
    sx += dx * dx;
    sy += dy * dy;
  }
  AxisRmse rmse;
  rmse.x = std::sqrt(sx / std::max(1, src.count));
  rmse.y = std::sqrt(sy / std::max(1, src.count));
  return rmse;
}

double localizer_mean_error(const nn::Network& network,
                            const std::vector<LocalizerSample>& samples,
                            const sensors::SensorSetup& setup, float depth_range) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : samples) {
    const Vec3 pred = localize_with_network(
        network, render_localizer_sample(s, setup), depth_range);
    acc += (pred - s.position).norm();
  }
  return acc / samples.size();
}

}  // namespace piglet::models
