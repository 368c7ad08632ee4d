#include <cmath>
#include <stdexcept>

#include "piglet/models.hpp"

namespace piglet::models {

namespace {

constexpr std::uint64_t kThrowTag = 0xA1;
constexpr std::uint64_t kStreamTag = 0xA2;
constexpr std::uint64_t kFrameTag = 0xB1;

TrajectorySample generate_trajectory_sample(const TrajectoryDataGenConfig& config,
                                            std::uint64_t index) {
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    const std::uint64_t stream_index = index * 64 + attempt;
    Rng throw_rng(substream_seed(config.seed ^ kThrowTag, stream_index));
    const auto thrown = harness::sample_throw(config.throws, throw_rng);

    sensors::SensorSimulator sim(&thrown.trajectory, config.sensors,
                                 substream_seed(config.seed ^ kStreamTag, stream_index));
    sensors::DetectionBuffer buffer = sim.run_all();
    if (buffer.size() < 4) continue;  // degenerate observation, draw again

    TrajectorySample sample;
    sample.detections = std::move(buffer.items);
    sample.plane_z = config.throws.plane_z;
    sample.t_cross = thrown.crossing.t;
    if (config.label_source == LabelSource::Truth) {
      sample.label_x = thrown.crossing.point.x;
      sample.label_y = thrown.crossing.point.y;
    } else {
      // Paper-style bootstrapping: label with the baseline fit over the
      // full observation history.
      sensors::DetectionBuffer all;
      all.items = sample.detections;
      try {
        const auto est = fit::fit_trajectory(all, config.throws.gravity);
        const auto p = fit::predict_interception(est, config.throws.plane_z);
        sample.label_x = p.x;
        sample.label_y = p.y;
      } catch (const std::exception&) {
        continue;  // baseline could not produce a label for this throw
      }
    }
    return sample;
  }
  throw std::runtime_error("gen_trajectory_data: could not generate a usable throw");
}

}  // namespace

TrajectoryDataset gen_trajectory_data(const TrajectoryDataGenConfig& config) {
  TrajectoryDataset dataset;
  const int total = config.n_train + config.n_val + config.n_test;
  for (int i = 0; i < total; ++i) {
    TrajectorySample sample = generate_trajectory_sample(config, static_cast<std::uint64_t>(i));
    if (i < config.n_train)
      dataset.train.push_back(std::move(sample));
    else if (i < config.n_train + config.n_val)
      dataset.val.push_back(std::move(sample));
    else
      dataset.test.push_back(std::move(sample));
  }
  return dataset;
}

std::vector<TrajectorySample> augment_trajectories(
    const std::vector<TrajectorySample>& trajectories, int factor,
    double shift_range, std::uint64_t seed) {
  if (factor < 1) throw std::invalid_argument("augment_trajectories: factor must be >= 1");
  std::vector<TrajectorySample> out;
  out.reserve(trajectories.size() * factor);
  Rng rng(seed);
  for (const auto& traj : trajectories) {
    out.push_back(traj);
    for (int copy = 1; copy < factor; ++copy) {
      const double dx = rng.uniform(-shift_range, shift_range);
      const double dy = rng.uniform(-shift_range, shift_range);
      TrajectorySample shifted = traj;
      for (auto& d : shifted.detections) {
        d.position.x += dx;
        d.position.y += dy;
      }
      shifted.label_x += dx;
      shifted.label_y += dy;
      out.push_back(std::move(shifted));
    }
  }
  return out;
}

LocalizerDataset gen_localizer_data(const LocalizerDataGenConfig& config) {
  const int n_train = std::max(1, static_cast<int>(std::lround(config.n_train * config.scale)));
  const int n_val = std::max(1, static_cast<int>(std::lround(config.n_val * config.scale)));
  const int n_test = std::max(1, static_cast<int>(std::lround(config.n_test * config.scale)));
  const int total = n_train + n_val + n_test;

  LocalizerDataset dataset;
  for (int i = 0; i < total; ++i) {
    Rng rng(substream_seed(config.seed ^ kFrameTag, static_cast<std::uint64_t>(i)));
    LocalizerSample sample;
    bool placed = false;
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      const auto thrown = harness::sample_throw(config.throws, rng);
      const double t = rng.uniform(0.0, thrown.trajectory.back().t);
      const Vec3 pos = thrown.trajectory.state_at(t).position;
      double u, v, depth;
      if (!sensors::project(config.sensors.camera, pos, &u, &v, &depth)) continue;
      if (depth < config.sensors.camera.min_depth + 0.2) continue;
      // Keep the whole blob comfortably inside the frame.
      const double rx = config.sensors.camera.fx * config.sensors.object_radius / depth;
      if (u < rx + 2 || u > config.sensors.camera.width - rx - 2) continue;
      if (v < rx + 2 || v > config.sensors.camera.height - rx - 2) continue;
      sample.position = pos;
      placed = true;
    }
    if (!placed)
      throw std::runtime_error("gen_localizer_data: could not place a sample in view");

    sample.render_seed = rng.next_u64();
    sample.brightness = rng.uniform(config.brightness_min, config.brightness_max);
    sample.blur_len = rng.uniform() < config.blur_zero_fraction
                          ? 0
                          : static_cast<int>(rng.uniform_int(1, config.blur_max));

    if (i < n_train)
      dataset.train.push_back(sample);
    else if (i < n_train + n_val)
      dataset.val.push_back(sample);
    else
      dataset.test.push_back(sample);
  }
  return dataset;
}

sensors::Frame render_localizer_sample(const LocalizerSample& sample,
                                       const sensors::SensorSetup& setup) {
  sensors::CameraModel camera = setup.camera;
  camera.blur_len = sample.blur_len;
  return sensors::render_frame(sample.position, setup.object_radius, camera,
                               sample.render_seed, sample.brightness);
}

}  // namespace piglet::models
