#pragma once

#include <optional>
#include <span>

#include "piglet/fit.hpp"
#include "piglet/nn.hpp"
#include "piglet/streams.hpp"
#include "piglet/throws.hpp"

namespace piglet::models {

// ---------------------------------------------------------------------------
// Architectures
// ---------------------------------------------------------------------------

// Four conv+pool pairs, then two dense layers; PReLU after every learned
// layer except the output. Output is the object position (x,y,z) in meters.
struct LocalizerSpec {
  int input_height = 60;
  int input_width = 80;
  int input_channels = 4;
  std::array<int, 4> conv_channels{16, 32, 64, 128};
  int kernel = 3;
  int dense_width = 128;
  // Depth-channel featurization: meters are divided by this range so all
  // four input channels are O(1).
  float depth_range = 8.0f;
};

// One Conv1D over the detection-window axis, then three dense layers.
// Output is the interception (x, y) on the catch plane.
struct InterceptorSpec {
  int window = 10;
  int features = 5;
  int conv_channels = 32;
  int kernel = 3;
  int dense1 = 64;
  int dense2 = 32;
};

// Throws when the input size does not compose through the stack.
nn::Network build_localizer(const LocalizerSpec& spec);
nn::Network build_interceptor(const InterceptorSpec& spec);

// ---------------------------------------------------------------------------
// Featurization
// ---------------------------------------------------------------------------

// (4, H, W) tensor: RGB as stored, depth divided by depth_range.
nn::Tensor frame_to_tensor(const sensors::Frame& frame, float depth_range);

// Interceptor input: (5, window) tensor of the last `window` detections,
// rows (x, y, z, elapsed-since-first-detection, sensor flag 0=camera
// 1=radar), oldest first; missing leading steps are all-zero columns.
// `episode_t0` is the first detection time of the episode.
nn::Tensor pack_features(std::span<const sensors::Detection> detections,
                         double episode_t0, int window = 10);
nn::Tensor pack_features(const sensors::DetectionBuffer& buffer, int window = 10);

Vec3 localize_with_network(const nn::Network& network, const sensors::Frame& frame,
                           float depth_range);

// Network (x,y) prediction with t_cross from the baseline depth fit.
// Requires a non-empty buffer; returns nothing while fewer than 3 detections
// are available or the depth fit reports no approach.
std::optional<fit::InterceptionPoint> nn_predict_interception(
    const nn::Network& network, const sensors::DetectionBuffer& buffer,
    double z_plane, double gravity);

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

struct TrajectorySample {
  std::vector<sensors::Detection> detections;
  double label_x = 0;  // crossing on the catch plane
  double label_y = 0;
  double t_cross = 0;
  double plane_z = -0.4;
};

struct TrajectoryDataset {
  std::vector<TrajectorySample> train, val, test;
};

enum class LabelSource : int { Truth = 0, Baseline = 1 };

struct TrajectoryDataGenConfig {
  harness::ThrowConfig throws;
  sensors::SensorSetup sensors;
  int n_train = 379;
  int n_val = 40;
  int n_test = 40;
  LabelSource label_source = LabelSource::Truth;
  std::uint64_t seed = 1;
};

// Simulated throws observed through the sensor stack; labels are the true
// plane crossing (or the baseline fit's prediction in Baseline mode).
TrajectoryDataset gen_trajectory_data(const TrajectoryDataGenConfig& config);

// Originals plus (factor-1) copies per trajectory, each copy shifted by one
// uniform (dx, dy) applied to every detection and to the label.
std::vector<TrajectorySample> augment_trajectories(
    const std::vector<TrajectorySample>& trajectories, int factor,
    double shift_range, std::uint64_t seed);

// Rendered-frame dataset is stored as sampling specs and rendered on demand;
// frames are deterministic in (seed, conditions).
struct LocalizerSample {
  Vec3 position;  // label
  std::uint64_t render_seed = 0;
  double brightness = 1.0;
  int blur_len = 0;
};

struct LocalizerDataset {
  std::vector<LocalizerSample> train, val, test;
};

struct LocalizerDataGenConfig {
  harness::ThrowConfig throws;
  sensors::SensorSetup sensors;
  int n_train = 5437;
  int n_val = 376;
  int n_test = 483;
  double scale = 1.0;  // multiplies all three counts (desk-scale runs)
  double brightness_min = 0.75;
  double brightness_max = 1.10;
  int blur_max = 24;
  double blur_zero_fraction = 0.4;
  std::uint64_t seed = 1;
};

LocalizerDataset gen_localizer_data(const LocalizerDataGenConfig& config);

sensors::Frame render_localizer_sample(const LocalizerSample& sample,
                                       const sensors::SensorSetup& setup);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainConfig {
  int epochs = 200;
  double lr = 1e-4;
  int batch_size = 32;
  std::uint64_t seed = 1;
  bool verbose = false;
};

struct TrainCurve {
  std::vector<double> train_loss;  // one entry per epoch
  std::vector<double> val_loss;
};

// Indexable supervised samples; `get` fills input and target for an index.
struct SampleSource {
  int count = 0;
  std::function<void(int, nn::Tensor*, nn::Tensor*)> get;
};

// Seeded mini-batch Adam on MSE. Deterministic given the seed; aborts with
// the epoch index when the loss turns non-finite.
TrainCurve train_network(nn::Network& network, const SampleSource& train,
                         const SampleSource& val, const TrainConfig& config);

// Supervised snapshot view of a trajectory set: one sample per detection
// prefix of length >= 3 (the window packs the last 10 of each prefix).
struct SnapshotSet {
  std::vector<std::pair<int, int>> index;  // (trajectory, prefix length)
  const std::vector<TrajectorySample>* trajectories = nullptr;
  int window = 10;

  int count() const { return static_cast<int>(index.size()); }
  SampleSource source() const;
};

SnapshotSet make_snapshots(const std::vector<TrajectorySample>& trajectories,
                           int window = 10);

SampleSource localizer_source(const std::vector<LocalizerSample>& samples,
                              const sensors::SensorSetup& setup, float depth_range);

// Per-axis RMSE of the interceptor over every snapshot in the set.
struct AxisRmse {
  double x = 0;
  double y = 0;
};
AxisRmse interceptor_rmse(const nn::Network& network, const SnapshotSet& snapshots);

// Mean Euclidean localization error over rendered samples.
double localizer_mean_error(const nn::Network& network,
                            const std::vector<LocalizerSample>& samples,
                            const sensors::SensorSetup& setup, float depth_range);

}  // namespace piglet::models
