#pragma once

#include <array>
#include <string>

#include "piglet/controller.hpp"
#include "piglet/models.hpp"
#include "piglet/streams.hpp"
#include "piglet/throws.hpp"

namespace piglet {

enum class LocalizerKind : int { ColorFilter = 0, Cnn = 1 };
enum class PredictorKind : int { Ballistic = 0, Cnn = 1 };

struct PipelineOptions {
  LocalizerKind localizer = LocalizerKind::ColorFilter;
  PredictorKind predictor = PredictorKind::Ballistic;
  double latency_min = 0.128;  // seconds per prediction, uniform
  double latency_max = 0.176;
  int min_detections = 3;
};

struct FitOptions {
  fit::FitMode mode = fit::FitMode::PinnedGravity;
  double camera_weight = 1.0;
  double radar_weight = 1.0;
};

struct TrainingOptions {
  int epochs = 200;
  double lr = 1e-4;
  int batch_size = 32;
  int augment_factor = 5;
  double shift_range = 0.4;
  models::LabelSource label_source = models::LabelSource::Truth;
};

struct TrajectoryDataOptions {
  int n_train = 379;
  int n_val = 40;
  int n_test = 40;
};

struct LocalizerDataOptions {
  int n_train = 5437;
  int n_val = 376;
  int n_test = 483;
  double scale = 1.0;
  double brightness_min = 0.75;
  double brightness_max = 1.10;
  int blur_max = 24;
  double blur_zero_fraction = 0.4;
};

struct BlurStudyOptions {
  std::vector<int> levels{0, 10, 20};
  int n_frames = 150;
};

// Expected TOF band per throw class (measured min/max) used by the `tof`
// report's assertion.
struct TofBand {
  double lo = 0.0;
  double hi = 0.0;
};

// The whole simulator/learning configuration. Every key documented in the
// README maps onto one field here; config_to_json emits the effective
// values (defaults merged with overrides).
struct Config {
  std::uint64_t seed = 1;
  double basket_radius = 0.075;

  harness::ThrowConfig throws;  // gravity and plane_z live here
  std::vector<TofBand> tof_bands{{0.815, 1.062}, {1.135, 1.292}};

  sensors::SensorSetup sensors;

  FitOptions fit;
  control::ControllerParams controller;
  PipelineOptions pipeline;

  models::LocalizerSpec localizer_spec;
  std::string localizer_weights;
  models::InterceptorSpec interceptor_spec;
  std::string interceptor_weights;

  TrainingOptions training;
  TrajectoryDataOptions trajectory_data;
  LocalizerDataOptions localizer_data;
  BlurStudyOptions blur_study;

  int threads = 0;  // 0 = hardware concurrency (results do not depend on it)
};

// Strict parse: unknown keys are errors naming their full path; missing keys
// keep their defaults.
Config config_from_json_text(const std::string& text);
Config load_config_file(const std::string& path);
std::string config_to_json_text(const Config& config);

// Applies `json_value` (parsed) at a dotted path like
// "pipeline.localizer" or "models.interceptor.weights" on top of `config`.
void apply_config_override(Config* config, const std::string& dotted_key,
                           const std::string& json_value);

const char* localizer_kind_name(LocalizerKind kind);
const char* predictor_kind_name(PredictorKind kind);

}  // namespace piglet
