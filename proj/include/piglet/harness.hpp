#pragma once

#include <array>
#include <optional>

#include "piglet/config.hpp"
#include "piglet/controller.hpp"
#include "piglet/csvio.hpp"
#include "piglet/models.hpp"

namespace piglet::harness {

// Trained networks an episode may need; null until loaded.
struct LoadedModels {
  const nn::Network* localizer = nullptr;
  const nn::Network* interceptor = nullptr;
};

struct PredictionRecord {
  double t_delivered = 0.0;  // simulated time the goal update arrived
  double t_requested = 0.0;  // time the triggering detection set was read
  fit::InterceptionPoint point;
};

struct EpisodeResult {
  control::CatchOutcome outcome;
  double tof = 0.0;
  int n_camera = 0;
  int n_radar = 0;
  std::vector<PredictionRecord> predictions;
  double required_travel = 0.0;  // planar distance home -> true crossing
  int clamped_goals = 0;
  std::uint64_t seed = 0;
};

// Optional per-episode recordings for trace CSVs.
struct EpisodeTrace {
  std::vector<sensors::Detection> detections;
  std::vector<control::TraceSample> robot;
  ballistics::TrueTrajectory object;
  Vec3 true_crossing;
};

// One simulated throw through the full pipeline: 1 ms ticks, sensor events
// snapped to the grid, serialized prediction jobs with sampled inference
// latency, newest-goal-wins velocity control, catch judged at the true
// plane crossing. Deterministic in (config, seed).
EpisodeResult run_episode(const Config& config, const LoadedModels& models,
                          std::uint64_t seed, EpisodeTrace* trace = nullptr);

struct MissStats {
  double mean = 0, p50 = 0, p90 = 0;
};
struct TofStats {
  double min = 0, max = 0, median = 0;
};

struct Metrics {
  std::string label;
  int n = 0;
  double catch_rate = 0.0;
  MissStats miss;
  TofStats tof;
};

// Seeded Monte Carlo over independent episodes; episode i uses the
// substream seed of (config.seed, i), so metrics and per-episode rows are
// identical for any thread count.
struct ExperimentResult {
  Metrics metrics;
  std::vector<EpisodeResult> episodes;
};
ExperimentResult run_experiment(const Config& config, const LoadedModels& models,
                                int n_throws);

// All four localizer x predictor combinations on identical throw seeds.
std::array<ExperimentResult, 4> compare_pipelines(const Config& config,
                                                  const LoadedModels& models,
                                                  int n_throws);

struct TofRow {
  double distance = 0;
  int n = 0;
  double tof_min = 0, tof_max = 0, tof_median = 0;
  double band_lo = 0, band_hi = 0;
  bool in_band = false;
};
std::vector<TofRow> tof_report(const Config& config, int n_per_distance);

struct BlurRow {
  int blur_len = 0;
  double color_mean_error = 0;
  double cnn_mean_error = 0;
  int n_color = 0;  // frames where the color filter produced a detection
};
std::vector<BlurRow> blur_study(const Config& config, const nn::Network& localizer);

}  // namespace piglet::harness
