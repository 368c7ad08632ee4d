#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "piglet/harness.hpp"

namespace piglet::harness {

namespace {

double nearest_rank(std::vector<double> sorted_values, double q) {
  if (sorted_values.empty()) return 0.0;
  std::sort(sorted_values.begin(), sorted_values.end());
  const std::size_t n = sorted_values.size();
  const std::size_t rank =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q * n)));
  return sorted_values[std::min(rank, n) - 1];
}

Metrics aggregate(const std::string& label, const std::vector<EpisodeResult>& episodes) {
  Metrics m;
  m.label = label;
  m.n = static_cast<int>(episodes.size());
  if (episodes.empty()) return m;

  int successes = 0;
  std::vector<double> misses, tofs;
  double miss_sum = 0.0;
  for (const auto& e : episodes) {
    successes += e.outcome.success ? 1 : 0;
    misses.push_back(e.outcome.miss_distance);
    miss_sum += e.outcome.miss_distance;
    tofs.push_back(e.tof);
  }
  m.catch_rate = static_cast<double>(successes) / m.n;
  m.miss.mean = miss_sum / m.n;
  m.miss.p50 = nearest_rank(misses, 0.5);
  m.miss.p90 = nearest_rank(misses, 0.9);
  std::sort(tofs.begin(), tofs.end());
  m.tof.min = tofs.front();
  m.tof.max = tofs.back();
  m.tof.median = nearest_rank(tofs, 0.5);
  return m;
}

std::string pipeline_label(const Config& config) {
  return std::string(localizer_kind_name(config.pipeline.localizer)) + "+" +
         predictor_kind_name(config.pipeline.predictor);
}

int resolve_threads(int configured) {
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

ExperimentResult run_experiment(const Config& config, const LoadedModels& models,
                                int n_throws) {
  if (n_throws < 1) throw std::invalid_argument("run_experiment: need n >= 1");

  ExperimentResult result;
  result.episodes.resize(n_throws);

  // Episodes are independent; each one derives everything from its own seed
  // substream, so any shard/thread assignment produces identical results.
  const int threads = std::min(resolve_threads(config.threads), n_throws);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n_throws; i = next.fetch_add(1))
          result.episodes[i] =
              run_episode(config, models, substream_seed(config.seed, i));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  result.metrics = aggregate(pipeline_label(config), result.episodes);
  return result;
}

std::array<ExperimentResult, 4> compare_pipelines(const Config& config,
                                                  const LoadedModels& models,
                                                  int n_throws) {
  std::array<ExperimentResult, 4> results;
  int slot = 0;
  for (const LocalizerKind localizer : {LocalizerKind::ColorFilter, LocalizerKind::Cnn}) {
    for (const PredictorKind predictor :
         {PredictorKind::Ballistic, PredictorKind::Cnn}) {
      Config variant = config;  // same seed: paired throws across variants
      variant.pipeline.localizer = localizer;
      variant.pipeline.predictor = predictor;
      results[slot++] = run_experiment(variant, models, n_throws);
    }
  }
  return results;
}

std::vector<TofRow> tof_report(const Config& config, int n_per_distance) {
  if (config.tof_bands.size() != config.throws.classes.size())
    throw std::invalid_argument("tof_report: tof_bands must match throws.classes");

  std::vector<TofRow> rows;
  for (std::size_t cls = 0; cls < config.throws.classes.size(); ++cls) {
    ThrowConfig single = config.throws;
    single.classes = {config.throws.classes[cls]};

    std::vector<double> tofs;
    for (int i = 0; i < n_per_distance; ++i) {
      Rng rng(substream_seed(config.seed ^ (0x70F0 + cls), i));
      tofs.push_back(sample_throw(single, rng).tof);
    }
    std::sort(tofs.begin(), tofs.end());

    TofRow row;
    row.distance = config.throws.classes[cls].distance;
    row.n = n_per_distance;
    row.tof_min = tofs.front();
    row.tof_max = tofs.back();
    row.tof_median = nearest_rank(tofs, 0.5);
    row.band_lo = config.tof_bands[cls].lo;
    row.band_hi = config.tof_bands[cls].hi;
    row.in_band = row.tof_median >= row.band_lo && row.tof_median <= row.band_hi;
    rows.push_back(row);
  }
  return rows;
}

std::vector<BlurRow> blur_study(const Config& config, const nn::Network& localizer) {
  // Clean frames at the study's blur levels over a shared set of in-view
  // positions; both localizers see identical frames per level.
  models::LocalizerDataGenConfig gen;
  gen.throws = config.throws;
  gen.sensors = config.sensors;
  gen.seed = config.seed ^ 0xB10B;
  gen.n_train = config.blur_study.n_frames;
  gen.n_val = 1;
  gen.n_test = 1;
  gen.scale = 1.0;
  gen.blur_zero_fraction = 1.0;  // blur comes from the study level instead
  gen.brightness_min = gen.brightness_max = 1.0;
  const auto dataset = gen_localizer_data(gen);

  std::vector<BlurRow> rows;
  for (int level : config.blur_study.levels) {
    BlurRow row;
    row.blur_len = level;
    double color_sum = 0.0, cnn_sum = 0.0;
    int color_n = 0;
    for (const auto& sample : dataset.train) {
      models::LocalizerSample variant = sample;
      variant.blur_len = level;
      const sensors::Frame frame = render_localizer_sample(variant, config.sensors);

      const auto color = sensors::color_filter_localize(
          frame, config.sensors.hsv, config.sensors.camera,
          config.sensors.min_residue_pixels);
      if (color) {
        color_sum += (color->position - sample.position).norm();
        ++color_n;
      }
      const Vec3 cnn = models::localize_with_network(localizer, frame,
                                                     config.localizer_spec.depth_range);
      cnn_sum += (cnn - sample.position).norm();
    }
    row.color_mean_error = color_n > 0 ? color_sum / color_n : 0.0;
    row.cnn_mean_error = cnn_sum / dataset.train.size();
    row.n_color = color_n;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace piglet::harness
