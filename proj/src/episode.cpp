#include <cmath>
#include <stdexcept>

#include "piglet/harness.hpp"

namespace piglet::harness {

namespace {

// Substream tags inside one episode. Throw sampling and sensor noise use the
// same tags in every pipeline variant, which is what makes paired
// comparisons see bitwise-identical throws.
constexpr std::uint64_t kThrowStream = 1;
constexpr std::uint64_t kSensorStream = 2;
constexpr std::uint64_t kLatencyStream = 3;

}  // namespace

EpisodeResult run_episode(const Config& config, const LoadedModels& models,
                          std::uint64_t seed, EpisodeTrace* trace) {
  using sensors::SensorSimulator;

  if (config.pipeline.localizer == LocalizerKind::Cnn && !models.localizer)
    throw std::runtime_error("run_episode: missing weights for the CNN localizer");
  if (config.pipeline.predictor == PredictorKind::Cnn && !models.interceptor)
    throw std::runtime_error("run_episode: missing weights for the CNN interceptor");

  Rng throw_rng(substream_seed(seed, kThrowStream));
  const SampledThrow thrown = sample_throw(config.throws, throw_rng);

  SensorSimulator::LocalizerHook hook;
  if (config.pipeline.localizer == LocalizerKind::Cnn) {
    const nn::Network* net = models.localizer;
    const float depth_range = config.localizer_spec.depth_range;
    hook = [net, depth_range](const sensors::Frame& frame) {
      return models::localize_with_network(*net, frame, depth_range);
    };
  }
  SensorSimulator sensor_sim(&thrown.trajectory, config.sensors,
                             substream_seed(seed, kSensorStream), hook);

  Rng latency_rng(substream_seed(seed, kLatencyStream));

  control::RobotState robot{config.controller.home, {0, 0, 0}};
  Vec3 goal = config.controller.home;

  sensors::DetectionBuffer buffer;
  EpisodeResult result;
  result.seed = seed;
  result.tof = thrown.crossing.t;
  result.required_travel = thrown.crossing.point.planar_distance(config.controller.home);

  std::vector<control::TraceSample> robot_trace;

  // Serialized prediction jobs: at most one in flight; a job reads the
  // buffer when it starts and delivers its result `latency` later. New
  // detections during a job queue exactly one refresh (latest buffer wins).
  bool job_inflight = false;
  std::int64_t job_done_tick = 0;
  double job_requested_at = 0.0;
  std::optional<fit::InterceptionPoint> job_result;
  std::size_t consumed_detections = 0;

  auto compute_prediction = [&]() -> std::optional<fit::InterceptionPoint> {
    try {
      if (config.pipeline.predictor == PredictorKind::Ballistic) {
        const auto estimate =
            fit::fit_trajectory(buffer, config.throws.gravity, config.fit.mode,
                                config.fit.camera_weight, config.fit.radar_weight);
        return fit::predict_interception(estimate, config.throws.plane_z);
      }
      return models::nn_predict_interception(*models.interceptor, buffer,
                                             config.throws.plane_z, config.throws.gravity);
    } catch (const std::runtime_error&) {
      return std::nullopt;  // not approaching / rank-deficient / plane passed
    }
  };

  auto deliver = [&](double t_now) {
    if (job_result) {
      const auto update = control::update_goal(*job_result, config.controller);
      goal = update.goal;
      if (update.clamped) ++result.clamped_goals;
      result.predictions.push_back({t_now, job_requested_at, *job_result});
    }
    job_inflight = false;
    job_result.reset();
  };

  const std::int64_t end_tick =
      static_cast<std::int64_t>(std::ceil(thrown.crossing.t * 1000.0));

  for (std::int64_t tick = 0; tick <= end_tick; ++tick) {
    const double t = tick * 1e-3;

    if (auto d = sensor_sim.poll_camera(tick)) {
      buffer.push(*d);
      ++result.n_camera;
    }
    if (auto d = sensor_sim.poll_radar(tick)) {
      buffer.push(*d);
      ++result.n_radar;
    }

    if (job_inflight && tick >= job_done_tick) deliver(t);

    if (!job_inflight &&
        buffer.size() >= static_cast<std::size_t>(config.pipeline.min_detections) &&
        buffer.size() > consumed_detections) {
      job_result = compute_prediction();
      job_requested_at = t;
      consumed_detections = buffer.size();
      const double latency =
          latency_rng.uniform(config.pipeline.latency_min, config.pipeline.latency_max);
      job_done_tick = tick + static_cast<std::int64_t>(std::llround(latency * 1000.0));
      job_inflight = true;
      if (job_done_tick <= tick) deliver(t);  // zero-latency configuration
    }

    robot_trace.push_back({t, robot.position, robot.velocity});
    const Vec3 command = control_step(robot, goal, config.controller);
    control::apply_command(&robot, command, config.controller);
  }

  result.outcome = control::evaluate_catch(robot_trace, thrown.trajectory,
                                           config.throws.plane_z, config.basket_radius);

  if (trace) {
    trace->detections = buffer.items;
    trace->robot = std::move(robot_trace);
    trace->object = thrown.trajectory;
    trace->true_crossing = thrown.crossing.point;
  }
  return result;
}

}  // namespace piglet::harness
