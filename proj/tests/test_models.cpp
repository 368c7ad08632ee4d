#include <cmath>

#include "doctest.h"
#include "piglet/models.hpp"

using namespace piglet;
using namespace piglet::models;
using piglet::sensors::Detection;
using piglet::sensors::DetectionBuffer;
using piglet::sensors::Source;

namespace {

TrajectoryDataGenConfig fast_gen_config(int train, int val, int test,
                                        bool ideal = true, double drag = 0.0) {
  TrajectoryDataGenConfig config;
  config.sensors.ideal = ideal;
  config.throws.drag_coeff = drag;
  config.n_train = train;
  config.n_val = val;
  config.n_test = test;
  config.seed = 7;
  return config;
}

Detection det(double t, double x, double y, double z, Source s = Source::Camera) {
  return Detection{{x, y, z}, t, s};
}

float at(const nn::Tensor& t, int feature, int step) {
  return t.values[static_cast<std::size_t>(feature) * 10 + step];
}

}  // namespace

TEST_CASE("localizer composes from the default frame size down to (3)") {
  LocalizerSpec spec;
  auto net = build_localizer(spec);
  CHECK(net.output_shape() == nn::Shape{3});
  nn::Tensor frame({4, 60, 80});
  net.init_params(3);
  const auto out = net.predict(frame);
  CHECK(out.size() == 3);
}

TEST_CASE("localizer composes at the full sensor resolution" * doctest::timeout(120)) {
  LocalizerSpec spec;
  spec.input_height = 480;
  spec.input_width = 640;
  auto net = build_localizer(spec);
  net.init_params(1);
  nn::Tensor frame({4, 480, 640});
  const auto out = net.predict(frame);
  CHECK(out.size() == 3);
  for (float v : out.values) CHECK(std::isfinite(v));
}

TEST_CASE("localizer rejects non-composable sizes") {
  LocalizerSpec spec;
  spec.input_height = 12;
  spec.input_width = 16;
  CHECK_THROWS_AS(build_localizer(spec), std::invalid_argument);
}

TEST_CASE("interceptor maps a 10x5 window to 2 outputs and behaves on zeros") {
  InterceptorSpec spec;
  auto net = build_interceptor(spec);
  CHECK(net.output_shape() == nn::Shape{2});
  net.init_params(11);
  const auto out = net.predict(nn::Tensor({5, 10}));
  CHECK(out.size() == 2);
  CHECK(std::isfinite(out.values[0]));
  CHECK(std::isfinite(out.values[1]));
}

TEST_CASE("gradient check passes for reduced variants of both architectures") {
  {
    LocalizerSpec spec;
    spec.input_height = 46;
    spec.input_width = 46;
    spec.conv_channels = {3, 4, 5, 6};
    spec.dense_width = 8;
    auto net = build_localizer(spec);
    net.init_params(21);
    CHECK(net.param_count() < 10000);
    nn::Tensor input({4, 46, 46});
    Rng rng(5);
    for (auto& v : input.values) v = static_cast<float>(rng.uniform(0.05, 1.0));
    nn::Tensor target({3}, {0.1f, 0.4f, 2.0f});
    const auto report = nn::gradient_check(net, input, target, 1e-4);
    CAPTURE(report.worst_param);
    CHECK(report.pass);
  }
  {
    InterceptorSpec spec;
    spec.conv_channels = 8;
    spec.dense1 = 16;
    spec.dense2 = 8;
    auto net = build_interceptor(spec);
    net.init_params(22);
    CHECK(net.param_count() < 10000);
    nn::Tensor input({5, 10});
    Rng rng(6);
    for (auto& v : input.values) v = static_cast<float>(rng.uniform(0.05, 1.0));
    nn::Tensor target({2}, {0.2f, 0.5f});
    const auto report = nn::gradient_check(net, input, target, 1e-4);
    CAPTURE(report.worst_param);
    CHECK(report.pass);
  }
}

TEST_CASE("pack_features pads, windows and flags") {
  DetectionBuffer buffer;
  buffer.push(det(0.10, 1.0, 2.0, 5.0, Source::Camera));
  buffer.push(det(0.15, 1.1, 2.1, 4.8, Source::Radar));
  buffer.push(det(0.20, 1.2, 2.2, 4.6, Source::Camera));

  SUBCASE("three detections leave the first seven steps zero") {
    const auto t = pack_features(buffer);
    for (int step = 0; step < 7; ++step)
      for (int f = 0; f < 5; ++f) CHECK(at(t, f, step) == 0.0f);
    CHECK(at(t, 0, 7) == doctest::Approx(1.0));
    CHECK(at(t, 3, 7) == doctest::Approx(0.0));   // elapsed of the first detection
    CHECK(at(t, 4, 8) == doctest::Approx(1.0));   // radar flag
    CHECK(at(t, 4, 9) == doctest::Approx(0.0));   // camera flag
    CHECK(at(t, 3, 9) == doctest::Approx(0.10));  // elapsed since episode start
    CHECK(at(t, 2, 9) == doctest::Approx(4.6));
  }

  SUBCASE("fourteen detections keep exactly the last ten") {
    for (int i = 3; i < 14; ++i)
      buffer.push(det(0.10 + 0.05 * i, 1.0 + 0.1 * i, 2.0, 5.0 - 0.2 * i));
    const auto t = pack_features(buffer);
    // First window entry is detection index 4 (14 - 10).
    CHECK(at(t, 0, 0) == doctest::Approx(1.4));
    CHECK(at(t, 0, 9) == doctest::Approx(2.3));
    // Elapsed stays relative to the episode's first detection, not the window's.
    CHECK(at(t, 3, 0) == doctest::Approx(0.10 + 0.05 * 4 - 0.10));
  }

  SUBCASE("flags reproduce the source sequence") {
    const auto t = pack_features(buffer);
    CHECK(at(t, 4, 7) == 0.0f);
    CHECK(at(t, 4, 8) == 1.0f);
    CHECK(at(t, 4, 9) == 0.0f);
  }

  DetectionBuffer empty;
  CHECK_THROWS_AS(pack_features(empty), std::invalid_argument);
}

TEST_CASE("augmentation counts: 379 trajectories times 5 gives 1895") {
  std::vector<TrajectorySample> trajectories(379);
  for (auto& t : trajectories) {
    t.detections = {det(0.0, 0, 1, 5), det(0.1, 0, 1, 4.5), det(0.2, 0, 1, 4.0)};
    t.label_x = 0.1;
    t.label_y = 0.5;
  }
  const auto augmented = augment_trajectories(trajectories, 5, 0.4, 99);
  CHECK(augmented.size() == 1895);

  const auto identity = augment_trajectories(trajectories, 1, 0.4, 99);
  CHECK(identity.size() == trajectories.size());
  CHECK(identity[0].label_x == trajectories[0].label_x);
  CHECK(identity[0].detections[0].position.x == trajectories[0].detections[0].position.x);
}

TEST_CASE("shifts cancel between label and fitted interception") {
  // Build one noise-free ballistic trajectory sample.
  TrajectorySample traj;
  traj.plane_z = -0.4;
  for (int i = 0; i < 12; ++i) {
    const double t = 0.05 * i;
    traj.detections.push_back(
        det(t, 0.2 + 0.5 * t, 1.5 + 3.0 * t - 4.905 * t * t, 5.0 - 5.0 * t));
  }
  const double tau = (traj.plane_z - 5.0) / -5.0;
  traj.label_x = 0.2 + 0.5 * tau;
  traj.label_y = 1.5 + 3.0 * tau - 4.905 * tau * tau;

  auto fitted_residual = [](const TrajectorySample& s) {
    DetectionBuffer buffer;
    for (const auto& d : s.detections) buffer.push(d);
    const auto p = fit::predict_interception(fit::fit_trajectory(buffer, 9.81), s.plane_z);
    return std::pair<double, double>(s.label_x - p.x, s.label_y - p.y);
  };

  const auto base = fitted_residual(traj);
  const auto augmented = augment_trajectories({traj}, 6, 0.4, 3);
  for (const auto& copy : augmented) {
    const auto shifted = fitted_residual(copy);
    CHECK(shifted.first == doctest::Approx(base.first).epsilon(1e-9));
    CHECK(shifted.second == doctest::Approx(base.second).epsilon(1e-9));
  }
}

TEST_CASE("training memorizes a single sample") {
  InterceptorSpec spec;
  spec.conv_channels = 8;
  spec.dense1 = 16;
  spec.dense2 = 8;
  auto net = build_interceptor(spec);
  net.init_params(17);

  nn::Tensor input({5, 10});
  Rng rng(18);
  for (auto& v : input.values) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  const nn::Tensor target({2}, {0.25f, 0.6f});

  SampleSource one;
  one.count = 1;
  one.get = [&](int, nn::Tensor* in, nn::Tensor* tgt) {
    *in = input;
    *tgt = target;
  };
  TrainConfig config;
  config.epochs = 200;
  config.lr = 1e-2;  // one sample; large steps converge fastest
  config.batch_size = 1;
  const auto curve = train_network(net, one, one, config);
  CHECK(curve.train_loss.back() < 1e-4);
}

TEST_CASE("training is deterministic given the seed") {
  auto dataset = gen_trajectory_data(fast_gen_config(12, 2, 2));
  const auto snapshots = make_snapshots(dataset.train);
  const auto val = make_snapshots(dataset.val);

  TrainConfig config;
  config.epochs = 3;
  config.batch_size = 16;
  config.seed = 5;

  InterceptorSpec spec;
  spec.conv_channels = 8;
  spec.dense1 = 16;
  spec.dense2 = 8;

  auto run = [&] {
    auto net = build_interceptor(spec);
    net.init_params(55);
    return train_network(net, snapshots.source(), val.source(), config);
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.train_loss == b.train_loss);
  CHECK(a.val_loss == b.val_loss);
}

TEST_CASE("loss decreases over the first epochs on a synthetic dataset") {
  auto dataset = gen_trajectory_data(fast_gen_config(40, 4, 4, true, 0.03));
  const auto train = make_snapshots(dataset.train);
  const auto val = make_snapshots(dataset.val);

  auto net = build_interceptor(InterceptorSpec{});
  net.init_params(77);
  TrainConfig config;
  config.epochs = 11;
  config.lr = 1e-3;
  config.seed = 9;
  const auto curve = train_network(net, train.source(), val.source(), config);
  CHECK(curve.train_loss[10] < curve.train_loss[0]);
}

TEST_CASE("zero-noise labels match the baseline fit") {
  auto dataset = gen_trajectory_data(fast_gen_config(6, 1, 1, true, 0.0));
  for (const auto& sample : dataset.train) {
    DetectionBuffer buffer;
    for (const auto& d : sample.detections) buffer.push(d);
    const auto p = fit::predict_interception(fit::fit_trajectory(buffer, 9.81), sample.plane_z);
    CHECK(std::abs(p.x - sample.label_x) < 1e-6);
    CHECK(std::abs(p.y - sample.label_y) < 1e-6);
  }
}

TEST_CASE("dataset generation is deterministic and splits correctly") {
  const auto a = gen_trajectory_data(fast_gen_config(10, 3, 2));
  const auto b = gen_trajectory_data(fast_gen_config(10, 3, 2));
  CHECK(a.train.size() == 10);
  CHECK(a.val.size() == 3);
  CHECK(a.test.size() == 2);
  REQUIRE(a.train.size() == b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].label_x == b.train[i].label_x);
    REQUIRE(a.train[i].detections.size() == b.train[i].detections.size());
    for (std::size_t j = 0; j < a.train[i].detections.size(); ++j) {
      CHECK(a.train[i].detections[j].position.x == b.train[i].detections[j].position.x);
      CHECK(a.train[i].detections[j].t == b.train[i].detections[j].t);
    }
  }
}

TEST_CASE("localizer dataset renders deterministically with varied conditions") {
  LocalizerDataGenConfig config;
  config.scale = 0.004;  // tiny: ~22/2/2 samples
  config.seed = 13;
  const auto a = gen_localizer_data(config);
  const auto b = gen_localizer_data(config);
  REQUIRE(a.train.size() == b.train.size());
  CHECK(a.train.size() >= 20);

  bool any_blur = false, any_dim = false;
  sensors::SensorSetup setup;
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].render_seed == b.train[i].render_seed);
    CHECK(a.train[i].position.x == b.train[i].position.x);
    any_blur |= a.train[i].blur_len > 0;
    any_dim |= a.train[i].brightness < 0.95;
    const auto fa = render_localizer_sample(a.train[i], setup);
    const auto fb = render_localizer_sample(b.train[i], setup);
    CHECK(fa.data == fb.data);
  }
  CHECK(any_blur);
  CHECK(any_dim);
}

TEST_CASE("nn_predict_interception gates on buffer size and depth fit") {
  auto net = build_interceptor(InterceptorSpec{});
  net.init_params(1);

  DetectionBuffer buffer;
  CHECK_THROWS_AS(nn_predict_interception(net, buffer, -0.4, 9.81),
                  std::invalid_argument);

  buffer.push(det(0.0, 0, 1.5, 5.0));
  buffer.push(det(0.1, 0, 1.5, 4.5));
  CHECK_FALSE(nn_predict_interception(net, buffer, -0.4, 9.81).has_value());

  buffer.push(det(0.2, 0, 1.5, 4.0));
  const auto p = nn_predict_interception(net, buffer, -0.4, 9.81);
  REQUIRE(p.has_value());
  CHECK(p->source == fit::PredictorSource::Network);
  CHECK(std::isfinite(p->x));
  // Depth fit: z = 5 - 5 tau crosses -0.4 at tau = 1.08.
  CHECK(p->t_cross == doctest::Approx(1.08).epsilon(1e-9));

  DetectionBuffer receding;
  receding.push(det(0.0, 0, 1.5, 4.0));
  receding.push(det(0.1, 0, 1.5, 4.5));
  receding.push(det(0.2, 0, 1.5, 5.0));
  CHECK_FALSE(nn_predict_interception(net, receding, -0.4, 9.81).has_value());
}
