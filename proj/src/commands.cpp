#include "piglet/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace piglet::harness {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json metrics_json(const Metrics& m) {
  return {{"pipeline", m.label},
          {"n", m.n},
          {"catch_rate", m.catch_rate},
          {"miss", {{"mean", m.miss.mean}, {"p50", m.miss.p50}, {"p90", m.miss.p90}}},
          {"tof", {{"min", m.tof.min}, {"max", m.tof.max}, {"median", m.tof.median}}}};
}

std::string episodes_csv(const std::vector<EpisodeResult>& episodes) {
  csvio::CsvWriter w(
      "episode,seed,success,miss_distance,t_cross,tof,n_camera,n_radar,"
      "required_travel,clamped_goals,n_predictions");
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const auto& e = episodes[i];
    w.field(static_cast<long long>(i));
    w.field(e.seed);
    w.field(e.outcome.success ? 1 : 0);
    w.field(e.outcome.miss_distance);
    w.field(e.outcome.t_cross);
    w.field(e.tof);
    w.field(e.n_camera);
    w.field(e.n_radar);
    w.field(e.required_travel);
    w.field(e.clamped_goals);
    w.field(static_cast<int>(e.predictions.size()));
    w.end_row();
  }
  return w.text();
}

json training_json(const models::TrainCurve& curve) {
  json j;
  j["epochs"] = curve.train_loss.size();
  j["final_train_loss"] = curve.train_loss.empty() ? 0.0 : curve.train_loss.back();
  j["final_val_loss"] = curve.val_loss.empty() ? 0.0 : curve.val_loss.back();
  return j;
}

void write_losses_csv(const std::string& path, const models::TrainCurve& curve) {
  csvio::CsvWriter w("epoch,train_loss,val_loss");
  for (std::size_t i = 0; i < curve.train_loss.size(); ++i) {
    w.field(static_cast<long long>(i));
    w.field(curve.train_loss[i]);
    w.field(i < curve.val_loss.size() ? curve.val_loss[i] : 0.0);
    w.end_row();
  }
  w.write(path);
}

models::TrajectoryDataGenConfig trajectory_gen_config(const Config& config) {
  models::TrajectoryDataGenConfig gen;
  gen.throws = config.throws;
  gen.sensors = config.sensors;
  gen.n_train = config.trajectory_data.n_train;
  gen.n_val = config.trajectory_data.n_val;
  gen.n_test = config.trajectory_data.n_test;
  gen.label_source = config.training.label_source;
  gen.seed = config.seed;
  return gen;
}

models::LocalizerDataGenConfig localizer_gen_config(const Config& config) {
  models::LocalizerDataGenConfig gen;
  gen.throws = config.throws;
  gen.sensors = config.sensors;
  gen.n_train = config.localizer_data.n_train;
  gen.n_val = config.localizer_data.n_val;
  gen.n_test = config.localizer_data.n_test;
  gen.scale = config.localizer_data.scale;
  gen.brightness_min = config.localizer_data.brightness_min;
  gen.brightness_max = config.localizer_data.brightness_max;
  gen.blur_max = config.localizer_data.blur_max;
  gen.blur_zero_fraction = config.localizer_data.blur_zero_fraction;
  gen.seed = config.seed;
  return gen;
}

std::string trajectory_split_csv(const std::vector<models::TrajectorySample>& split) {
  csvio::CsvWriter w("traj,t,x,y,z,source");
  for (std::size_t traj = 0; traj < split.size(); ++traj) {
    for (const auto& d : split[traj].detections) {
      w.field(static_cast<long long>(traj));
      w.field(d.t);
      w.field(d.position.x);
      w.field(d.position.y);
      w.field(d.position.z);
      w.field(static_cast<int>(d.source));
      w.end_row();
    }
  }
  return w.text();
}

std::string trajectory_labels_csv(const std::vector<models::TrajectorySample>& split) {
  csvio::CsvWriter w("traj,label_x,label_y,t_cross,plane_z");
  for (std::size_t traj = 0; traj < split.size(); ++traj) {
    const auto& s = split[traj];
    w.field(static_cast<long long>(traj));
    w.field(s.label_x);
    w.field(s.label_y);
    w.field(s.t_cross);
    w.field(s.plane_z);
    w.end_row();
  }
  return w.text();
}

std::vector<models::TrajectorySample> read_trajectory_split(const std::string& dir,
                                                            const std::string& split) {
  std::vector<int> ids;
  const auto detections = csvio::read_detections_csv(join(dir, split + ".csv"), &ids);

  std::vector<models::TrajectorySample> samples;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const int id = ids[i];
    if (id < 0) throw std::runtime_error("negative trajectory id in " + split);
    if (static_cast<std::size_t>(id) >= samples.size()) samples.resize(id + 1);
    samples[id].detections.push_back(detections[i]);
  }

  std::ifstream in(join(dir, split + "_labels.csv"));
  if (!in) throw std::runtime_error("cannot open " + join(dir, split + "_labels.csv"));
  std::string line;
  std::getline(in, line);
  if (line != "traj,label_x,label_y,t_cross,plane_z")
    throw std::runtime_error("unexpected labels header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    auto next = [&] {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("short labels row");
      return cell;
    };
    const int id = std::stoi(next());
    if (id < 0 || static_cast<std::size_t>(id) >= samples.size())
      throw std::runtime_error("labels row for unknown trajectory");
    samples[id].label_x = std::stod(next());
    samples[id].label_y = std::stod(next());
    samples[id].t_cross = std::stod(next());
    samples[id].plane_z = std::stod(next());
  }
  return samples;
}

// The interceptor's training/validation snapshot machinery, shared by the
// train command and the acceptance suite.
struct PreparedTraining {
  std::vector<models::TrajectorySample> augmented_train;
  models::SnapshotSet train_snapshots;
  models::SnapshotSet val_snapshots;
};

}  // namespace

OwnedModels load_models(const Config& config, bool need_localizer,
                        bool need_interceptor) {
  OwnedModels models;
  if (need_localizer) {
    if (config.localizer_weights.empty())
      throw std::runtime_error(
          "missing weights for the CNN localizer: set models.localizer.weights");
    models.localizer = models::build_localizer(config.localizer_spec);
    nn::load_into(*models.localizer, config.localizer_weights);
  }
  if (need_interceptor) {
    if (config.interceptor_weights.empty())
      throw std::runtime_error(
          "missing weights for the CNN interceptor: set models.interceptor.weights");
    models.interceptor = models::build_interceptor(config.interceptor_spec);
    nn::load_into(*models.interceptor, config.interceptor_weights);
  }
  return models;
}

json cmd_simulate(const Config& config, const std::string& out_dir) {
  const OwnedModels owned =
      load_models(config, config.pipeline.localizer == LocalizerKind::Cnn,
                  config.pipeline.predictor == PredictorKind::Cnn);
  EpisodeTrace trace;
  const EpisodeResult episode = run_episode(config, owned.view(), config.seed, &trace);

  json summary = {{"command", "simulate"},
                  {"seed", episode.seed},
                  {"pipeline", std::string(localizer_kind_name(config.pipeline.localizer)) +
                                   "+" + predictor_kind_name(config.pipeline.predictor)},
                  {"success", episode.outcome.success},
                  {"miss_distance", episode.outcome.miss_distance},
                  {"t_cross", episode.outcome.t_cross},
                  {"tof", episode.tof},
                  {"n_camera", episode.n_camera},
                  {"n_radar", episode.n_radar},
                  {"n_predictions", episode.predictions.size()},
                  {"required_travel", episode.required_travel},
                  {"clamped_goals", episode.clamped_goals},
                  {"true_crossing", {trace.true_crossing.x, trace.true_crossing.y}}};

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    csvio::write_detections_csv(join(out_dir, "detections.csv"), trace.detections);
    csvio::write_robot_trace_csv(join(out_dir, "robot.csv"), trace.robot);

    csvio::CsvWriter object("t,x,y,z,vx,vy,vz");
    for (const auto& s : trace.object.samples) {
      object.field(s.t);
      object.field(s.position.x);
      object.field(s.position.y);
      object.field(s.position.z);
      object.field(s.velocity.x);
      object.field(s.velocity.y);
      object.field(s.velocity.z);
      object.end_row();
    }
    object.write(join(out_dir, "object.csv"));

    csvio::CsvWriter predictions("t_delivered,t_requested,x,y,z_plane,t_cross,source");
    for (const auto& p : episode.predictions) {
      predictions.field(p.t_delivered);
      predictions.field(p.t_requested);
      predictions.field(p.point.x);
      predictions.field(p.point.y);
      predictions.field(p.point.z_plane);
      predictions.field(p.point.t_cross);
      predictions.field(static_cast<int>(p.point.source));
      predictions.end_row();
    }
    predictions.write(join(out_dir, "predictions.csv"));
    write_json(join(out_dir, "episode.json"), summary);
  }
  return summary;
}

json cmd_eval(const Config& config, int n_throws, const std::string& out_dir) {
  const OwnedModels owned =
      load_models(config, config.pipeline.localizer == LocalizerKind::Cnn,
                  config.pipeline.predictor == PredictorKind::Cnn);
  const ExperimentResult result = run_experiment(config, owned.view(), n_throws);

  json summary = {{"command", "eval"}, {"seed", config.seed}};
  summary.update(metrics_json(result.metrics));

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_text(join(out_dir, "episodes.csv"), episodes_csv(result.episodes));
    write_json(join(out_dir, "summary.json"), summary);
  }
  return summary;
}

json cmd_compare(const Config& config, int n_throws, const std::string& out_dir) {
  const bool any_cnn_localizer = true;  // all four combinations run
  const OwnedModels owned = load_models(config, any_cnn_localizer, true);
  const auto results = compare_pipelines(config, owned.view(), n_throws);

  json pipelines = json::array();
  for (const auto& r : results) pipelines.push_back(metrics_json(r.metrics));
  json summary = {{"command", "compare"},
                  {"seed", config.seed},
                  {"n", n_throws},
                  {"paired", true},
                  {"pipelines", pipelines}};

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    csvio::CsvWriter w(
        "pipeline,n,catch_rate,miss_mean,miss_p50,miss_p90,tof_min,tof_max,tof_median");
    for (const auto& r : results) {
      w.field(r.metrics.label);
      w.field(r.metrics.n);
      w.field(r.metrics.catch_rate);
      w.field(r.metrics.miss.mean);
      w.field(r.metrics.miss.p50);
      w.field(r.metrics.miss.p90);
      w.field(r.metrics.tof.min);
      w.field(r.metrics.tof.max);
      w.field(r.metrics.tof.median);
      w.end_row();
    }
    w.write(join(out_dir, "comparison.csv"));
    for (std::size_t i = 0; i < results.size(); ++i)
      write_text(join(out_dir, "episodes_" + results[i].metrics.label + ".csv"),
                 episodes_csv(results[i].episodes));
    write_json(join(out_dir, "summary.json"), summary);
  }
  return summary;
}

json cmd_tof(const Config& config, int n_per_distance, const std::string& out_dir,
             bool* ok) {
  const auto rows = tof_report(config, n_per_distance);

  bool all_in_band = true;
  json jrows = json::array();
  for (const auto& r : rows) {
    all_in_band = all_in_band && r.in_band;
    jrows.push_back({{"distance", r.distance},
                     {"n", r.n},
                     {"tof_min", r.tof_min},
                     {"tof_max", r.tof_max},
                     {"tof_median", r.tof_median},
                     {"band", {r.band_lo, r.band_hi}},
                     {"in_band", r.in_band}});
  }
  json summary = {{"command", "tof"},
                  {"seed", config.seed},
                  {"rows", jrows},
                  {"all_in_band", all_in_band}};
  if (ok) *ok = all_in_band;

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    csvio::CsvWriter w("distance,n,tof_min,tof_max,tof_median,band_lo,band_hi,in_band");
    for (const auto& r : rows) {
      w.field(r.distance);
      w.field(r.n);
      w.field(r.tof_min);
      w.field(r.tof_max);
      w.field(r.tof_median);
      w.field(r.band_lo);
      w.field(r.band_hi);
      w.field(r.in_band ? 1 : 0);
      w.end_row();
    }
    w.write(join(out_dir, "tof.csv"));
    write_json(join(out_dir, "summary.json"), summary);
  }
  return summary;
}

json cmd_blur_study(const Config& config, const std::string& out_dir) {
  const OwnedModels owned = load_models(config, true, false);
  const auto rows = blur_study(config, *owned.localizer);

  json jrows = json::array();
  for (const auto& r : rows)
    jrows.push_back({{"blur_len", r.blur_len},
                     {"color_mean_error", r.color_mean_error},
                     {"cnn_mean_error", r.cnn_mean_error},
                     {"n_color_detections", r.n_color}});
  json summary = {{"command", "blur-study"},
                  {"seed", config.seed},
                  {"n_frames", config.blur_study.n_frames},
                  {"rows", jrows}};

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    csvio::CsvWriter w("blur_len,color_mean_error,cnn_mean_error,n_color_detections");
    for (const auto& r : rows) {
      w.field(r.blur_len);
      w.field(r.color_mean_error);
      w.field(r.cnn_mean_error);
      w.field(r.n_color);
      w.end_row();
    }
    w.write(join(out_dir, "blur.csv"));
    write_json(join(out_dir, "summary.json"), summary);
  }
  return summary;
}

json cmd_gradcheck(const Config& config, const std::string& out_dir, bool* ok) {
  struct Check {
    std::string name;
    nn::GradCheckReport report;
  };
  std::vector<Check> checks;

  auto run_check = [&checks](const std::string& name, nn::Network net,
                             std::uint64_t seed) {
    net.init_params(seed);
    Rng rng(seed + 1);
    nn::Tensor input(net.input_shape());
    for (auto& v : input.values) {
      const double mag = rng.uniform(0.1, 1.0);
      v = static_cast<float>(rng.uniform() < 0.5 ? -mag : mag);
    }
    nn::Tensor target(net.output_shape());
    for (auto& v : target.values) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    checks.push_back({name, nn::gradient_check(net, input, target, 1e-4)});
  };

  {
    nn::Network net;
    net.add(nn::make_dense(9, 5));
    net.bind({9});
    run_check("dense", std::move(net), 101);
  }
  {
    nn::Network net;
    net.add(nn::make_conv1d(5, 6, 3));
    net.add(nn::make_prelu(6));
    net.bind({5, 10});
    run_check("conv1d+prelu", std::move(net), 102);
  }
  {
    nn::Network net;
    net.add(nn::make_conv2d(3, 4, 3));
    net.bind({3, 8, 9});
    run_check("conv2d", std::move(net), 103);
  }
  {
    nn::Network net;
    net.add(nn::make_conv2d(1, 2, 3));
    net.add(nn::make_maxpool2d());
    net.add(nn::make_flatten());
    net.add(nn::make_dense(2 * 3 * 3, 4));
    net.bind({1, 8, 8});
    run_check("maxpool2d (via conv+dense)", std::move(net), 104);
  }
  {
    nn::Network net;
    net.add(nn::make_prelu(7));
    net.bind({7});
    run_check("prelu", std::move(net), 105);
  }
  {
    // The localizer architecture at its smallest composing input with thin
    // channels, keeping the parameter count inside the oracle's budget.
    models::LocalizerSpec spec = config.localizer_spec;
    spec.input_height = 46;
    spec.input_width = 46;
    spec.conv_channels = {3, 4, 5, 6};
    spec.dense_width = 8;
    run_check("localizer (reduced)", models::build_localizer(spec), 106);
  }
  {
    models::InterceptorSpec spec = config.interceptor_spec;
    spec.conv_channels = 16;
    spec.dense1 = 32;
    spec.dense2 = 16;
    run_check("interceptor (reduced)", models::build_interceptor(spec), 107);
  }

  bool all_pass = true;
  double worst = 0.0;
  json jchecks = json::array();
  for (const auto& c : checks) {
    all_pass = all_pass && c.report.pass;
    worst = std::max(worst, c.report.max_rel_error);
    jchecks.push_back({{"name", c.name},
                       {"max_rel_error", c.report.max_rel_error},
                       {"n_params", c.report.n_params},
                       {"worst_param", c.report.worst_param},
                       {"pass", c.report.pass}});
  }
  json summary = {{"command", "gradcheck"},
                  {"tolerance", 1e-4},
                  {"checks", jchecks},
                  {"max_rel_error", worst},
                  {"pass", all_pass}};
  if (ok) *ok = all_pass;

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_json(join(out_dir, "gradcheck.json"), summary);
  }
  return summary;
}

void write_trajectory_dataset(const models::TrajectoryDataset& dataset,
                              const Config& config, const std::string& out_dir) {
  ensure_dir(out_dir);
  write_text(join(out_dir, "train.csv"), trajectory_split_csv(dataset.train));
  write_text(join(out_dir, "val.csv"), trajectory_split_csv(dataset.val));
  write_text(join(out_dir, "test.csv"), trajectory_split_csv(dataset.test));
  write_text(join(out_dir, "train_labels.csv"), trajectory_labels_csv(dataset.train));
  write_text(join(out_dir, "val_labels.csv"), trajectory_labels_csv(dataset.val));
  write_text(join(out_dir, "test_labels.csv"), trajectory_labels_csv(dataset.test));

  json manifest = {{"kind", "trajectory"},
                   {"splits",
                    {{"train", dataset.train.size()},
                     {"val", dataset.val.size()},
                     {"test", dataset.test.size()}}},
                   {"label_source", config.training.label_source == models::LabelSource::Truth
                                        ? "truth"
                                        : "baseline"},
                   {"config", json::parse(config_to_json_text(config))}};
  write_json(join(out_dir, "manifest.json"), manifest);
}

models::TrajectoryDataset read_trajectory_dataset(const std::string& dir) {
  if (!fs::exists(join(dir, "manifest.json")))
    throw std::runtime_error("not a dataset directory (no manifest.json): " + dir);
  models::TrajectoryDataset dataset;
  dataset.train = read_trajectory_split(dir, "train");
  dataset.val = read_trajectory_split(dir, "val");
  dataset.test = read_trajectory_split(dir, "test");
  return dataset;
}

json cmd_gen_trajectory_data(const Config& config, const std::string& out_dir) {
  const auto dataset = gen_trajectory_data(trajectory_gen_config(config));
  if (!out_dir.empty()) write_trajectory_dataset(dataset, config, out_dir);
  return {{"command", "gen-trajectory-data"},
          {"seed", config.seed},
          {"train", dataset.train.size()},
          {"val", dataset.val.size()},
          {"test", dataset.test.size()}};
}

void write_localizer_dataset(const models::LocalizerDataset& dataset,
                             const Config& config, const std::string& out_dir) {
  ensure_dir(out_dir);
  auto split_csv = [](const std::vector<models::LocalizerSample>& split) {
    csvio::CsvWriter w("frame,label_x,label_y,label_z,render_seed,brightness,blur_len");
    for (std::size_t i = 0; i < split.size(); ++i) {
      w.field(static_cast<long long>(i));
      w.field(split[i].position.x);
      w.field(split[i].position.y);
      w.field(split[i].position.z);
      w.field(split[i].render_seed);
      w.field(split[i].brightness);
      w.field(split[i].blur_len);
      w.end_row();
    }
    return w.text();
  };
  write_text(join(out_dir, "train.csv"), split_csv(dataset.train));
  write_text(join(out_dir, "val.csv"), split_csv(dataset.val));
  write_text(join(out_dir, "test.csv"), split_csv(dataset.test));

  // Frames regenerate bit-exactly from (render_seed, conditions) plus the
  // camera/object settings recorded here.
  json manifest = {{"kind", "localizer"},
                   {"splits",
                    {{"train", dataset.train.size()},
                     {"val", dataset.val.size()},
                     {"test", dataset.test.size()}}},
                   {"config", json::parse(config_to_json_text(config))}};
  write_json(join(out_dir, "manifest.json"), manifest);
}

models::LocalizerDataset read_localizer_dataset(const std::string& dir) {
  if (!fs::exists(join(dir, "manifest.json")))
    throw std::runtime_error("not a dataset directory (no manifest.json): " + dir);
  auto read_split = [&](const std::string& split) {
    std::ifstream in(join(dir, split + ".csv"));
    if (!in) throw std::runtime_error("cannot open " + join(dir, split + ".csv"));
    std::string line;
    std::getline(in, line);
    if (line != "frame,label_x,label_y,label_z,render_seed,brightness,blur_len")
      throw std::runtime_error("unexpected localizer dataset header: " + line);
    std::vector<models::LocalizerSample> samples;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string cell;
      auto next = [&] {
        if (!std::getline(row, cell, ',')) throw std::runtime_error("short dataset row");
        return cell;
      };
      next();  // frame index
      models::LocalizerSample s;
      s.position.x = std::stod(next());
      s.position.y = std::stod(next());
      s.position.z = std::stod(next());
      s.render_seed = std::stoull(next());
      s.brightness = std::stod(next());
      s.blur_len = std::stoi(next());
      samples.push_back(s);
    }
    return samples;
  };
  models::LocalizerDataset dataset;
  dataset.train = read_split("train");
  dataset.val = read_split("val");
  dataset.test = read_split("test");
  return dataset;
}

json cmd_gen_localizer_data(const Config& config, const std::string& out_dir) {
  const auto dataset = gen_localizer_data(localizer_gen_config(config));
  if (!out_dir.empty()) write_localizer_dataset(dataset, config, out_dir);
  return {{"command", "gen-localizer-data"},
          {"seed", config.seed},
          {"train", dataset.train.size()},
          {"val", dataset.val.size()},
          {"test", dataset.test.size()}};
}

json cmd_train_interceptor(const Config& config, const std::string& data_dir,
                           const std::string& out_dir) {
  const models::TrajectoryDataset dataset =
      data_dir.empty() ? gen_trajectory_data(trajectory_gen_config(config))
                       : read_trajectory_dataset(data_dir);
  if (dataset.train.empty()) throw std::runtime_error("train split is empty");

  const auto augmented = models::augment_trajectories(
      dataset.train, config.training.augment_factor, config.training.shift_range,
      substream_seed(config.seed, 0xA119));

  const auto train_snapshots = models::make_snapshots(augmented,
                                                      config.interceptor_spec.window);
  const auto val_snapshots = models::make_snapshots(dataset.val,
                                                    config.interceptor_spec.window);
  const auto test_snapshots = models::make_snapshots(dataset.test,
                                                     config.interceptor_spec.window);

  auto net = models::build_interceptor(config.interceptor_spec);
  net.init_params(substream_seed(config.seed, 0x1417));

  models::TrainConfig train_config;
  train_config.epochs = config.training.epochs;
  train_config.lr = config.training.lr;
  train_config.batch_size = config.training.batch_size;
  train_config.seed = substream_seed(config.seed, 0x7A417);
  const auto curve = models::train_network(net, train_snapshots.source(),
                                           val_snapshots.source(), train_config);

  const auto val_rmse = models::interceptor_rmse(net, val_snapshots);
  const auto test_rmse = models::interceptor_rmse(net, test_snapshots);

  json summary = {{"command", "train-interceptor"},
                  {"seed", config.seed},
                  {"trajectories",
                   {{"train", dataset.train.size()},
                    {"train_augmented", augmented.size()},
                    {"val", dataset.val.size()},
                    {"test", dataset.test.size()}}},
                  {"snapshots",
                   {{"train", train_snapshots.count()}, {"val", val_snapshots.count()}}},
                  {"val_rmse", {{"x", val_rmse.x}, {"y", val_rmse.y}}},
                  {"test_rmse", {{"x", test_rmse.x}, {"y", test_rmse.y}}}};
  summary.update(training_json(curve));

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    nn::save_weights(net, join(out_dir, "interceptor.pgnn"));
    write_losses_csv(join(out_dir, "losses.csv"), curve);
    write_json(join(out_dir, "summary.json"), summary);
    summary["weights"] = join(out_dir, "interceptor.pgnn");
  }
  return summary;
}

json cmd_train_localizer(const Config& config, const std::string& data_dir,
                         const std::string& out_dir) {
  const models::LocalizerDataset dataset =
      data_dir.empty() ? gen_localizer_data(localizer_gen_config(config))
                       : read_localizer_dataset(data_dir);
  if (dataset.train.empty()) throw std::runtime_error("train split is empty");

  auto net = models::build_localizer(config.localizer_spec);
  net.init_params(substream_seed(config.seed, 0x10C));

  const float depth_range = config.localizer_spec.depth_range;
  const auto train_src = models::localizer_source(dataset.train, config.sensors, depth_range);
  const auto val_src = models::localizer_source(dataset.val, config.sensors, depth_range);

  models::TrainConfig train_config;
  train_config.epochs = config.training.epochs;
  train_config.lr = config.training.lr;
  train_config.batch_size = config.training.batch_size;
  train_config.seed = substream_seed(config.seed, 0x7A10C);
  const auto curve = models::train_network(net, train_src, val_src, train_config);

  const double val_error =
      models::localizer_mean_error(net, dataset.val, config.sensors, depth_range);
  const double test_error =
      models::localizer_mean_error(net, dataset.test, config.sensors, depth_range);

  json summary = {{"command", "train-localizer"},
                  {"seed", config.seed},
                  {"frames",
                   {{"train", dataset.train.size()},
                    {"val", dataset.val.size()},
                    {"test", dataset.test.size()}}},
                  {"val_mean_error", val_error},
                  {"test_mean_error", test_error}};
  summary.update(training_json(curve));

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    nn::save_weights(net, join(out_dir, "localizer.pgnn"));
    write_losses_csv(join(out_dir, "losses.csv"), curve);
    write_json(join(out_dir, "summary.json"), summary);
    summary["weights"] = join(out_dir, "localizer.pgnn");
  }
  return summary;
}

}  // namespace piglet::harness
