#include "piglet/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace piglet {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + " " + what);
}

void assign(const json& j, double* out, const std::string& path) {
  if (!j.is_number()) bad(path, "must be a number");
  *out = j.get<double>();
}
void assign(const json& j, float* out, const std::string& path) {
  double d;
  assign(j, &d, path);
  *out = static_cast<float>(d);
}
void assign(const json& j, int* out, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "must be an integer");
  *out = j.get<int>();
}
void assign(const json& j, std::uint64_t* out, const std::string& path) {
  if (!j.is_number_unsigned() && !j.is_number_integer()) bad(path, "must be an integer");
  *out = j.get<std::uint64_t>();
}
void assign(const json& j, bool* out, const std::string& path) {
  if (!j.is_boolean()) bad(path, "must be a boolean");
  *out = j.get<bool>();
}
void assign(const json& j, std::string* out, const std::string& path) {
  if (!j.is_string()) bad(path, "must be a string");
  *out = j.get<std::string>();
}
void assign(const json& j, Vec3* out, const std::string& path) {
  if (!j.is_array() || j.size() != 3) bad(path, "must be an array of 3 numbers");
  assign(j[0], &out->x, path + "[0]");
  assign(j[1], &out->y, path + "[1]");
  assign(j[2], &out->z, path + "[2]");
}
void assign(const json& j, std::vector<int>* out, const std::string& path) {
  if (!j.is_array()) bad(path, "must be an array of integers");
  out->clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    int v;
    assign(j[i], &v, path + "[" + std::to_string(i) + "]");
    out->push_back(v);
  }
}
void assign(const json& j, std::array<int, 4>* out, const std::string& path) {
  std::vector<int> v;
  assign(j, &v, path);
  if (v.size() != 4) bad(path, "must have 4 entries");
  std::copy(v.begin(), v.end(), out->begin());
}

struct Span2 {
  double lo = 0, hi = 0;
};
void assign(const json& j, Span2* out, const std::string& path) {
  if (!j.is_array() || j.size() != 2) bad(path, "must be [lo, hi]");
  assign(j[0], &out->lo, path + "[0]");
  assign(j[1], &out->hi, path + "[1]");
}

// Object reader that tracks consumed keys and rejects unknown ones.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) bad(path_, "must be an object");
  }

  template <typename T>
  void get(const char* key, T* out) {
    const auto it = j_->find(key);
    if (it == j_->end()) return;
    seen_.insert(key);
    assign(*it, out, path_ + "." + key);
  }

  const json* sub(const char* key) {
    const auto it = j_->find(key);
    if (it == j_->end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void finish() const {
    for (const auto& item : j_->items())
      if (!seen_.count(item.key())) bad(path_ + "." + item.key(), "is not a known key");
  }

  const std::string& path() const { return path_; }

 private:
  const json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum>
void assign_enum(const json& j, Enum* out, const std::string& path,
                 std::initializer_list<std::pair<const char*, Enum>> table) {
  std::string s;
  assign(j, &s, path);
  for (const auto& [name, value] : table) {
    if (s == name) {
      *out = value;
      return;
    }
  }
  std::string options;
  for (const auto& [name, value] : table) options += std::string(options.empty() ? "" : "|") + name;
  bad(path, "must be one of " + options);
}

void read_throws(const json& j, const std::string& path, harness::ThrowConfig* out) {
  Reader r(j, path);
  if (const json* classes = r.sub("classes")) {
    if (!classes->is_array() || classes->empty()) bad(path + ".classes", "must be a non-empty array");
    out->classes.clear();
    for (std::size_t i = 0; i < classes->size(); ++i) {
      const std::string cpath = path + ".classes[" + std::to_string(i) + "]";
      Reader cr((*classes)[i], cpath);
      harness::ThrowClass cls;
      cr.get("distance", &cls.distance);
      cr.get("target_tof", &cls.target_tof);
      Span2 band{cls.crossing_y_min, cls.crossing_y_max};
      cr.get("crossing_y", &band);
      cls.crossing_y_min = band.lo;
      cls.crossing_y_max = band.hi;
      cr.finish();
      out->classes.push_back(cls);
    }
  }
  r.get("launch_height", &out->launch_height);
  r.get("speed_jitter", &out->speed_jitter);
  r.get("aim_jitter", &out->aim_jitter);
  r.get("drag_coeff", &out->drag_coeff);
  r.get("max_required_travel", &out->max_required_travel);
  r.finish();
}

void read_camera(const json& j, const std::string& path, sensors::CameraModel* out) {
  Reader r(j, path);
  r.get("width", &out->width);
  r.get("height", &out->height);
  r.get("fx", &out->fx);
  r.get("fy", &out->fy);
  r.get("cx", &out->cx);
  r.get("cy", &out->cy);
  r.get("rate_hz", &out->rate_hz);
  r.get("position", &out->position);
  r.get("depth_noise_sigma", &out->depth_noise_sigma);
  r.get("blur_len", &out->blur_len);
  r.get("min_depth", &out->min_depth);
  r.finish();
  if (out->rate_hz <= 0) bad(path + ".rate_hz", "must be > 0");
  if (out->fx <= 0 || out->fy <= 0) bad(path + ".fx/fy", "must be > 0");
}

void read_radar(const json& j, const std::string& path, sensors::RadarModel* out) {
  Reader r(j, path);
  r.get("rate_hz", &out->rate_hz);
  r.get("position", &out->position);
  r.get("noise_sigma", &out->noise_sigma);
  r.get("v_static", &out->v_static);
  r.get("min_range", &out->min_range);
  r.finish();
  if (out->rate_hz <= 0) bad(path + ".rate_hz", "must be > 0");
}

void read_hsv(const json& j, const std::string& path, sensors::HsvRange* out) {
  Reader r(j, path);
  r.get("h_min", &out->h_min);
  r.get("h_max", &out->h_max);
  r.get("s_min", &out->s_min);
  r.get("s_max", &out->s_max);
  r.get("v_min", &out->v_min);
  r.get("v_max", &out->v_max);
  r.finish();
}

void read_controller(const json& j, const std::string& path, control::ControllerParams* out) {
  Reader r(j, path);
  r.get("k", &out->k);
  r.get("v_max", &out->v_max);
  r.get("a_max", &out->a_max);
  r.get("deadband", &out->deadband);
  r.get("home", &out->home);
  if (const json* ws = r.sub("workspace")) {
    Reader wr(*ws, path + ".workspace");
    wr.get("lo", &out->workspace.lo);
    wr.get("hi", &out->workspace.hi);
    wr.finish();
  }
  r.finish();
}

void read_pipeline(const json& j, const std::string& path, PipelineOptions* out) {
  Reader r(j, path);
  if (const json* v = r.sub("localizer"))
    assign_enum(*v, &out->localizer, path + ".localizer",
                {{"color", LocalizerKind::ColorFilter}, {"cnn", LocalizerKind::Cnn}});
  if (const json* v = r.sub("predictor"))
    assign_enum(*v, &out->predictor, path + ".predictor",
                {{"ballistic", PredictorKind::Ballistic}, {"cnn", PredictorKind::Cnn}});
  Span2 latency{out->latency_min, out->latency_max};
  r.get("latency", &latency);
  out->latency_min = latency.lo;
  out->latency_max = latency.hi;
  r.get("min_detections", &out->min_detections);
  r.finish();
  if (out->latency_min > out->latency_max) bad(path + ".latency", "needs min <= max");
  if (out->latency_min < 0) bad(path + ".latency", "must be non-negative");
  if (out->min_detections < 3) bad(path + ".min_detections", "must be >= 3");
}

}  // namespace

Config config_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }

  Config config;
  Reader r(root, "$");
  r.get("seed", &config.seed);
  r.get("basket_radius", &config.basket_radius);

  double gravity = config.throws.gravity;
  double plane_z = config.throws.plane_z;
  r.get("gravity", &gravity);
  r.get("plane_z", &plane_z);
  config.throws.gravity = gravity;
  config.throws.plane_z = plane_z;

  if (const json* v = r.sub("throws")) read_throws(*v, "$.throws", &config.throws);
  if (const json* v = r.sub("tof_bands")) {
    if (!v->is_array()) bad("$.tof_bands", "must be an array of [lo, hi]");
    config.tof_bands.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      Span2 band;
      assign((*v)[i], &band, "$.tof_bands[" + std::to_string(i) + "]");
      config.tof_bands.push_back({band.lo, band.hi});
    }
  }
  if (const json* v = r.sub("camera")) read_camera(*v, "$.camera", &config.sensors.camera);
  if (const json* v = r.sub("radar")) read_radar(*v, "$.radar", &config.sensors.radar);
  if (const json* v = r.sub("hsv_range")) read_hsv(*v, "$.hsv_range", &config.sensors.hsv);
  if (const json* v = r.sub("color_filter")) {
    Reader cr(*v, "$.color_filter");
    cr.get("min_pixels", &config.sensors.min_residue_pixels);
    cr.finish();
  }
  if (const json* v = r.sub("object")) {
    Reader orr(*v, "$.object");
    orr.get("radius", &config.sensors.object_radius);
    orr.finish();
  }
  if (const json* v = r.sub("sensing")) {
    Reader sr(*v, "$.sensing");
    sr.get("ideal", &config.sensors.ideal);
    sr.get("brightness", &config.sensors.brightness);
    sr.finish();
  }
  if (const json* v = r.sub("fit")) {
    Reader fr(*v, "$.fit");
    if (const json* m = fr.sub("mode"))
      assign_enum(*m, &config.fit.mode, "$.fit.mode",
                  {{"pinned_gravity", fit::FitMode::PinnedGravity},
                   {"free_quadratic", fit::FitMode::FreeQuadratic}});
    fr.get("camera_weight", &config.fit.camera_weight);
    fr.get("radar_weight", &config.fit.radar_weight);
    fr.finish();
  }
  if (const json* v = r.sub("controller"))
    read_controller(*v, "$.controller", &config.controller);
  if (const json* v = r.sub("pipeline")) read_pipeline(*v, "$.pipeline", &config.pipeline);

  if (const json* models = r.sub("models")) {
    Reader mr(*models, "$.models");
    if (const json* v = mr.sub("localizer")) {
      Reader lr(*v, "$.models.localizer");
      lr.get("input_height", &config.localizer_spec.input_height);
      lr.get("input_width", &config.localizer_spec.input_width);
      lr.get("conv_channels", &config.localizer_spec.conv_channels);
      lr.get("kernel", &config.localizer_spec.kernel);
      lr.get("dense_width", &config.localizer_spec.dense_width);
      lr.get("depth_range", &config.localizer_spec.depth_range);
      lr.get("weights", &config.localizer_weights);
      lr.finish();
    }
    if (const json* v = mr.sub("interceptor")) {
      Reader ir(*v, "$.models.interceptor");
      ir.get("window", &config.interceptor_spec.window);
      ir.get("conv_channels", &config.interceptor_spec.conv_channels);
      ir.get("kernel", &config.interceptor_spec.kernel);
      ir.get("dense1", &config.interceptor_spec.dense1);
      ir.get("dense2", &config.interceptor_spec.dense2);
      ir.get("weights", &config.interceptor_weights);
      ir.finish();
    }
    mr.finish();
  }

  if (const json* v = r.sub("training")) {
    Reader tr(*v, "$.training");
    tr.get("epochs", &config.training.epochs);
    tr.get("lr", &config.training.lr);
    tr.get("batch_size", &config.training.batch_size);
    tr.get("augment_factor", &config.training.augment_factor);
    tr.get("shift_range", &config.training.shift_range);
    if (const json* m = tr.sub("label_source"))
      assign_enum(*m, &config.training.label_source, "$.training.label_source",
                  {{"truth", models::LabelSource::Truth},
                   {"baseline", models::LabelSource::Baseline}});
    tr.finish();
  }

  if (const json* datasets = r.sub("datasets")) {
    Reader dr(*datasets, "$.datasets");
    if (const json* v = dr.sub("trajectory")) {
      Reader tr(*v, "$.datasets.trajectory");
      tr.get("n_train", &config.trajectory_data.n_train);
      tr.get("n_val", &config.trajectory_data.n_val);
      tr.get("n_test", &config.trajectory_data.n_test);
      tr.finish();
    }
    if (const json* v = dr.sub("localizer")) {
      Reader lr(*v, "$.datasets.localizer");
      lr.get("n_train", &config.localizer_data.n_train);
      lr.get("n_val", &config.localizer_data.n_val);
      lr.get("n_test", &config.localizer_data.n_test);
      lr.get("scale", &config.localizer_data.scale);
      Span2 brightness{config.localizer_data.brightness_min, config.localizer_data.brightness_max};
      lr.get("brightness", &brightness);
      config.localizer_data.brightness_min = brightness.lo;
      config.localizer_data.brightness_max = brightness.hi;
      lr.get("blur_max", &config.localizer_data.blur_max);
      lr.get("blur_zero_fraction", &config.localizer_data.blur_zero_fraction);
      lr.finish();
    }
    dr.finish();
  }

  if (const json* v = r.sub("blur_study")) {
    Reader br(*v, "$.blur_study");
    br.get("levels", &config.blur_study.levels);
    br.get("n_frames", &config.blur_study.n_frames);
    br.finish();
  }

  if (const json* v = r.sub("run")) {
    Reader rr(*v, "$.run");
    rr.get("threads", &config.threads);
    rr.finish();
  }

  r.finish();

  // The travel filter measures from the controller's home position.
  config.throws.home = config.controller.home;
  return config;
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  return config_from_json_text(text);
}

std::string config_to_json_text(const Config& c) {
  json root;
  root["seed"] = c.seed;
  root["basket_radius"] = c.basket_radius;
  root["gravity"] = c.throws.gravity;
  root["plane_z"] = c.throws.plane_z;

  json classes = json::array();
  for (const auto& cls : c.throws.classes)
    classes.push_back({{"distance", cls.distance},
                       {"target_tof", cls.target_tof},
                       {"crossing_y", {cls.crossing_y_min, cls.crossing_y_max}}});
  root["throws"] = {{"classes", classes},
                    {"launch_height", c.throws.launch_height},
                    {"speed_jitter", c.throws.speed_jitter},
                    {"aim_jitter", c.throws.aim_jitter},
                    {"drag_coeff", c.throws.drag_coeff},
                    {"max_required_travel", c.throws.max_required_travel}};
  json bands = json::array();
  for (const auto& b : c.tof_bands) bands.push_back({b.lo, b.hi});
  root["tof_bands"] = bands;

  const auto& cam = c.sensors.camera;
  root["camera"] = {{"width", cam.width},
                    {"height", cam.height},
                    {"fx", cam.fx},
                    {"fy", cam.fy},
                    {"cx", cam.cx},
                    {"cy", cam.cy},
                    {"rate_hz", cam.rate_hz},
                    {"position", {cam.position.x, cam.position.y, cam.position.z}},
                    {"depth_noise_sigma", cam.depth_noise_sigma},
                    {"blur_len", cam.blur_len},
                    {"min_depth", cam.min_depth}};
  const auto& rad = c.sensors.radar;
  root["radar"] = {{"rate_hz", rad.rate_hz},
                   {"position", {rad.position.x, rad.position.y, rad.position.z}},
                   {"noise_sigma", rad.noise_sigma},
                   {"v_static", rad.v_static},
                   {"min_range", rad.min_range}};
  const auto& hsv = c.sensors.hsv;
  root["hsv_range"] = {{"h_min", hsv.h_min}, {"h_max", hsv.h_max}, {"s_min", hsv.s_min},
                       {"s_max", hsv.s_max}, {"v_min", hsv.v_min}, {"v_max", hsv.v_max}};
  root["color_filter"] = {{"min_pixels", c.sensors.min_residue_pixels}};
  root["object"] = {{"radius", c.sensors.object_radius}};
  root["sensing"] = {{"ideal", c.sensors.ideal}, {"brightness", c.sensors.brightness}};
  root["fit"] = {{"mode", c.fit.mode == fit::FitMode::PinnedGravity ? "pinned_gravity"
                                                                    : "free_quadratic"},
                 {"camera_weight", c.fit.camera_weight},
                 {"radar_weight", c.fit.radar_weight}};
  const auto& ctl = c.controller;
  root["controller"] = {
      {"k", ctl.k},
      {"v_max", ctl.v_max},
      {"a_max", ctl.a_max},
      {"deadband", ctl.deadband},
      {"home", {ctl.home.x, ctl.home.y, ctl.home.z}},
      {"workspace",
       {{"lo", {ctl.workspace.lo.x, ctl.workspace.lo.y, ctl.workspace.lo.z}},
        {"hi", {ctl.workspace.hi.x, ctl.workspace.hi.y, ctl.workspace.hi.z}}}}};
  root["pipeline"] = {{"localizer", localizer_kind_name(c.pipeline.localizer)},
                      {"predictor", predictor_kind_name(c.pipeline.predictor)},
                      {"latency", {c.pipeline.latency_min, c.pipeline.latency_max}},
                      {"min_detections", c.pipeline.min_detections}};
  root["models"] = {
      {"localizer",
       {{"input_height", c.localizer_spec.input_height},
        {"input_width", c.localizer_spec.input_width},
        {"conv_channels",
         {c.localizer_spec.conv_channels[0], c.localizer_spec.conv_channels[1],
          c.localizer_spec.conv_channels[2], c.localizer_spec.conv_channels[3]}},
        {"kernel", c.localizer_spec.kernel},
        {"dense_width", c.localizer_spec.dense_width},
        {"depth_range", c.localizer_spec.depth_range},
        {"weights", c.localizer_weights}}},
      {"interceptor",
       {{"window", c.interceptor_spec.window},
        {"conv_channels", c.interceptor_spec.conv_channels},
        {"kernel", c.interceptor_spec.kernel},
        {"dense1", c.interceptor_spec.dense1},
        {"dense2", c.interceptor_spec.dense2},
        {"weights", c.interceptor_weights}}}};
  root["training"] = {
      {"epochs", c.training.epochs},
      {"lr", c.training.lr},
      {"batch_size", c.training.batch_size},
      {"augment_factor", c.training.augment_factor},
      {"shift_range", c.training.shift_range},
      {"label_source",
       c.training.label_source == models::LabelSource::Truth ? "truth" : "baseline"}};
  root["datasets"] = {
      {"trajectory",
       {{"n_train", c.trajectory_data.n_train},
        {"n_val", c.trajectory_data.n_val},
        {"n_test", c.trajectory_data.n_test}}},
      {"localizer",
       {{"n_train", c.localizer_data.n_train},
        {"n_val", c.localizer_data.n_val},
        {"n_test", c.localizer_data.n_test},
        {"scale", c.localizer_data.scale},
        {"brightness", {c.localizer_data.brightness_min, c.localizer_data.brightness_max}},
        {"blur_max", c.localizer_data.blur_max},
        {"blur_zero_fraction", c.localizer_data.blur_zero_fraction}}}};
  json levels = json::array();
  for (int l : c.blur_study.levels) levels.push_back(l);
  root["blur_study"] = {{"levels", levels}, {"n_frames", c.blur_study.n_frames}};
  root["run"] = {{"threads", c.threads}};
  return root.dump(2) + "\n";
}

void apply_config_override(Config* config, const std::string& dotted_key,
                           const std::string& json_value) {
  json root = json::parse(config_to_json_text(*config));
  json value;
  try {
    value = json::parse(json_value);
  } catch (const json::parse_error&) {
    value = json_value;  // bare strings are allowed unquoted
  }

  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string key = dotted_key.substr(start, dot - start);
    if (key.empty()) throw std::invalid_argument("config: empty key in override path");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
  *config = config_from_json_text(root.dump());
}

const char* localizer_kind_name(LocalizerKind kind) {
  return kind == LocalizerKind::ColorFilter ? "color" : "cnn";
}
const char* predictor_kind_name(PredictorKind kind) {
  return kind == PredictorKind::Ballistic ? "ballistic" : "cnn";
}

}  // namespace piglet
