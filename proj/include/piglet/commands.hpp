#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "piglet/harness.hpp"

namespace piglet::harness {

// Networks built from the config specs with weights loaded from the
// configured paths. Used by every command that needs a trained model.
struct OwnedModels {
  std::optional<nn::Network> localizer;
  std::optional<nn::Network> interceptor;

  LoadedModels view() const {
    LoadedModels m;
    m.localizer = localizer ? &*localizer : nullptr;
    m.interceptor = interceptor ? &*interceptor : nullptr;
    return m;
  }
};

// Loads what the config's pipeline needs (or what the flags force). Throws
// with a "missing weights" message when a needed path is unset or unreadable.
OwnedModels load_models(const Config& config, bool need_localizer,
                        bool need_interceptor);

// Command implementations behind the CLI and the C API. Each writes its
// file outputs under out_dir (created if needed; skipped when empty) and
// returns the summary JSON. They throw std::invalid_argument for usage
// errors and std::runtime_error for everything else.
nlohmann::json cmd_simulate(const Config& config, const std::string& out_dir);
nlohmann::json cmd_eval(const Config& config, int n_throws, const std::string& out_dir);
nlohmann::json cmd_compare(const Config& config, int n_throws, const std::string& out_dir);
// `ok` reports the Table-band assertion (CLI exit code 2 when false).
nlohmann::json cmd_tof(const Config& config, int n_per_distance,
                       const std::string& out_dir, bool* ok);
nlohmann::json cmd_blur_study(const Config& config, const std::string& out_dir);
nlohmann::json cmd_gradcheck(const Config& config, const std::string& out_dir, bool* ok);
nlohmann::json cmd_gen_trajectory_data(const Config& config, const std::string& out_dir);
nlohmann::json cmd_gen_localizer_data(const Config& config, const std::string& out_dir);
nlohmann::json cmd_train_interceptor(const Config& config, const std::string& data_dir,
                                     const std::string& out_dir);
nlohmann::json cmd_train_localizer(const Config& config, const std::string& data_dir,
                                   const std::string& out_dir);

// Dataset round trip used by the train commands' --data path.
void write_trajectory_dataset(const models::TrajectoryDataset& dataset,
                              const Config& config, const std::string& out_dir);
models::TrajectoryDataset read_trajectory_dataset(const std::string& dir);
void write_localizer_dataset(const models::LocalizerDataset& dataset,
                             const Config& config, const std::string& out_dir);
models::LocalizerDataset read_localizer_dataset(const std::string& dir);

}  // namespace piglet::harness
