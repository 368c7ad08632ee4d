#pragma once

#include <span>
#include <string>
#include <vector>

#include "piglet/controller.hpp"
#include "piglet/sensors.hpp"

namespace piglet::csvio {

// All CSV output uses 9 significant digits, LF line endings and a header row.
std::string format_g9(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::string header) : text_(std::move(header)) { text_ += '\n'; }

  void field(const std::string& s);
  void field(double v) { field(format_g9(v)); }
  void field(int v) { field(std::to_string(v)); }
  void field(long long v) { field(std::to_string(v)); }
  void field(std::uint64_t v) { field(std::to_string(v)); }
  void end_row();

  const std::string& text() const { return text_; }
  void write(const std::string& path) const;

 private:
  std::string text_;
  bool row_open_ = false;
};

// Detection log: `t,x,y,z,source` with source 0=camera, 1=radar.
std::string detections_csv(std::span<const sensors::Detection> detections);
void write_detections_csv(const std::string& path,
                          std::span<const sensors::Detection> detections);
std::vector<sensors::Detection> read_detections_csv(const std::string& path,
                                                    std::vector<int>* traj_ids = nullptr);

// Robot trace: `t,x,y,z,vx,vy,vz`.
void write_robot_trace_csv(const std::string& path,
                           std::span<const control::TraceSample> trace);

}  // namespace piglet::csvio
