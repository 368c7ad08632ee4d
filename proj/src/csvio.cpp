#include "piglet/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace piglet::csvio {

std::string format_g9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void CsvWriter::field(const std::string& s) {
  if (row_open_) text_ += ',';
  text_ += s;
  row_open_ = true;
}

void CsvWriter::end_row() {
  text_ += '\n';
  row_open_ = false;
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);  // binary: keep LF on any platform
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text_;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string detections_csv(std::span<const sensors::Detection> detections) {
  CsvWriter w("t,x,y,z,source");
  for (const auto& d : detections) {
    w.field(d.t);
    w.field(d.position.x);
    w.field(d.position.y);
    w.field(d.position.z);
    w.field(static_cast<int>(d.source));
    w.end_row();
  }
  return w.text();
}

void write_detections_csv(const std::string& path,
                          std::span<const sensors::Detection> detections) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << detections_csv(detections);
}

std::vector<sensors::Detection> read_detections_csv(const std::string& path,
                                                    std::vector<int>* traj_ids) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty detections file: " + path);
  const bool with_traj = line.rfind("traj,", 0) == 0;
  if (line != "t,x,y,z,source" && !(with_traj && line == "traj,t,x,y,z,source"))
    throw std::runtime_error("unexpected detections header in " + path + ": " + line);

  std::vector<sensors::Detection> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    auto next = [&]() {
      if (!std::getline(row, cell, ','))
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": short row");
      return cell;
    };
    if (with_traj) {
      const int id = std::stoi(next());
      if (traj_ids) traj_ids->push_back(id);
    }
    sensors::Detection d;
    d.t = std::stod(next());
    d.position.x = std::stod(next());
    d.position.y = std::stod(next());
    d.position.z = std::stod(next());
    const int source = std::stoi(next());
    if (source != 0 && source != 1)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad source");
    d.source = static_cast<sensors::Source>(source);
    out.push_back(d);
  }
  return out;
}

void write_robot_trace_csv(const std::string& path,
                           std::span<const control::TraceSample> trace) {
  CsvWriter w("t,x,y,z,vx,vy,vz");
  for (const auto& s : trace) {
    w.field(s.t);
    w.field(s.position.x);
    w.field(s.position.y);
    w.field(s.position.z);
    w.field(s.velocity.x);
    w.field(s.velocity.y);
    w.field(s.velocity.z);
    w.end_row();
  }
  w.write(path);
}

}  // namespace piglet::csvio
