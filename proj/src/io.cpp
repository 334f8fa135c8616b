#include "ukfm/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace ukfm {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& raw) {
  std::string s = raw;
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::ParseError, "not a number: '" + raw + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  for (auto& c : out) {
    while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
  }
  return out;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty CSV");
  t.header = split_csv_line(line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != t.header.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(t.header.size()) + " fields, got " +
                                             std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_estimate_csv(std::ostream& out, const ExampleInfo& info, const FilterTrace& trace) {
  out << "step,t";
  for (const auto& c : info.state_columns) out << ',' << c;
  for (const auto& c : info.cov_columns) out << ',' << c;
  out << ",nees\n";
  for (std::size_t n = 0; n < trace.state.size(); ++n) {
    out << (n + 1) << ',' << format_double(trace.t[n]);
    for (double v : trace.state[n]) out << ',' << format_double(v);
    for (double v : trace.cov_diag[n]) out << ',' << format_double(v);
    out << ',' << format_double(n < trace.nees.size() ? trace.nees[n] : std::nan("")) << '\n';
  }
}

void write_benchmark_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "filter,epoch,t";
  for (const auto& b : report.error_blocks) out << ",rmse_" << b;
  out << ",nees,diverged,runs\n";
  for (const auto& f : report.filters) {
    for (Eigen::Index n = 0; n < f.rmse.rows(); ++n) {
      out << f.filter << ',' << (n + 1) << ',' << format_double(f.t[n]);
      for (Eigen::Index b = 0; b < f.rmse.cols(); ++b) out << ',' << format_double(f.rmse(n, b));
      out << ',' << format_double(f.mean_nees[n]) << ',' << f.diverged << ',' << f.runs << '\n';
    }
  }
  for (const auto& f : report.filters) {
    out << f.filter << ",all," << format_double(f.t.empty() ? 0.0 : f.t.back());
    for (Eigen::Index b = 0; b < f.final_rmse.size(); ++b) out << ',' << format_double(f.final_rmse(b));
    out << ',' << format_double(f.avg_nees) << ',' << f.diverged << ',' << f.runs << '\n';
  }
}

ImuGnssLog read_imu_gnss_log(std::istream& in) {
  const CsvTable t = read_csv(in);
  static const std::vector<std::string> cols{"t",  "wx",     "wy",     "wz",     "ax",        "ay",
                                             "az", "gnss_x", "gnss_y", "gnss_z", "gnss_valid"};
  std::vector<int> idx;
  for (const auto& c : cols) {
    const int i = t.column(c);
    if (i < 0) throw Error(ErrorCode::ParseError, "IMU/GNSS log is missing column '" + c + "'");
    idx.push_back(i);
  }
  if (t.rows.size() < 2) throw Error(ErrorCode::ParseError, "IMU/GNSS log needs at least two rows");
  ImuGnssLog log;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    log.t.push_back(row[idx[0]]);
    if (r > 0 && !(log.t[r] > log.t[r - 1])) {
      throw Error(ErrorCode::ParseError, "IMU/GNSS log times must increase (row " + std::to_string(r + 1) + ")");
    }
    Eigen::VectorXd imu(6);
    for (int k = 0; k < 6; ++k) imu(k) = row[idx[1 + k]];
    log.imu.push_back(imu);
    const double valid = row[idx[10]];
    if (valid != 0.0 && valid != 1.0) throw Error(ErrorCode::ParseError, "gnss_valid must be 0 or 1");
    if (valid == 1.0) {
      log.gnss.emplace_back(Eigen::Vector3d(row[idx[7]], row[idx[8]], row[idx[9]]));
    } else {
      log.gnss.emplace_back(std::nullopt);
    }
  }
  return log;
}

void write_imu_gnss_log(std::ostream& out, const ImuGnssLog& log) {
  out << "t,wx,wy,wz,ax,ay,az,gnss_x,gnss_y,gnss_z,gnss_valid\n";
  for (std::size_t r = 0; r < log.t.size(); ++r) {
    out << format_double(log.t[r]);
    for (int k = 0; k < 6; ++k) out << ',' << format_double(log.imu[r](k));
    if (log.gnss[r]) {
      for (int k = 0; k < 3; ++k) out << ',' << format_double((*log.gnss[r])(k));
      out << ",1\n";
    } else {
      out << ",0,0,0,0\n";
    }
  }
}

LandmarkSet read_landmarks(std::istream& in) {
  LandmarkSet out;
  std::string line;
  int lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    std::vector<double> v;
    try {
      for (const auto& c : cells) v.push_back(parse_double(c));
    } catch (const Error&) {
      if (lineno == 1) continue;  // header
      throw;
    }
    if (v.size() != 2 && v.size() != 3) {
      throw Error(ErrorCode::ParseError, "landmark line " + std::to_string(lineno) + " must have 2 or 3 values");
    }
    if (width != 0 && v.size() != width) throw Error(ErrorCode::ParseError, "landmarks mix 2D and 3D rows");
    width = v.size();
    out.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "no landmarks in file");
  return out;
}

}  // namespace ukfm
