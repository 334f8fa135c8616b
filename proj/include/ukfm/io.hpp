#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ukfm/models/model_spec.hpp"
#include "ukfm/montecarlo.hpp"

namespace ukfm {

/// Shortest decimal that parses back to the same double ("nan", "inf" for non-finite).
std::string format_double(double v);
double parse_double(const std::string& s);

std::vector<std::string> split_csv_line(const std::string& line);

/// Header and numeric rows of a CSV file; throws ParseError.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  ///< -1 if absent
};
CsvTable read_csv(std::istream& in);

/// step,t,<state columns>,<P diagonal columns>,nees; one row per step.
void write_estimate_csv(std::ostream& out, const ExampleInfo& info, const FilterTrace& trace);

/// filter,epoch,t,rmse_<block>...,nees,diverged,runs. One row per step and
/// filter, then one aggregate row per filter with epoch "all" holding the
/// final RMSE and the time-averaged NEES.
void write_benchmark_csv(std::ostream& out, const BenchmarkReport& report);

/// IMU/GNSS log: t,wx,wy,wz,ax,ay,az,gnss_x,gnss_y,gnss_z,gnss_valid.
/// Row 0 is the initial epoch; the IMU sample of row n drives the transition
/// from t[n-1] to t[n] and the GNSS fix of row n (if valid) is observed at t[n].
struct ImuGnssLog {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> imu;
  std::vector<std::optional<Eigen::VectorXd>> gnss;
};
ImuGnssLog read_imu_gnss_log(std::istream& in);
void write_imu_gnss_log(std::ostream& out, const ImuGnssLog& log);

/// One landmark per row: x,y or x,y,z. A header row is optional.
LandmarkSet read_landmarks(std::istream& in);

}  // namespace ukfm
