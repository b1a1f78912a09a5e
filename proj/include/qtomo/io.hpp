#pragma once

#include <optional>
#include <string>

#include "qtomo/fock.hpp"
#include "qtomo/joint.hpp"
#include "qtomo/modematch.hpp"
#include "qtomo/moments.hpp"
#include "qtomo/phasespace.hpp"
#include "qtomo/simulate.hpp"
#include "qtomo/twochannel.hpp"

namespace qtomo {

// Binary histogram, little-endian:
//   "QTH1" | u32 nx, ny | f64 x_min, x_max, y_min, y_max | u64 total,
//   overflow | f64 counts[nx*ny] (x fastest)
void write_histogram(const Histogram2D& hist, const std::string& path);
Histogram2D read_histogram(const std::string& path);

// Binary joint histogram:
//   "QTJ1" | u8 basis ('x'|'y'|'z') | u32 nx, ny, nq |
//   f64 x_min, x_max, y_min, y_max | u64 total, overflow |
//   f64 q_edges[nq+1] | f64 counts[nx*ny*nq] (x fastest, then y, then q)
void write_joint_histogram(const Joint3DHistogram& hist,
                           const std::string& path);
Joint3DHistogram read_joint_histogram(const std::string& path);

// CSV "re,im" with a "# N0=<...> offset=<re>,<im> seed=<...>" header.
void write_record(const MeasurementRecord& record, const std::string& path);
MeasurementRecord read_record(const std::string& path);

// CSV "re1,im1,re2,im2" with "# N1=<...> N2=<...> seed=<...>".
void write_two_channel_record(const TwoChannelRecord& record,
                              const std::string& path);
TwoChannelRecord read_two_channel_record(const std::string& path);

// CSV "n,m,re,im,stderr" with "# ordering=<tag> max_order=<M>".
void write_moment_table(const MomentTable& table, const std::string& path);
MomentTable read_moment_table(const std::string& path);

// CSV "x,y,value" with "# x_min,x_max,y_min,y_max,nx,ny".
void write_phase_grid(const PhaseGrid& grid, const std::string& path);
PhaseGrid read_phase_grid(const std::string& path);

// JSON {"dim": d, "re": [[...]], "im": [[...]]}.
void write_density_matrix(const Matrix& rho, const std::string& path);
Matrix read_density_matrix(const std::string& path);
std::string density_matrix_json(const Matrix& rho);
Matrix density_matrix_from_json(const std::string& text);

// CSV "t,re,im" with a "# dt=<...>" header.
void write_time_series(const TimeSeries& ts, const std::string& path);
TimeSeries read_time_series(const std::string& path);

struct ReconstructionReport {
  Matrix rho;
  std::optional<double> fidelity_vs_target;
  double log_likelihood = 0.0;
  int iterations = 0;
  std::string engine;
};

void write_report(const ReconstructionReport& report, const std::string& path);
ReconstructionReport read_report(const std::string& path);

}  // namespace qtomo
