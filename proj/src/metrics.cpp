#include "snconic/metrics.hpp"

#include "snconic/program_builder.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace snconic::metrics {

MetricRow compute_metrics(const std::string& method, const std::vector<RealVector>& estimates,
                          const RealVector& beta0, const std::vector<RealMatrix>& designs,
                          const std::vector<double>& times) {
  if (estimates.empty()) throw std::invalid_argument("compute_metrics: no estimates");
  if (designs.size() != estimates.size())
    throw std::invalid_argument("compute_metrics: designs/estimates length mismatch");
  if (!times.empty() && times.size() != estimates.size())
    throw std::invalid_argument("compute_metrics: times/estimates length mismatch");
  const double reps = static_cast<double>(estimates.size());
  const Index p = beta0.size();
  const Index n = designs.front().rows();

  MetricRow row;
  row.method = method;
  row.n = n;
  row.p = p;
  RealVector mean_delta = RealVector::Zero(p);
  RealVector mean_xdelta = RealVector::Zero(n);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (std::size_t r = 0; r < estimates.size(); ++r) {
    const RealVector& est = estimates[r];
    if (est.size() != p) throw std::invalid_argument("compute_metrics: estimate length != p");
    if (designs[r].rows() != n || designs[r].cols() != p)
      throw std::invalid_argument("compute_metrics: design shape mismatch");
    const RealVector delta = est - beta0;
    const RealVector xdelta = designs[r] * delta;
    mean_delta += delta;
    mean_xdelta += xdelta;
    row.rmse += delta.squaredNorm();
    row.l2 += delta.norm();
    row.l1 += delta.lpNorm<1>();
    row.pr += xdelta.norm() / sqrt_n;
    for (Index j = 0; j < p; ++j) {
      const bool est_nonzero = std::abs(est[j]) >= builder::kTruncation;
      if (est_nonzero && beta0[j] == 0.0) row.fp += 1.0;
      if (!est_nonzero && beta0[j] != 0.0) row.fn += 1.0;
    }
  }
  mean_delta /= reps;
  mean_xdelta /= reps;
  row.bias = mean_delta.norm();
  row.rmse = std::sqrt(row.rmse / reps);
  row.prb = mean_xdelta.norm() / sqrt_n;
  row.l2 /= reps;
  row.l1 /= reps;
  row.pr /= reps;
  row.fp /= reps;
  row.fn /= reps;
  for (double t : times) row.time_s += t;
  if (!times.empty()) row.time_s /= static_cast<double>(times.size());
  return row;
}

void write_table(const std::vector<MetricRow>& rows, const std::string& path, TableFormat format) {
  if (rows.empty()) throw std::invalid_argument("write_table: no rows");
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw std::runtime_error("cannot write " + path);
  const char* names[] = {"method", "n",  "p",  "bias", "rmse",  "prb",
                         "l2",     "l1", "pr", "fp",   "fn",    "time_s"};
  char buf[64];
  if (format == TableFormat::CSV) {
    for (int k = 0; k < 12; ++k) out << (k ? "," : "") << names[k];
    out << "\n";
    for (const auto& row : rows) {
      out << row.method << "," << row.n << "," << row.p;
      const double vals[] = {row.bias, row.rmse, row.prb, row.l2, row.l1,
                             row.pr,   row.fp,   row.fn,  row.time_s};
      for (double v : vals) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        out << "," << buf;
      }
      out << "\n";
    }
  } else {
    out << "|";
    for (const char* name : names) out << " " << name << " |";
    out << "\n|";
    for (int k = 0; k < 12; ++k) out << "---|";
    out << "\n";
    for (const auto& row : rows) {
      out << "| " << row.method << " | " << row.n << " | " << row.p << " |";
      const double vals[] = {row.bias, row.rmse, row.prb, row.l2, row.l1,
                             row.pr,   row.fp,   row.fn,  row.time_s};
      for (double v : vals) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        out << " " << buf << " |";
      }
      out << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace snconic::metrics
