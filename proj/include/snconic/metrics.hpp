#pragma once

#include "snconic/types.hpp"

namespace snconic::metrics {

struct MetricRow {
  std::string method;
  Index n = 0;
  Index p = 0;
  double bias = 0;    // ||mean(beta_hat - beta0)||_2
  double rmse = 0;    // mean(||beta_hat - beta0||_2^2)^{1/2}
  double prb = 0;     // ||mean(X (beta_hat - beta0))||_2 / sqrt(n)
  double l2 = 0;      // mean ||beta_hat - beta0||_2
  double l1 = 0;      // mean ||beta_hat - beta0||_1
  double pr = 0;      // mean ||X (beta_hat - beta0)||_2 / sqrt(n)
  double fp = 0;      // mean #(beta_hat_j != 0 & beta0_j == 0), support after 1e-7 truncation
  double fn = 0;      // mean #(beta_hat_j == 0 & beta0_j != 0)
  double time_s = 0;  // mean solve wall-clock
  long failures = 0;  // reps that ended at MaxIters
};

MetricRow compute_metrics(const std::string& method, const std::vector<RealVector>& estimates,
                          const RealVector& beta0, const std::vector<RealMatrix>& designs,
                          const std::vector<double>& times = {});

enum class TableFormat { CSV, Markdown };

// CSV column order: method,n,p,bias,rmse,prb,l2,l1,pr,fp,fn,time_s; 6 decimals, LF endings.
void write_table(const std::vector<MetricRow>& rows, const std::string& path, TableFormat format);

}  // namespace snconic::metrics
