#pragma once

#include "snconic/estimator.hpp"
#include "snconic/metrics.hpp"
#include "snconic/simgen.hpp"

namespace snconic::metrics {

enum class MethodKind { SnConic, BrtConic, Lasso, Dantzig };

struct MethodConfig {
  std::string label;
  MethodKind kind = MethodKind::SnConic;
  bool oracle_design = false;  // run on the unobserved X with no bias correction

  // SnConic
  double tau_scale = 1.0;
  estimator::LambdaMode lambda_mode = estimator::LambdaMode::Fixed;
  double lambda_t = 1.0;
  double lambda_u = 0.25;
  estimator::HnMode hn_mode = estimator::HnMode::Exact;
  bool emit_thresholded = false;  // extra row "<label>_thresholded", same solve
  bool emit_refit = false;        // extra row "<label>_refit"

  // Lasso / Dantzig / BrtConic; NaN = module default formula
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double sigma_xi = 1.0;
  double epsilon = 0.05;
  double mu = std::numeric_limits<double>::quiet_NaN();
  double brt_lambda = 1.0;
};

struct ReplicationPlan {
  simgen::SimConfig sim;
  std::vector<MethodConfig> methods;
  long reps = 100;
  std::uint64_t master_seed = 42;
  int parallelism = 1;
  double alpha = 0.05;
  solver::SolverSettings solver;
  std::string out_dir;  // empty = no files written
};

// Runs every method on the same per-rep draw (substream keyed by rep index);
// deterministic for fixed plan regardless of parallelism. When out_dir is set,
// writes rows.csv, rows.md, plan.json and reps/rep_<k>.jsonl.
std::vector<MetricRow> run_replications(const ReplicationPlan& plan);

// Presets pin the simulation-study configurations: "t1" (additive, five ones),
// "s2" (additive, six ones), "s6" (missing at random, six ones).
ReplicationPlan make_preset(const std::string& name);

std::string plan_to_json(const ReplicationPlan& plan);
ReplicationPlan plan_from_json(const std::string& text);

}  // namespace snconic::metrics
