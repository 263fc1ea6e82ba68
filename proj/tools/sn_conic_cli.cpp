// Command-line front end: simulate | estimate | baseline | replicate | solve-socp | kappa.
// Exit codes: 0 success, 1 user error, 2 numerical failure (--strict).

#include "snconic/baselines.hpp"
#include "snconic/dataset_io.hpp"
#include "snconic/estimator.hpp"
#include "snconic/replicate.hpp"
#include "snconic/sensitivity.hpp"
#include "snconic/simgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace snconic;

namespace {

// ---------------------------------------------------------------- logging

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel g_log = LogLevel::Info;

void log_info(const std::string& msg) {
  if (g_log >= LogLevel::Info) std::fprintf(stderr, "%s\n", msg.c_str());
}

LogLevel parse_log(const std::string& name) {
  if (name == "quiet") return LogLevel::Quiet;
  if (name == "info") return LogLevel::Info;
  return LogLevel::Debug;
}

void add_log_flag(CLI::App* cmd, std::string& level) {
  cmd->add_option("--log", level, "Log level: quiet, info or debug")
      ->capture_default_str()
      ->check(CLI::IsMember({"quiet", "info", "debug"}));
}

// Debug level streams solver residuals to stderr every trace_interval iterations.
void wire_trace(solver::SolverSettings& settings) {
  if (g_log < LogLevel::Debug) return;
  settings.trace = [](long iter, double rp, double rd, double gap) {
    std::fprintf(stderr, "[solver] iter %ld primal %.3e dual %.3e gap %.3e\n", iter, rp, rd, gap);
  };
}

void add_solver_flags(CLI::App* cmd, solver::SolverSettings& settings) {
  cmd->add_option("--eps", settings.eps_primal,
                  "Solver tolerance, applied to the primal, dual and gap metrics")
      ->capture_default_str();
  cmd->add_option("--max-iters", settings.max_iters, "Solver iteration cap")
      ->capture_default_str();
}

void finish_solver_flags(solver::SolverSettings& settings) {
  settings.eps_dual = settings.eps_primal;
  settings.eps_gap = settings.eps_primal;
  wire_trace(settings);
}

// ---------------------------------------------------------------- helpers

std::vector<double> vec(const RealVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
}

// Resolved-config sidecar: <out dir>/resolved_config.json for directory outputs,
// <stem>.config.json next to file outputs.
fs::path sidecar_for(const fs::path& out, bool is_dir) {
  if (is_dir) return out / "resolved_config.json";
  fs::path p = out;
  p.replace_extension();
  return p.concat(".config.json");
}

int default_parallelism() {
  if (const char* env = std::getenv("SN_CONIC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

struct LambdaSpec {
  estimator::LambdaMode mode = estimator::LambdaMode::Fixed;
  double lambda_t = 1.0;
  double lambda_u = 0.25;
};

// "theoretical" or "fixed:LT,LU"
LambdaSpec parse_lambda(const std::string& text) {
  LambdaSpec spec;
  if (text == "theoretical") {
    spec.mode = estimator::LambdaMode::Theoretical;
    return spec;
  }
  if (text.rfind("fixed:", 0) == 0) {
    const std::string body = text.substr(6);
    const auto comma = body.find(',');
    if (comma != std::string::npos) {
      try {
        spec.lambda_t = std::stod(body.substr(0, comma));
        spec.lambda_u = std::stod(body.substr(comma + 1));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--lambda", "cannot parse '" + text + "'");
      }
      if (spec.lambda_t > 0 && spec.lambda_u > 0) return spec;
    }
  }
  throw CLI::ValidationError("--lambda", "expected 'theoretical' or 'fixed:LT,LU', got '" + text +
                                             "'");
}

estimator::HnMode resolve_hn(const std::string& name, Index p) {
  if (name == "exact") return estimator::HnMode::Exact;
  if (name == "upper") return estimator::HnMode::UpperBound;
  return p <= 500 ? estimator::HnMode::Exact : estimator::HnMode::UpperBound;
}

// Bias-correction inputs for a dataset read from disk. Exactly one source:
// an explicit gamma file, a known noise scale, or mask-based estimation.
std::pair<Dataset, GammaEstimate> resolve_inputs(const Dataset& raw, const std::string& gamma_path,
                                                 const std::optional<double>& sigma_w) {
  const int sources = int(!gamma_path.empty()) + int(sigma_w.has_value()) +
                      int(raw.provenance == Provenance::MissingAtRandom);
  if (sources != 1)
    throw CLI::ValidationError(
        "bias correction",
        "supply exactly one of --gamma, --sigma-w, or --mask (mask-based estimation)");
  if (!gamma_path.empty()) {
    GammaEstimate gamma = io::read_gamma_json(gamma_path);
    if (gamma.diag.size() != raw.p())
      throw CLI::ValidationError("--gamma", "diagonal length != number of covariates");
    return {raw, std::move(gamma)};
  }
  if (sigma_w) return {raw, gammaest::known_additive(*sigma_w, raw.p())};
  gammaest::MarResult mar = gammaest::mar_estimate(raw);
  return {std::move(mar.surrogate), std::move(mar.gamma)};
}

json tuning_json(const builder::SnTuning& t) {
  return {{"tau", t.tau}, {"lambda_t", t.lambda_t}, {"lambda_u", t.lambda_u}, {"b_eps", t.b_eps}};
}

json diag_json(const estimator::SolverDiagnostics& d) {
  return {{"status", solver::to_string(d.status)},
          {"iterations", d.iterations},
          {"primal_residual", d.primal_residual},
          {"dual_residual", d.dual_residual},
          {"gap", d.gap}};
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  simgen::SimConfig sim;
  std::uint64_t rep = 0;
  std::string beta = "separated5";
  std::string regime = "case1";
  std::string out_dir;
  bool write_oracle_x = false;
  std::string log = "info";
};

int run_simulate(const SimulateArgs& args) {
  simgen::SimConfig config = args.sim;
  config.beta_kind = args.beta == "separated6"    ? simgen::BetaKind::Separated6
                     : args.beta == "unseparated" ? simgen::BetaKind::Unseparated
                                                  : simgen::BetaKind::Separated5;
  config.regime = args.regime == "case2" ? simgen::Regime::MAR : simgen::Regime::AdditiveEIV;

  const simgen::SimDraw draw = simgen::generate(config, args.rep);

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  const fs::path mask_path = dir / "mask.csv";
  io::write_dataset_csv(draw.dataset, (dir / "data.csv").string(),
                        draw.dataset.mask ? mask_path.string() : "");
  if (args.write_oracle_x) io::write_matrix_csv(draw.oracle_x, (dir / "oracle_x.csv").string());

  json truth;
  truth["beta0"] = vec(draw.beta0);
  truth["pi_used"] = draw.pi_used ? json(*draw.pi_used) : json(nullptr);
  truth["seed"] = config.seed;
  write_json_file(dir / "truth.json", truth);

  json resolved = {{"verb", "simulate"},
                   {"n", config.n},
                   {"p", config.p},
                   {"rho", config.rho},
                   {"sigma_xi", config.sigma_xi},
                   {"sigma_w", config.sigma_w},
                   {"beta", args.beta},
                   {"regime", args.regime},
                   {"pi_low", config.pi_low},
                   {"pi_high", config.pi_high},
                   {"seed", config.seed},
                   {"rep", args.rep},
                   {"write_oracle_x", args.write_oracle_x}};
  write_json_file(sidecar_for(dir, true), resolved);

  log_info("simulate: wrote " + (dir / "data.csv").string() +
           (draw.dataset.mask ? ", mask.csv" : "") + ", truth.json" +
           (args.write_oracle_x ? ", oracle_x.csv" : ""));
  return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string data_path;
  std::string mask_path;
  std::string gamma_path;
  std::optional<double> sigma_w;
  double alpha = 0.05;
  double tau_scale = 1.0;
  std::string lambda = "fixed:1,0.25";
  std::string hn = "auto";
  bool threshold = false;
  bool refit = false;
  bool strict = false;
  solver::SolverSettings solver;
  std::string out_path;
  std::string log = "info";
};

int run_estimate(EstimateArgs& args) {
  const Dataset raw = io::read_dataset_csv(args.data_path, args.mask_path);
  auto [data, gamma] = resolve_inputs(raw, args.gamma_path, args.sigma_w);

  const LambdaSpec lambda = parse_lambda(args.lambda);
  estimator::SnConfig config;
  config.alpha = args.alpha;
  config.tau_scale = args.tau_scale;
  config.lambda_mode = lambda.mode;
  config.lambda_t = lambda.lambda_t;
  config.lambda_u = lambda.lambda_u;
  config.hn_mode = resolve_hn(args.hn, data.p());
  finish_solver_flags(args.solver);
  config.solver = args.solver;
  config.refit = args.refit;

  const estimator::EstimateReport report = estimator::fit(data, gamma, config);

  json out;
  out["beta_hat"] = vec(report.beta_hat);
  out["t_hat"] = vec(report.t_hat);
  out["u_hat"] = vec(report.u_hat);
  if (args.threshold) {
    out["threshold_set"] = report.threshold_set;
    out["threshold_values"] = vec(report.threshold_values);
    out["beta_thresholded"] = vec(report.beta_thresholded);
  }
  if (report.beta_refit) out["beta_refit"] = vec(*report.beta_refit);
  out["tuning"] = tuning_json(report.tuning);
  if (!std::isnan(report.hn)) out["hn"] = report.hn;
  out["solver"] = diag_json(report.solver_diag);
  out["timing_s"] = report.timing_s;
  write_json_file(args.out_path, out);

  json resolved = {{"verb", "estimate"},
                   {"data", args.data_path},
                   {"mask", args.mask_path},
                   {"gamma", args.gamma_path},
                   {"alpha", args.alpha},
                   {"tau_scale", args.tau_scale},
                   {"lambda", args.lambda},
                   {"hn", args.hn},
                   {"threshold", args.threshold},
                   {"refit", args.refit},
                   {"eps", args.solver.eps_primal},
                   {"max_iters", args.solver.max_iters},
                   {"resolved_tuning", tuning_json(report.tuning)}};
  if (args.sigma_w) resolved["sigma_w"] = *args.sigma_w;
  write_json_file(sidecar_for(args.out_path, false), resolved);

  log_info("estimate: " + std::string(solver::to_string(report.solver_diag.status)) + " in " +
           std::to_string(report.solver_diag.iterations) + " iterations, wrote " + args.out_path);
  if (report.solver_diag.status != solver::SolveStatus::Optimal && args.strict) return 2;
  return 0;
}

// ---------------------------------------------------------------- baseline

struct BaselineArgs {
  std::string method;
  std::string design = "observed";
  std::string data_path;
  std::string mask_path;
  std::string gamma_path;
  std::optional<double> sigma_w;
  std::string oracle_x_path;
  std::optional<double> lambda;
  double sigma = 1.0;
  double alpha = 0.05;
  double scale_c = 1.1;
  double sigma_xi = 1.0;
  double epsilon = 0.05;
  std::optional<double> mu;
  double brt_lambda = 1.0;
  solver::SolverSettings solver;
  std::string out_path;
  std::string log = "info";
};

int run_baseline(BaselineArgs& args) {
  const Dataset raw = io::read_dataset_csv(args.data_path, args.mask_path);
  const bool oracle = args.design == "oracle";
  finish_solver_flags(args.solver);

  RealMatrix X;
  if (oracle) {
    if (args.oracle_x_path.empty())
      throw CLI::ValidationError("--design", "oracle design requires --oracle-x");
    X = io::read_matrix_csv(args.oracle_x_path);
    if (X.rows() != raw.n() || X.cols() != raw.p())
      throw CLI::ValidationError("--oracle-x", "shape differs from the dataset");
  } else {
    X = raw.Z;
  }

  const auto t0 = std::chrono::steady_clock::now();
  RealVector beta;
  double lambda_used = std::numeric_limits<double>::quiet_NaN();
  if (args.method == "lasso") {
    lambda_used = args.lambda ? *args.lambda
                              : baselines::lasso_default_lambda(raw.n(), raw.p(), args.alpha,
                                                                args.scale_c, args.sigma);
    beta = baselines::lasso(X, raw.y, lambda_used);
  } else if (args.method == "dantzig") {
    lambda_used = args.lambda ? *args.lambda : baselines::dantzig_default_lambda(raw.n(), raw.p());
    beta = baselines::dantzig(X, raw.y, lambda_used, args.solver);
  } else {
    Dataset data;
    GammaEstimate gamma;
    if (oracle) {
      data.y = raw.y;
      data.Z = X;
      data.provenance = Provenance::External;
      gamma.diag = RealVector::Zero(raw.p());
    } else {
      std::tie(data, gamma) = resolve_inputs(raw, args.gamma_path, args.sigma_w);
    }
    const double mu = args.mu ? *args.mu : std::numeric_limits<double>::quiet_NaN();
    beta = baselines::brt_conic(data, gamma, args.sigma_xi, args.epsilon, mu, args.brt_lambda,
                                args.solver);
    lambda_used = args.brt_lambda;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json out = {{"method", args.method},
              {"design", args.design},
              {"lambda", lambda_used},
              {"beta", vec(beta)},
              {"nnz", (beta.array().abs() > 0.0).count()},
              {"timing_s", elapsed}};
  write_json_file(args.out_path, out);

  json resolved = {{"verb", "baseline"},       {"method", args.method},
                   {"design", args.design},    {"data", args.data_path},
                   {"mask", args.mask_path},   {"gamma", args.gamma_path},
                   {"oracle_x", args.oracle_x_path},
                   {"lambda", lambda_used},    {"sigma", args.sigma},
                   {"alpha", args.alpha},      {"scale_c", args.scale_c},
                   {"sigma_xi", args.sigma_xi},{"epsilon", args.epsilon},
                   {"brt_lambda", args.brt_lambda},
                   {"eps", args.solver.eps_primal},
                   {"max_iters", args.solver.max_iters}};
  if (args.sigma_w) resolved["sigma_w"] = *args.sigma_w;
  if (args.mu) resolved["mu"] = *args.mu;
  write_json_file(sidecar_for(args.out_path, false), resolved);

  log_info("baseline: " + args.method + " (" + args.design + " design) wrote " + args.out_path);
  return 0;
}

// ---------------------------------------------------------------- replicate

struct ReplicateArgs {
  std::string table;
  std::optional<long> reps;
  std::optional<std::uint64_t> seed;
  std::optional<Index> n, p;
  int parallelism = default_parallelism();
  std::optional<double> eps;
  std::optional<long> max_iters;
  bool strict = false;
  std::string out_dir;
  std::string log = "info";
};

int run_replicate(ReplicateArgs& args) {
  metrics::ReplicationPlan plan;
  if (fs::exists(args.table) && !fs::is_directory(args.table)) {
    std::ifstream in(args.table);
    std::stringstream buffer;
    buffer << in.rdbuf();
    plan = metrics::plan_from_json(buffer.str());
  } else {
    plan = metrics::make_preset(args.table);
  }
  if (args.reps) plan.reps = *args.reps;
  if (args.seed) plan.master_seed = *args.seed;
  if (args.n) plan.sim.n = *args.n;
  if (args.p) plan.sim.p = *args.p;
  if (args.eps) {
    plan.solver.eps_primal = *args.eps;
    plan.solver.eps_dual = *args.eps;
    plan.solver.eps_gap = *args.eps;
  }
  if (args.max_iters) plan.solver.max_iters = *args.max_iters;
  plan.parallelism = args.parallelism;
  plan.out_dir = args.out_dir;

  log_info("replicate: " + args.table + ", " + std::to_string(plan.reps) + " reps, parallelism " +
           std::to_string(plan.parallelism));
  const std::vector<metrics::MetricRow> rows = metrics::run_replications(plan);

  long failures = 0;
  for (const auto& row : rows) failures += row.failures;
  log_info("replicate: wrote " + (fs::path(args.out_dir) / "rows.csv").string() + " (" +
           std::to_string(rows.size()) + " method rows, " + std::to_string(failures) +
           " non-optimal solves)");
  return (args.strict && failures > 0) ? 2 : 0;
}

// ---------------------------------------------------------------- solve-socp

struct SolveArgs {
  std::string program_path;
  solver::SolverSettings solver;
  std::optional<double> rho;
  bool strict = false;
  std::string out_path;
  std::string log = "info";
};

int run_solve(SolveArgs& args) {
  const solver::ConicProgram program = solver::read_program_file(args.program_path);
  program.validate();
  finish_solver_flags(args.solver);
  if (args.rho) args.solver.rho = *args.rho;

  const solver::SolverResult result = solver::solve(program, args.solver);

  json out = {{"status", solver::to_string(result.status)},
              {"iterations", result.iterations},
              {"primal_residual", result.primal_residual},
              {"dual_residual", result.dual_residual},
              {"gap", result.gap},
              {"objective", program.objective.dot(result.theta)},
              {"theta", vec(result.theta)},
              {"slack", vec(result.slack)},
              {"dual", vec(result.dual)}};
  write_json_file(args.out_path, out);

  json resolved = {{"verb", "solve-socp"},
                   {"program", args.program_path},
                   {"eps", args.solver.eps_primal},
                   {"max_iters", args.solver.max_iters},
                   {"rho", args.solver.rho},
                   {"strict", args.strict}};
  write_json_file(sidecar_for(args.out_path, false), resolved);

  log_info("solve-socp: " + std::string(solver::to_string(result.status)) + " in " +
           std::to_string(result.iterations) + " iterations, objective " +
           std::to_string(program.objective.dot(result.theta)));
  if (result.status != solver::SolveStatus::Optimal && args.strict) return 2;
  return 0;
}

// ---------------------------------------------------------------- kappa

struct KappaArgs {
  std::string psi_path;
  std::optional<double> ar1;
  Index p = 5;
  Index s = 1;
  double u = 3.0;
  std::string q = "linf";
  std::string mode = "exact";
  long samples = 10000;
  std::string out_path;
  std::string log = "info";
};

int run_kappa(KappaArgs& args) {
  sensitivity::SensitivityQuery query;
  if (!args.psi_path.empty()) {
    query.psi = io::read_matrix_csv(args.psi_path);
  } else if (args.ar1) {
    query.psi.resize(args.p, args.p);
    for (Index i = 0; i < args.p; ++i)
      for (Index j = 0; j < args.p; ++j)
        query.psi(i, j) = std::pow(*args.ar1, std::abs(double(i - j)));
  } else {
    throw CLI::ValidationError("kappa", "supply --psi or --ar1");
  }
  query.s = args.s;
  query.u = args.u;
  query.q = args.q == "l1" ? mathcore::Norm::L1
            : args.q == "l2" ? mathcore::Norm::L2
                             : mathcore::Norm::Linf;

  const double value = args.mode == "sample" ? sensitivity::kappa_lower_bound(query, args.samples)
                                             : sensitivity::kappa_exact(query);
  std::printf("%.12g\n", value);
  if (!args.out_path.empty()) {
    write_json_file(args.out_path, json{{"kappa", value},
                                        {"mode", args.mode},
                                        {"q", args.q},
                                        {"s", args.s},
                                        {"u", args.u},
                                        {"p", query.psi.rows()},
                                        {"samples", args.samples}});
    write_json_file(sidecar_for(args.out_path, false),
                    json{{"verb", "kappa"},
                         {"psi", args.psi_path},
                         {"ar1", args.ar1 ? json(*args.ar1) : json(nullptr)},
                         {"p", args.p},
                         {"s", args.s},
                         {"u", args.u},
                         {"q", args.q},
                         {"mode", args.mode},
                         {"samples", args.samples}});
  }
  return 0;
}

}  // namespace

// ---------------------------------------------------------------- dispatch

int main(int argc, char** argv) {
  CLI::App app{"Self-normalized conic estimation for linear regression with noisy designs",
               "sn_conic"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "Draw a synthetic dataset and write it out");
  c_sim->add_option("--n", sim.sim.n, "Sample size")->capture_default_str();
  c_sim->add_option("--p", sim.sim.p, "Number of covariates")->capture_default_str();
  c_sim->add_option("--rho", sim.sim.rho, "AR(1) design correlation")->capture_default_str();
  c_sim->add_option("--sigma-xi", sim.sim.sigma_xi, "Regression noise scale")
      ->capture_default_str();
  c_sim->add_option("--sigma-w", sim.sim.sigma_w, "Covariate noise scale (case1)")
      ->capture_default_str();
  c_sim->add_option("--beta", sim.beta, "Coefficient pattern: separated5, separated6, unseparated")
      ->capture_default_str()
      ->check(CLI::IsMember({"separated5", "separated6", "unseparated"}));
  c_sim->add_option("--regime", sim.regime,
                    "case1 = additive covariate noise, case2 = missing at random")
      ->capture_default_str()
      ->check(CLI::IsMember({"case1", "case2"}));
  c_sim->add_option("--pi-low", sim.sim.pi_low, "Missingness lower bound (case2)")
      ->capture_default_str();
  c_sim->add_option("--pi-high", sim.sim.pi_high, "Missingness upper bound (case2)")
      ->capture_default_str();
  c_sim->add_option("--seed", sim.sim.seed, "Master seed")->capture_default_str();
  c_sim->add_option("--rep", sim.rep, "Replication substream index")->capture_default_str();
  c_sim->add_option("--out", sim.out_dir, "Output directory")->required();
  c_sim->add_flag("--write-oracle-x", sim.write_oracle_x,
                  "Also write the noiseless design matrix");
  add_log_flag(c_sim, sim.log);

  EstimateArgs est;
  CLI::App* c_est = app.add_subcommand("estimate", "Fit the estimator to a dataset on disk");
  c_est->add_option("--data", est.data_path, "Dataset CSV (header y,z1..zp)")
      ->required()
      ->check(CLI::ExistingFile);
  c_est->add_option("--mask", est.mask_path, "0/1 observation mask CSV (missing-at-random data)")
      ->check(CLI::ExistingFile);
  c_est->add_option("--gamma", est.gamma_path, "Bias-correction JSON {diag, b_eps, eps}")
      ->check(CLI::ExistingFile);
  c_est->add_option("--sigma-w", est.sigma_w, "Known additive covariate noise scale");
  c_est->add_option("--alpha", est.alpha, "Confidence level for the tau formula")
      ->capture_default_str();
  c_est->add_option("--tau-scale", est.tau_scale, "Multiplier c in the tau formula")
      ->capture_default_str();
  c_est->add_option("--lambda", est.lambda, "Penalty weights: 'theoretical' or 'fixed:LT,LU'")
      ->capture_default_str();
  c_est->add_option("--hn", est.hn,
                    "Weighted-Gram norm mode for theoretical weights: exact, upper, auto")
      ->capture_default_str()
      ->check(CLI::IsMember({"exact", "upper", "auto"}));
  c_est->add_flag("--threshold", est.threshold, "Include the thresholded estimate in the report");
  c_est->add_flag("--refit", est.refit, "Refit on the thresholded support");
  c_est->add_flag("--strict", est.strict, "Exit 2 when the solver does not reach Optimal");
  add_solver_flags(c_est, est.solver);
  c_est->add_option("--out", est.out_path, "Report JSON path")->required();
  add_log_flag(c_est, est.log);

  BaselineArgs base;
  CLI::App* c_base = app.add_subcommand("baseline", "Fit a comparison estimator");
  c_base->add_option("--method", base.method, "lasso, dantzig or brt-conic")
      ->required()
      ->check(CLI::IsMember({"lasso", "dantzig", "brt-conic"}));
  c_base->add_option("--design", base.design, "observed = noisy Z, oracle = noiseless X")
      ->capture_default_str()
      ->check(CLI::IsMember({"observed", "oracle"}));
  c_base->add_option("--data", base.data_path, "Dataset CSV (header y,z1..zp)")
      ->required()
      ->check(CLI::ExistingFile);
  c_base->add_option("--mask", base.mask_path, "0/1 observation mask CSV")
      ->check(CLI::ExistingFile);
  c_base->add_option("--gamma", base.gamma_path, "Bias-correction JSON (brt-conic, observed)")
      ->check(CLI::ExistingFile);
  c_base->add_option("--sigma-w", base.sigma_w, "Known additive covariate noise scale");
  c_base->add_option("--oracle-x", base.oracle_x_path, "Noiseless design CSV (oracle design)")
      ->check(CLI::ExistingFile);
  c_base->add_option("--lambda", base.lambda, "Penalty level; default uses the tuning formula");
  c_base->add_option("--sigma", base.sigma, "Noise scale in the lasso tuning formula")
      ->capture_default_str();
  c_base->add_option("--alpha", base.alpha, "Confidence level in the lasso tuning formula")
      ->capture_default_str();
  c_base->add_option("--scale-c", base.scale_c, "Multiplier in the lasso tuning formula")
      ->capture_default_str();
  c_base->add_option("--sigma-xi", base.sigma_xi, "Regression noise scale (brt-conic)")
      ->capture_default_str();
  c_base->add_option("--epsilon", base.epsilon, "Tail level in the brt-conic tuning")
      ->capture_default_str();
  c_base->add_option("--mu", base.mu, "brt-conic cone weight; default sqrt(log(p/eps)/n)");
  c_base->add_option("--brt-lambda", base.brt_lambda, "brt-conic radius penalty")
      ->capture_default_str();
  add_solver_flags(c_base, base.solver);
  c_base->add_option("--out", base.out_path, "Report JSON path")->required();
  add_log_flag(c_base, base.log);

  ReplicateArgs rep;
  CLI::App* c_rep = app.add_subcommand("replicate", "Run a Monte Carlo study");
  c_rep->add_option("--table", rep.table,
                    "Preset name (t1, s2, s2-long, s6, s6-long) or a plan JSON path")
      ->required();
  c_rep->add_option("--reps", rep.reps, "Override the replication count");
  c_rep->add_option("--seed", rep.seed, "Override the master seed");
  c_rep->add_option("--n", rep.n, "Override the sample size");
  c_rep->add_option("--p", rep.p, "Override the number of covariates");
  c_rep->add_option("--parallelism", rep.parallelism,
                    "Worker threads (default: SN_CONIC_THREADS or 1)")
      ->capture_default_str();
  c_rep->add_option("--eps", rep.eps, "Override the solver tolerance");
  c_rep->add_option("--max-iters", rep.max_iters, "Override the solver iteration cap");
  c_rep->add_flag("--strict", rep.strict, "Exit 2 when any solve is non-optimal");
  c_rep->add_option("--out", rep.out_dir, "Output directory")->required();
  add_log_flag(c_rep, rep.log);

  SolveArgs sol;
  CLI::App* c_sol = app.add_subcommand("solve-socp", "Solve a conic program from a problem file");
  c_sol->add_option("--program", sol.program_path, "Plain-text problem file")
      ->required()
      ->check(CLI::ExistingFile);
  add_solver_flags(c_sol, sol.solver);
  c_sol->add_option("--rho", sol.rho, "Initial splitting penalty");
  c_sol->add_flag("--strict", sol.strict, "Exit 2 when the solver does not reach Optimal");
  c_sol->add_option("--out", sol.out_path, "Solution JSON path")->required();
  add_log_flag(c_sol, sol.log);

  KappaArgs kap;
  CLI::App* c_kap = app.add_subcommand("kappa", "Sensitivity characteristic of a Gram matrix");
  c_kap->group("");  // exploration verb, hidden from the main help
  c_kap->add_option("--psi", kap.psi_path, "Gram matrix CSV")->check(CLI::ExistingFile);
  c_kap->add_option("--ar1", kap.ar1, "Build a p x p AR(1) Gram matrix instead");
  c_kap->add_option("--p", kap.p, "Dimension for --ar1")->capture_default_str();
  c_kap->add_option("--s", kap.s, "Support size")->capture_default_str();
  c_kap->add_option("--u", kap.u, "Cone opening")->capture_default_str();
  c_kap->add_option("--q", kap.q, "Normalizing norm: l1, l2, linf")
      ->capture_default_str()
      ->check(CLI::IsMember({"l1", "l2", "linf"}));
  c_kap->add_option("--mode", kap.mode, "exact (p <= 12) or sample")
      ->capture_default_str()
      ->check(CLI::IsMember({"exact", "sample"}));
  c_kap->add_option("--samples", kap.samples, "Sample count for --mode sample")
      ->capture_default_str();
  c_kap->add_option("--out", kap.out_path, "Optional result JSON path");
  add_log_flag(c_kap, kap.log);

  int rc = 0;
  c_sim->callback([&] { g_log = parse_log(sim.log); rc = run_simulate(sim); });
  c_est->callback([&] { g_log = parse_log(est.log); rc = run_estimate(est); });
  c_base->callback([&] { g_log = parse_log(base.log); rc = run_baseline(base); });
  c_rep->callback([&] { g_log = parse_log(rep.log); rc = run_replicate(rep); });
  c_sol->callback([&] { g_log = parse_log(sol.log); rc = run_solve(sol); });
  c_kap->callback([&] { g_log = parse_log(kap.log); rc = run_kappa(kap); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
