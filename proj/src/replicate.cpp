#include "snconic/replicate.hpp"

#include "snconic/baselines.hpp"
#include "snconic/gamma_estimation.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace snconic::metrics {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::uint64_t h, const double* data, Index count) {
  const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
  const std::size_t len = static_cast<std::size_t>(count) * sizeof(double);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t draw_checksum(const simgen::SimDraw& draw) {
  std::uint64_t h = 14695981039346656037ull;
  h = fnv1a(h, draw.dataset.y.data(), draw.dataset.y.size());
  h = fnv1a(h, draw.dataset.Z.data(), draw.dataset.Z.size());
  if (draw.dataset.mask) h = fnv1a(h, draw.dataset.mask->data(), draw.dataset.mask->size());
  h = fnv1a(h, draw.oracle_x.data(), draw.oracle_x.size());
  h = fnv1a(h, draw.beta0.data(), draw.beta0.size());
  h = fnv1a(h, draw.xi.data(), draw.xi.size());
  return h;
}

struct RepRecord {
  std::string label;
  RealVector beta;
  double time_s = 0;
  bool failed = false;
};

struct RepResult {
  std::vector<RepRecord> records;
  RealMatrix oracle_x;
  RealVector beta0;
  std::optional<double> pi_used;
  std::uint64_t checksum = 0;
};

// Observed-design dataset + bias correction for the draw's regime.
std::pair<Dataset, GammaEstimate> observed_inputs(const simgen::SimDraw& draw,
                                                  const simgen::SimConfig& sim) {
  if (draw.dataset.mask) {
    gammaest::MarResult mar = gammaest::mar_estimate(draw.dataset);
    return {std::move(mar.surrogate), std::move(mar.gamma)};
  }
  return {draw.dataset, gammaest::known_additive(sim.sigma_w, draw.dataset.p())};
}

std::pair<Dataset, GammaEstimate> oracle_inputs(const simgen::SimDraw& draw) {
  Dataset oracle;
  oracle.y = draw.dataset.y;
  oracle.Z = draw.oracle_x;
  oracle.provenance = Provenance::External;
  GammaEstimate gamma;
  gamma.diag = RealVector::Zero(draw.oracle_x.cols());
  return {std::move(oracle), std::move(gamma)};
}

void run_method(const MethodConfig& method, const simgen::SimDraw& draw,
                const ReplicationPlan& plan, std::vector<RepRecord>& out) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  switch (method.kind) {
    case MethodKind::SnConic: {
      auto [data, gamma] = method.oracle_design ? oracle_inputs(draw)
                                                : observed_inputs(draw, plan.sim);
      estimator::SnConfig config;
      config.alpha = plan.alpha;
      config.tau_scale = method.tau_scale;
      config.lambda_mode = method.lambda_mode;
      config.lambda_t = method.lambda_t;
      config.lambda_u = method.lambda_u;
      config.hn_mode = method.hn_mode;
      config.solver = plan.solver;
      config.refit = method.emit_refit;
      const estimator::EstimateReport report = estimator::fit(data, gamma, config);
      const bool failed = report.solver_diag.status != solver::SolveStatus::Optimal;
      out.push_back({method.label, report.beta_hat, report.timing_s, failed});
      if (method.emit_thresholded)
        out.push_back({method.label + "_thresholded", report.beta_thresholded, report.timing_s,
                       failed});
      if (method.emit_refit)
        out.push_back({method.label + "_refit", *report.beta_refit, elapsed(), failed});
      return;
    }
    case MethodKind::BrtConic: {
      auto [data, gamma] = method.oracle_design ? oracle_inputs(draw)
                                                : observed_inputs(draw, plan.sim);
      RealVector beta = baselines::brt_conic(data, gamma, method.sigma_xi, method.epsilon,
                                             method.mu, method.brt_lambda, plan.solver);
      out.push_back({method.label, std::move(beta), elapsed(), false});
      return;
    }
    case MethodKind::Lasso: {
      const RealMatrix& X = method.oracle_design ? draw.oracle_x : draw.dataset.Z;
      const double lambda =
          std::isnan(method.lambda)
              ? baselines::lasso_default_lambda(X.rows(), X.cols(), plan.alpha, 1.1,
                                                method.sigma_xi)
              : method.lambda;
      RealVector beta = baselines::lasso(X, draw.dataset.y, lambda);
      out.push_back({method.label, std::move(beta), elapsed(), false});
      return;
    }
    case MethodKind::Dantzig: {
      const RealMatrix& X = method.oracle_design ? draw.oracle_x : draw.dataset.Z;
      const double lambda = std::isnan(method.lambda)
                                ? baselines::dantzig_default_lambda(X.rows(), X.cols())
                                : method.lambda;
      RealVector beta = baselines::dantzig(X, draw.dataset.y, lambda, plan.solver);
      out.push_back({method.label, std::move(beta), elapsed(), false});
      return;
    }
  }
  throw std::logic_error("run_method: unknown method kind");
}

RepResult run_rep(const ReplicationPlan& plan, long rep) {
  simgen::SimConfig sim = plan.sim;
  sim.seed = plan.master_seed;
  const simgen::SimDraw draw = simgen::generate(sim, static_cast<std::uint64_t>(rep));
  RepResult result;
  result.checksum = draw_checksum(draw);
  for (const MethodConfig& method : plan.methods) {
    run_method(method, draw, plan, result.records);
    // every method must consume the identical draw
    if (draw_checksum(draw) != result.checksum)
      throw std::logic_error("run_replications: a method mutated the shared draw");
  }
  result.oracle_x = draw.oracle_x;
  result.beta0 = draw.beta0;
  result.pi_used = draw.pi_used;
  return result;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_rep_jsonl(const std::string& dir, long rep, const RepResult& result) {
  std::ofstream out(dir + "/rep_" + std::to_string(rep) + ".jsonl", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write rep file in " + dir);
  json head;
  head["rep"] = rep;
  head["draw_fnv"] = hex64(result.checksum);
  head["beta0"] = std::vector<double>(result.beta0.data(), result.beta0.data() + result.beta0.size());
  if (result.pi_used) head["pi_used"] = *result.pi_used;
  out << head.dump() << "\n";
  for (const RepRecord& rec : result.records) {
    json line;
    line["rep"] = rep;
    line["label"] = rec.label;
    line["beta"] = std::vector<double>(rec.beta.data(), rec.beta.data() + rec.beta.size());
    line["time_s"] = rec.time_s;
    line["failed"] = rec.failed;
    out << line.dump() << "\n";
  }
  if (!out) throw std::runtime_error("rep file write failed in " + dir);
}

const char* beta_kind_name(simgen::BetaKind kind) {
  switch (kind) {
    case simgen::BetaKind::Separated5: return "separated5";
    case simgen::BetaKind::Separated6: return "separated6";
    case simgen::BetaKind::Unseparated: return "unseparated";
    case simgen::BetaKind::Custom: return "custom";
  }
  return "?";
}

simgen::BetaKind beta_kind_from(const std::string& s) {
  if (s == "separated5") return simgen::BetaKind::Separated5;
  if (s == "separated6") return simgen::BetaKind::Separated6;
  if (s == "unseparated") return simgen::BetaKind::Unseparated;
  if (s == "custom") return simgen::BetaKind::Custom;
  throw std::runtime_error("plan: unknown beta kind '" + s + "'");
}

const char* method_kind_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::SnConic: return "sn_conic";
    case MethodKind::BrtConic: return "brt_conic";
    case MethodKind::Lasso: return "lasso";
    case MethodKind::Dantzig: return "dantzig";
  }
  return "?";
}

MethodKind method_kind_from(const std::string& s) {
  if (s == "sn_conic") return MethodKind::SnConic;
  if (s == "brt_conic") return MethodKind::BrtConic;
  if (s == "lasso") return MethodKind::Lasso;
  if (s == "dantzig") return MethodKind::Dantzig;
  throw std::runtime_error("plan: unknown method kind '" + s + "'");
}

}  // namespace

std::vector<MetricRow> run_replications(const ReplicationPlan& plan) {
  if (plan.reps < 1) throw std::invalid_argument("run_replications: reps < 1");
  if (plan.parallelism < 1) throw std::invalid_argument("run_replications: parallelism < 1");
  if (plan.methods.empty()) throw std::invalid_argument("run_replications: no methods");

  std::vector<RepResult> results(static_cast<std::size_t>(plan.reps));
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const long rep = next.fetch_add(1);
      if (rep >= plan.reps) return;
      try {
        results[static_cast<std::size_t>(rep)] = run_rep(plan, rep);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const long workers = std::min<long>(plan.parallelism, plan.reps);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (long w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  // deterministic sequential reduce ordered by rep index
  std::vector<std::string> labels;
  for (const auto& rec : results.front().records) labels.push_back(rec.label);
  std::vector<MetricRow> rows;
  std::vector<RealMatrix> designs;
  designs.reserve(results.size());
  for (const auto& res : results) designs.push_back(res.oracle_x);
  for (std::size_t li = 0; li < labels.size(); ++li) {
    std::vector<RealVector> estimates;
    std::vector<double> times;
    long failures = 0;
    estimates.reserve(results.size());
    for (const auto& res : results) {
      if (res.records.size() != labels.size() || res.records[li].label != labels[li])
        throw std::logic_error("run_replications: inconsistent per-rep record layout");
      estimates.push_back(res.records[li].beta);
      times.push_back(res.records[li].time_s);
      failures += res.records[li].failed ? 1 : 0;
    }
    MetricRow row = compute_metrics(labels[li], estimates, results.front().beta0, designs, times);
    row.failures = failures;
    rows.push_back(std::move(row));
  }

  if (!plan.out_dir.empty()) {
    namespace fs = std::filesystem;
    const fs::path root(plan.out_dir);
    fs::create_directories(root / "reps");
    write_table(rows, (root / "rows.csv").string(), TableFormat::CSV);
    write_table(rows, (root / "rows.md").string(), TableFormat::Markdown);
    std::ofstream plan_out(root / "plan.json", std::ios::binary);
    if (!plan_out) throw std::runtime_error("cannot write plan.json in " + plan.out_dir);
    plan_out << plan_to_json(plan) << "\n";
    for (long rep = 0; rep < plan.reps; ++rep)
      write_rep_jsonl((root / "reps").string(), rep, results[static_cast<std::size_t>(rep)]);
  }
  return rows;
}

ReplicationPlan make_preset(const std::string& name) {
  ReplicationPlan plan;
  plan.sim.n = 300;
  plan.sim.p = 100;
  plan.sim.rho = 0.5;
  plan.sim.sigma_xi = 1.0;
  plan.sim.sigma_w = 1.0;
  plan.reps = 100;
  plan.master_seed = 42;
  // A small share of draws has a dense, flat optimum where the splitting
  // iteration grinds toward 1e-7 without reaching it; the estimate itself is
  // stable long before.  Cap the per-solve budget so those draws cost a
  // bounded amount and surface in the failures column instead of the clock.
  plan.solver.max_iters = 50000;

  auto sn = [](const std::string& label, double c, bool extras) {
    MethodConfig m;
    m.label = label;
    m.kind = MethodKind::SnConic;
    m.tau_scale = c;
    m.lambda_mode = estimator::LambdaMode::Fixed;
    m.lambda_t = 1.0;
    m.lambda_u = 0.25;
    m.emit_thresholded = extras;
    m.emit_refit = extras;
    return m;
  };
  auto simple = [](const std::string& label, MethodKind kind, bool oracle) {
    MethodConfig m;
    m.label = label;
    m.kind = kind;
    m.oracle_design = oracle;
    return m;
  };

  if (name == "t1") {
    plan.sim.beta_kind = simgen::BetaKind::Separated5;
    plan.sim.regime = simgen::Regime::AdditiveEIV;
    plan.methods = {sn("sn_conic", 0.5, false),
                    simple("conic", MethodKind::BrtConic, false),
                    simple("lasso_biased", MethodKind::Lasso, false),
                    simple("lasso_oracle", MethodKind::Lasso, true)};
    return plan;
  }
  if (name == "s2" || name == "s2-long") {
    plan.sim.beta_kind = simgen::BetaKind::Separated6;
    plan.sim.regime = simgen::Regime::AdditiveEIV;
    if (name == "s2-long") plan.sim.p = 400;
    plan.methods = {sn("sn_conic_c1", 1.0, true),
                    sn("sn_conic_c05", 0.5, true),
                    simple("conic_oracle", MethodKind::BrtConic, true),
                    simple("lasso_biased", MethodKind::Lasso, false),
                    simple("lasso_oracle", MethodKind::Lasso, true),
                    simple("dantzig_biased", MethodKind::Dantzig, false),
                    simple("dantzig_oracle", MethodKind::Dantzig, true)};
    return plan;
  }
  if (name == "s6" || name == "s6-long") {
    plan.sim.beta_kind = simgen::BetaKind::Separated6;
    plan.sim.regime = simgen::Regime::MAR;
    plan.sim.pi_low = 0.1;
    plan.sim.pi_high = 0.75;
    if (name == "s6-long") plan.sim.p = 400;
    plan.methods = {sn("sn_conic_c1", 1.0, true),
                    sn("sn_conic_c05", 0.5, true),
                    simple("conic_oracle", MethodKind::BrtConic, true),
                    simple("lasso_biased", MethodKind::Lasso, false),
                    simple("lasso_oracle", MethodKind::Lasso, true),
                    simple("dantzig_biased", MethodKind::Dantzig, false),
                    simple("dantzig_oracle", MethodKind::Dantzig, true)};
    return plan;
  }
  throw std::invalid_argument("make_preset: unknown preset '" + name +
                              "' (available: t1, s2, s2-long, s6, s6-long)");
}

std::string plan_to_json(const ReplicationPlan& plan) {
  json j;
  j["sim"] = {{"n", plan.sim.n},
              {"p", plan.sim.p},
              {"rho", plan.sim.rho},
              {"sigma_xi", plan.sim.sigma_xi},
              {"sigma_w", plan.sim.sigma_w},
              {"beta_kind", beta_kind_name(plan.sim.beta_kind)},
              {"regime", plan.sim.regime == simgen::Regime::AdditiveEIV ? "additive" : "mar"},
              {"pi_low", plan.sim.pi_low},
              {"pi_high", plan.sim.pi_high}};
  if (plan.sim.beta_kind == simgen::BetaKind::Custom)
    j["sim"]["beta_custom"] = std::vector<double>(
        plan.sim.beta_custom.data(), plan.sim.beta_custom.data() + plan.sim.beta_custom.size());
  j["methods"] = json::array();
  for (const auto& m : plan.methods) {
    json mj;
    mj["label"] = m.label;
    mj["kind"] = method_kind_name(m.kind);
    mj["oracle_design"] = m.oracle_design;
    if (m.kind == MethodKind::SnConic) {
      mj["tau_scale"] = m.tau_scale;
      mj["lambda_mode"] =
          m.lambda_mode == estimator::LambdaMode::Theoretical ? "theoretical" : "fixed";
      mj["lambda_t"] = m.lambda_t;
      mj["lambda_u"] = m.lambda_u;
      mj["hn_mode"] = m.hn_mode == estimator::HnMode::Exact ? "exact" : "upper_bound";
      mj["emit_thresholded"] = m.emit_thresholded;
      mj["emit_refit"] = m.emit_refit;
    }
    if (m.kind == MethodKind::Lasso || m.kind == MethodKind::Dantzig) {
      if (!std::isnan(m.lambda)) mj["lambda"] = m.lambda;
      mj["sigma_xi"] = m.sigma_xi;
    }
    if (m.kind == MethodKind::BrtConic) {
      mj["sigma_xi"] = m.sigma_xi;
      mj["epsilon"] = m.epsilon;
      if (!std::isnan(m.mu)) mj["mu"] = m.mu;
      mj["brt_lambda"] = m.brt_lambda;
    }
    j["methods"].push_back(mj);
  }
  j["reps"] = plan.reps;
  j["master_seed"] = plan.master_seed;
  j["parallelism"] = plan.parallelism;
  j["alpha"] = plan.alpha;
  j["solver"] = {{"eps_primal", plan.solver.eps_primal},
                 {"eps_dual", plan.solver.eps_dual},
                 {"eps_gap", plan.solver.eps_gap},
                 {"max_iters", plan.solver.max_iters},
                 {"relaxation", plan.solver.relaxation},
                 {"scaling", plan.solver.scaling}};
  return j.dump(2);
}

ReplicationPlan plan_from_json(const std::string& text) {
  const json j = json::parse(text);
  ReplicationPlan plan;
  const json& sim = j.at("sim");
  plan.sim.n = sim.value("n", Index{100});
  plan.sim.p = sim.value("p", Index{10});
  plan.sim.rho = sim.value("rho", 0.5);
  plan.sim.sigma_xi = sim.value("sigma_xi", 1.0);
  plan.sim.sigma_w = sim.value("sigma_w", 1.0);
  plan.sim.beta_kind = beta_kind_from(sim.value("beta_kind", "separated5"));
  const std::string regime = sim.value("regime", "additive");
  if (regime == "additive") plan.sim.regime = simgen::Regime::AdditiveEIV;
  else if (regime == "mar") plan.sim.regime = simgen::Regime::MAR;
  else throw std::runtime_error("plan: unknown regime '" + regime + "'");
  plan.sim.pi_low = sim.value("pi_low", 0.1);
  plan.sim.pi_high = sim.value("pi_high", 0.75);
  if (sim.contains("beta_custom")) {
    const auto v = sim["beta_custom"].get<std::vector<double>>();
    plan.sim.beta_custom = Eigen::Map<const RealVector>(v.data(), static_cast<Index>(v.size()));
  }
  for (const json& mj : j.at("methods")) {
    MethodConfig m;
    m.label = mj.at("label").get<std::string>();
    m.kind = method_kind_from(mj.at("kind").get<std::string>());
    m.oracle_design = mj.value("oracle_design", false);
    m.tau_scale = mj.value("tau_scale", 1.0);
    m.lambda_mode = mj.value("lambda_mode", "fixed") == std::string("theoretical")
                        ? estimator::LambdaMode::Theoretical
                        : estimator::LambdaMode::Fixed;
    m.lambda_t = mj.value("lambda_t", 1.0);
    m.lambda_u = mj.value("lambda_u", 0.25);
    m.hn_mode = mj.value("hn_mode", "exact") == std::string("upper_bound")
                    ? estimator::HnMode::UpperBound
                    : estimator::HnMode::Exact;
    m.emit_thresholded = mj.value("emit_thresholded", false);
    m.emit_refit = mj.value("emit_refit", false);
    if (mj.contains("lambda")) m.lambda = mj["lambda"].get<double>();
    m.sigma_xi = mj.value("sigma_xi", 1.0);
    m.epsilon = mj.value("epsilon", 0.05);
    if (mj.contains("mu")) m.mu = mj["mu"].get<double>();
    m.brt_lambda = mj.value("brt_lambda", 1.0);
    plan.methods.push_back(std::move(m));
  }
  plan.reps = j.value("reps", 100L);
  plan.master_seed = j.value("master_seed", std::uint64_t{42});
  plan.parallelism = j.value("parallelism", 1);
  plan.alpha = j.value("alpha", 0.05);
  if (j.contains("solver")) {
    const json& s = j["solver"];
    plan.solver.eps_primal = s.value("eps_primal", plan.solver.eps_primal);
    plan.solver.eps_dual = s.value("eps_dual", plan.solver.eps_dual);
    plan.solver.eps_gap = s.value("eps_gap", plan.solver.eps_gap);
    plan.solver.max_iters = s.value("max_iters", plan.solver.max_iters);
    plan.solver.relaxation = s.value("relaxation", plan.solver.relaxation);
    plan.solver.scaling = s.value("scaling", plan.solver.scaling);
  }
  return plan;
}

}  // namespace snconic::metrics
