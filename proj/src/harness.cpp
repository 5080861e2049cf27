#include "spca/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "spca/error.hpp"
#include "spca/theory.hpp"

namespace spca {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidInput, msg); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open for writing: " + path.string());
  return out;
}

Method parse_method(const std::string& s) {
  if (s == "diag") return Method::Diag;
  if (s == "sdp") return Method::Sdp;
  invalid("unknown method '" + s + "'");
}

// Python string literal for an arbitrary path.
std::string py_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\\' || c == '"') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const char* to_string(Method m) { return m == Method::Diag ? "diag" : "sdp"; }

const char* to_string(SparsityKind k) {
  switch (k) {
    case SparsityKind::LogP: return "log_p";
    case SparsityKind::SqrtP: return "sqrt_p";
    case SparsityKind::LinearP: return "linear_p";
    case SparsityKind::Fixed: return "fixed";
  }
  return "unknown";
}

ScoreMode SweepSpec::effective_score_mode() const {
  if (score_mode) return *score_mode;
  return method == Method::Diag ? ScoreMode::Support : ScoreMode::Signed;
}

void SweepSpec::validate() const {
  if (dims.empty()) invalid("sweep: dims must be nonempty");
  if (theta_grid.empty()) invalid("sweep: theta_grid must be nonempty");
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    if (!(theta_grid[i] > 0.0) || !std::isfinite(theta_grid[i])) invalid("sweep: theta values must be positive");
    if (i > 0 && !(theta_grid[i] > theta_grid[i - 1])) invalid("sweep: theta_grid must be strictly increasing");
  }
  if (trials < 1) invalid("sweep: trials must be >= 1");
  if (workers < 1) invalid("sweep: workers must be >= 1");
  if (!(beta > 0.0)) invalid("sweep: beta must be > 0");
  if (!(sparsity.coefficient > 0.0)) invalid("sweep: sparsity coefficient must be > 0");
  if (method == Method::Diag && effective_score_mode() == ScoreMode::Signed)
    invalid("sweep: the diag method has no signed output");
  if (method == Method::Sdp) sdp.solver.validate();
  std::set<int> seen;
  for (int p : dims) {
    if (p < 3) invalid("sweep: every p must be >= 3");
    if (!seen.insert(p).second) invalid("sweep: duplicate p in dims");
    const int k = derive_k(p, sparsity);
    if (p - k < 2) invalid("sweep: p - k must be >= 2");
  }
}

int derive_k(int p, const SparsityRule& rule) {
  if (!(rule.coefficient > 0.0)) invalid("derive_k: coefficient must be > 0");
  double raw = 0.0;
  switch (rule.kind) {
    case SparsityKind::LogP: raw = rule.coefficient * std::log(static_cast<double>(p)); break;
    case SparsityKind::SqrtP: raw = rule.coefficient * std::sqrt(static_cast<double>(p)); break;
    case SparsityKind::LinearP: raw = rule.coefficient * p; break;
    case SparsityKind::Fixed: raw = rule.coefficient; break;
  }
  const long k = std::max(1L, std::lround(raw));
  return static_cast<int>(std::min<long>(k, p - 2));
}

int derive_n(double theta, int p, int k, Method method) {
  if (!(theta > 0.0)) invalid("derive_n: theta must be > 0");
  if (k < 1 || p - k < 2) invalid("derive_n: need k >= 1 and p - k >= 2");
  const double scale = (method == Method::Diag ? double(k) * k : double(k)) * std::log(double(p - k));
  return static_cast<int>(std::max(1L, std::lround(theta * scale)));
}

std::uint64_t trial_stream(int p, int theta_index, int trial_index) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(p));
  h = splitmix64(h ^ static_cast<std::uint64_t>(theta_index));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial_index));
}

TrialRecord run_trial(const SweepSpec& spec, int p, int theta_index, int trial_index) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord r;
  r.method = spec.method;
  r.p = p;
  r.k = derive_k(p, spec.sparsity);
  r.n = derive_n(spec.theta_grid.at(theta_index), p, r.k, spec.method);
  const ScalingPoint point{double(r.n), p, r.k};
  r.theta = spec.method == Method::Diag ? theta_dia(point) : theta_sdp(point);
  r.theta_index = theta_index;
  r.trial_index = trial_index;
  r.seed = spec.base_seed;
  r.stream = trial_stream(p, theta_index, trial_index);

  Rng rng = Rng(spec.base_seed).split(r.stream);
  const SpikedModel model = SpikedModel::random_identity(p, r.k, spec.beta, rng);
  const SymMatrix sigma_hat = sample_covariance(sample(model, r.n, rng));

  if (spec.method == Method::Diag) {
    const DecodeResult d = diag_threshold_decode(sigma_hat, r.k);
    r.margin = std::get<ThresholdDiagnostics>(d.diagnostics).margin;
    r.success = score(d, model, spec.effective_score_mode());
  } else {
    try {
      const DecodeResult d = sdp_decode(sigma_hat, r.k, spec.beta, spec.sdp);
      const auto& diag = std::get<SdpDiagnostics>(d.diagnostics);
      r.rank = diag.rank;
      r.iterations = diag.iterations;
      r.primal_residual = diag.primal_residual;
      r.dual_residual = diag.dual_residual;
      r.objective = diag.objective;
      r.success = score(d, model, spec.effective_score_mode());
    } catch (const SolverFailed& e) {
      r.solver_failed = true;
      r.success = false;
      r.iterations = e.iterations;
      r.primal_residual = e.primal_residual;
      r.dual_residual = e.dual_residual;
    }
  }
  if (spec.record_timing)
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<TrialRecord> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<int> dims = spec.dims;
  std::sort(dims.begin(), dims.end());

  struct Cell {
    int p, theta_index, trial_index;
  };
  std::vector<Cell> cells;
  for (int p : dims)
    for (int t = 0; t < static_cast<int>(spec.theta_grid.size()); ++t)
      for (int i = 0; i < spec.trials; ++i) cells.push_back({p, t, i});

  std::vector<TrialRecord> out(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        out[i] = run_trial(spec, cells[i].p, cells[i].theta_index, cells[i].trial_index);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
      }
    }
  };
  const int n_threads = static_cast<int>(std::min<std::size_t>(spec.workers, cells.size()));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials < 1 || successes < 0 || successes > trials) invalid("wilson_interval: need 0 <= successes <= trials, trials >= 1");
  const double z = 1.959963984540054;
  const double n = trials;
  const double phat = successes / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (phat + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<CurvePoint> summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) invalid("summarize: no records");
  struct Acc {
    const TrialRecord* first = nullptr;
    int successes = 0;
    int trials = 0;
    double ms = 0.0;
  };
  std::map<std::pair<int, int>, Acc> groups;
  for (const auto& r : records) {
    Acc& a = groups[{r.p, r.theta_index}];
    if (!a.first) a.first = &r;
    a.successes += r.success;
    a.trials += 1;
    a.ms += r.elapsed_ms;
  }
  std::vector<CurvePoint> out;
  for (const auto& [key, a] : groups) {
    CurvePoint c;
    c.method = a.first->method;
    c.p = a.first->p;
    c.k = a.first->k;
    c.n = a.first->n;
    c.theta = a.first->theta;
    c.trials = a.trials;
    c.success_rate = double(a.successes) / a.trials;
    std::tie(c.ci_lo, c.ci_hi) = wilson_interval(a.successes, a.trials);
    c.mean_ms = a.ms / a.trials;
    out.push_back(c);
  }
  return out;
}

std::optional<double> crossing_theta(const std::vector<CurvePoint>& curve, double level) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].success_rate < level) continue;
    if (i == 0) return curve[0].theta;
    const CurvePoint& a = curve[i - 1];
    const CurvePoint& b = curve[i];
    const double w = (level - a.success_rate) / (b.success_rate - a.success_rate);
    return a.theta + w * (b.theta - a.theta);
  }
  return std::nullopt;
}

void emit_outputs(const std::vector<CurvePoint>& curves, OutputFormat format, const fs::path& path,
                  const fs::path& csv_path) {
  std::ofstream out = open_out(path);
  if (format == OutputFormat::Csv) {
    out << kCurveHeader << '\n';
    for (const auto& c : curves)
      out << to_string(c.method) << ',' << c.p << ',' << c.k << ',' << c.n << ',' << fmt(c.theta) << ',' << c.trials
          << ',' << fmt(c.success_rate) << ',' << fmt(c.ci_lo) << ',' << fmt(c.ci_hi) << ',' << fmt(c.mean_ms) << '\n';
  } else {
    const std::string csv = (csv_path.empty() ? path : csv_path).string();
    out << "import csv\n"
           "import matplotlib\n"
           "matplotlib.use(\"Agg\")\n"
           "import matplotlib.pyplot as plt\n"
           "\n"
           "CSV_PATH = " << py_quote(csv) << "\n"
           "\n"
           "curves = {}\n"
           "method = \"\"\n"
           "with open(CSV_PATH, newline=\"\") as f:\n"
           "    for row in csv.DictReader(f):\n"
           "        method = row[\"method\"]\n"
           "        curves.setdefault(int(row[\"p\"]), []).append(\n"
           "            (float(row[\"theta\"]), float(row[\"success_rate\"]), float(row[\"ci_lo\"]), float(row[\"ci_hi\"]))\n"
           "        )\n"
           "\n"
           "fig, ax = plt.subplots(figsize=(6, 4))\n"
           "for p in sorted(curves):\n"
           "    pts = sorted(curves[p])\n"
           "    xs = [t for t, _, _, _ in pts]\n"
           "    ax.plot(xs, [s for _, s, _, _ in pts], marker=\"o\", label=f\"p = {p}\")\n"
           "    ax.fill_between(xs, [lo for _, _, lo, _ in pts], [hi for _, _, _, hi in pts], alpha=0.15)\n"
           "ax.set_xlabel(\"theta_dia\" if method == \"diag\" else \"theta_sdp\")\n"
           "ax.set_ylabel(\"success probability\")\n"
           "ax.set_ylim(-0.02, 1.02)\n"
           "ax.legend()\n"
           "fig.tight_layout()\n"
           "fig.savefig(CSV_PATH.rsplit(\".\", 1)[0] + \".png\", dpi=150)\n";
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

std::vector<CurvePoint> parse_curves_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) invalid("curve CSV header mismatch in " + path.string());
  std::vector<CurvePoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) invalid("curve CSV row has wrong field count: " + line);
    try {
      CurvePoint c;
      c.method = parse_method(f[0]);
      c.p = std::stoi(f[1]);
      c.k = std::stoi(f[2]);
      c.n = std::stoi(f[3]);
      c.theta = std::stod(f[4]);
      c.trials = std::stoi(f[5]);
      c.success_rate = std::stod(f[6]);
      c.ci_lo = std::stod(f[7]);
      c.ci_hi = std::stod(f[8]);
      c.mean_ms = std::stod(f[9]);
      out.push_back(c);
    } catch (const std::logic_error&) {
      invalid("curve CSV row does not parse: " + line);
    }
  }
  return out;
}

void write_records_csv(const fs::path& path, const std::vector<TrialRecord>& records) {
  std::ofstream out = open_out(path);
  out << "method,p,k,n,theta,theta_index,trial,seed,stream,success,solver_failed,elapsed_ms,"
         "margin,rank,iterations,primal_residual,dual_residual,objective\n";
  for (const auto& r : records)
    out << to_string(r.method) << ',' << r.p << ',' << r.k << ',' << r.n << ',' << fmt(r.theta) << ','
        << r.theta_index << ',' << r.trial_index << ',' << r.seed << ',' << r.stream << ',' << int(r.success) << ','
        << int(r.solver_failed) << ',' << fmt(r.elapsed_ms) << ',' << fmt(r.margin) << ',' << r.rank << ','
        << r.iterations << ',' << fmt(r.primal_residual) << ',' << fmt(r.dual_residual) << ',' << fmt(r.objective)
        << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) invalid("unknown key '" + key + "' in " + where);
}

SparsityRule parse_sparsity(const json& j) {
  check_keys(j, {"rule", "c", "k"}, "sparsity");
  const std::string rule = j.at("rule").get<std::string>();
  SparsityRule r;
  if (rule == "fixed") {
    if (j.contains("c")) invalid("sparsity: the fixed rule takes 'k', not 'c'");
    r.kind = SparsityKind::Fixed;
    r.coefficient = j.at("k").get<int>();
    return r;
  }
  if (j.contains("k")) invalid("sparsity: only the fixed rule takes 'k'");
  if (rule == "log_p") r.kind = SparsityKind::LogP;
  else if (rule == "sqrt_p") r.kind = SparsityKind::SqrtP;
  else if (rule == "linear_p") r.kind = SparsityKind::LinearP;
  else invalid("unknown sparsity rule '" + rule + "'");
  r.coefficient = j.value("c", 1.0);
  return r;
}

void parse_solver(const json& j, SdpDecodeOptions& o) {
  check_keys(j, {"rho", "step", "max_iters", "tol", "tol_primal", "tol_dual", "zero_tol", "rank_tol"}, "solver");
  if (j.contains("rho")) o.rho = j["rho"].get<double>();
  if (j.contains("step")) o.solver.step = j["step"].get<double>();
  if (j.contains("max_iters")) o.solver.max_iters = j["max_iters"].get<int>();
  if (j.contains("tol")) o.solver.tol_primal = o.solver.tol_dual = j["tol"].get<double>();
  if (j.contains("tol_primal")) o.solver.tol_primal = j["tol_primal"].get<double>();
  if (j.contains("tol_dual")) o.solver.tol_dual = j["tol_dual"].get<double>();
  if (j.contains("zero_tol")) o.zero_tol = j["zero_tol"].get<double>();
  if (j.contains("rank_tol")) o.rank_tol = j["rank_tol"].get<double>();
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& text) {
  SweepConfig cfg;
  SweepSpec& s = cfg.spec;
  try {
    const json j = json::parse(text);
    check_keys(j,
               {"method", "dims", "sparsity", "beta", "theta_grid", "trials", "seed", "score_mode", "workers",
                "record_timing", "solver", "output"},
               "sweep config");
    s.method = parse_method(j.at("method").get<std::string>());
    s.dims = j.at("dims").get<std::vector<int>>();
    if (j.contains("sparsity")) s.sparsity = parse_sparsity(j["sparsity"]);
    s.beta = j.value("beta", 3.0);
    s.theta_grid = j.at("theta_grid").get<std::vector<double>>();
    s.trials = j.value("trials", 100);
    s.base_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("score_mode")) {
      const std::string m = j["score_mode"].get<std::string>();
      if (m == "support") s.score_mode = ScoreMode::Support;
      else if (m == "signed") s.score_mode = ScoreMode::Signed;
      else invalid("unknown score_mode '" + m + "'");
    }
    s.workers = j.value("workers", 1);
    s.record_timing = j.value("record_timing", false);
    if (j.contains("solver")) parse_solver(j["solver"], s.sdp);
    cfg.output = j.value("output", std::string("sweep"));
  } catch (const json::exception& e) {
    invalid(std::string("sweep config: ") + e.what());
  }
  s.validate();
  return cfg;
}

SweepConfig load_sweep_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sweep_config(buf.str());
}

}  // namespace spca
