#include "spca/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include "spca/decoders.hpp"
#include "spca/error.hpp"
#include "spca/harness.hpp"
#include "spca/io.hpp"
#include "spca/sdp.hpp"
#include "spca/theory.hpp"

namespace spca {

namespace {

namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void line(std::ostream& out, const std::string& key, const std::string& value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%-22s", key.c_str());
  out << buf << value << '\n';
}

void line(std::ostream& out, const std::string& key, double value) { line(out, key, fmt(value)); }

const char* yes_no(bool b) { return b ? "true" : "false"; }

struct SimulateArgs {
  int p = 0, k = 0, n = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::string base = "identity";
  std::string support = "random";
  std::string out = "batch";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  Rng root(a.seed);
  Rng model_rng = root.split(0);
  Rng sample_rng = root.split(1);
  SpikedModel model = a.support == "leading" ? SpikedModel::identity_leading(a.p, a.k, a.beta)
                                             : SpikedModel::random_identity(a.p, a.k, a.beta, model_rng);
  if (a.base != "identity") {
    const SymMatrix gamma(read_matrix_csv(a.base));
    model = SpikedModel(a.p, a.k, a.beta, model.support(), model.signs(), gamma);
  }
  build_covariance(model);
  const SampleBatch batch = sample(model, a.n, sample_rng);

  const fs::path prefix(a.out);
  const fs::path data = prefix.string() + ".csv";
  const fs::path meta = prefix.string() + ".json";
  const fs::path cov = prefix.string() + "_cov.csv";
  write_sample_batch(data, batch);
  write_metadata(meta, metadata_for(model, batch, data.filename().string()));
  write_matrix_csv(cov, sample_covariance(batch).matrix());

  line(out, "samples", data.string());
  line(out, "metadata", meta.string());
  line(out, "covariance", cov.string());
  std::string support;
  for (std::size_t i = 0; i < model.support().size(); ++i)
    support += (i ? " " : "") + std::to_string(model.support()[i]) + (model.signs()[i] > 0 ? ":+" : ":-");
  line(out, "support", support);
  return kExitOk;
}

struct SolveArgs {
  std::string input, output;
  double rho = 0.0, tol = 1e-7, step = 1.0;
  int max_iters = 20000;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const SymMatrix sigma(read_matrix_csv(a.input));
  SolverOptions o;
  o.rho = a.rho;
  o.step = a.step;
  o.max_iters = a.max_iters;
  o.tol_primal = o.tol_dual = a.tol;
  const SdpSolution sol = solve(sigma, o);
  line(out, "p", std::to_string(sigma.dim()));
  line(out, "rho", a.rho);
  line(out, "objective", sol.objective);
  line(out, "iterations", std::to_string(sol.iterations));
  line(out, "primal_residual", sol.primal_residual);
  line(out, "dual_residual", sol.dual_residual);
  line(out, "converged", yes_no(sol.converged));
  line(out, "rank", std::to_string(rank_estimate(sol.z_matrix, 1e-6)));
  line(out, "trace", sol.z_matrix.trace());
  if (!a.output.empty()) {
    write_matrix_csv(a.output, sol.z_matrix.matrix());
    line(out, "output", a.output);
  }
  if (!sol.converged) {
    err << "solver did not converge within " << a.max_iters << " iterations\n";
    return kExitSolver;
  }
  return kExitOk;
}

struct CertifyArgs {
  std::string input, mode = "rankonly";
  double rho = 0.0;
};

int cmd_certify(const CertifyArgs& a, std::ostream& out, std::ostream& err) {
  const BatchMetadata md = read_metadata(a.input);
  const SpikedModel model = model_from(md);
  const fs::path data = fs::path(a.input).parent_path() / md.data_path;
  const SampleBatch batch = read_sample_batch(data);
  if (batch.p() != model.p()) throw Error(ErrorCode::InvalidInput, "sample width does not match metadata p");
  const SymMatrix sigma_hat = sample_covariance(batch);
  const double rho = a.rho > 0.0 ? a.rho : default_rho(model.beta(), model.k());
  const CertificateMode mode = a.mode == "strong" ? CertificateMode::Strong : CertificateMode::RankOnly;

  const Vector zs = certificate_support_vector(sigma_hat, model, rho);
  const Certificate cert = build_certificate(sigma_hat, model, zs, rho, mode);
  line(out, "mode", a.mode);
  line(out, "p", std::to_string(model.p()));
  line(out, "k", std::to_string(model.k()));
  line(out, "n", std::to_string(batch.n));
  line(out, "rho", rho);
  line(out, "blocks_valid", yes_no(cert.blocks_valid));
  line(out, "max_abs_offblock", cert.max_abs_offblock);
  line(out, "eigvec_check", yes_no(cert.eigvec_check));
  line(out, "eigvec_residual", cert.eigvec_residual);
  line(out, "complement_block", cert.complement_block_assembled ? "assembled" : "not assembled");
  if (mode == CertificateMode::Strong) return kExitOk;

  SolverOptions o;
  o.rho = rho;
  const SdpSolution sol = solve(sigma_hat, o);
  const OptimalityReport r = verify_optimality(sigma_hat, sol.z_matrix, rho, cert);
  line(out, "solver_converged", yes_no(sol.converged));
  line(out, "solution_rank", std::to_string(rank_estimate(sol.z_matrix, 1e-6)));
  line(out, "sign_pattern_ok", yes_no(r.sign_pattern_ok));
  line(out, "sign_bound_ok", yes_no(r.sign_bound_ok));
  line(out, "max_abs_entry", r.max_abs_entry);
  line(out, "eigvec_ok", yes_no(r.eigvec_ok));
  line(out, "maximal_ok", yes_no(r.maximal_ok));
  line(out, "eigengap", r.eigengap);
  line(out, "certified_objective", r.certified_objective);
  line(out, "solution_objective", r.solution_objective);
  line(out, "solution_gap", r.solution_gap);
  line(out, "passed", yes_no(r.passed()));
  if (!sol.converged) {
    err << "solver did not converge\n";
    return kExitSolver;
  }
  return kExitOk;
}

struct SweepArgs {
  std::string config, out_dir = ".";
  int workers = 0;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  SweepConfig cfg = load_sweep_config(a.config);
  if (a.workers > 0) cfg.spec.workers = a.workers;
  const auto records = run_sweep(cfg.spec);
  const auto curves = summarize(records);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const fs::path rec = dir / (cfg.output + "_records.csv");
  const fs::path sum = dir / (cfg.output + "_summary.csv");
  const fs::path plot = dir / (cfg.output + "_plot.py");
  write_records_csv(rec, records);
  emit_outputs(curves, OutputFormat::Csv, sum);
  emit_outputs(curves, OutputFormat::PlotScript, plot, sum);

  char buf[128];
  out << "      p    k       n        theta  success   95% interval\n";
  for (const auto& c : curves) {
    std::snprintf(buf, sizeof buf, "%7d %4d %7d %12.4f %8.3f   [%.3f, %.3f]\n", c.p, c.k, c.n, c.theta,
                  c.success_rate, c.ci_lo, c.ci_hi);
    out << buf;
  }
  int failures = 0;
  for (const auto& r : records) failures += r.solver_failed;
  if (failures) out << failures << " trial(s) counted as failures after solver non-convergence\n";
  line(out, "records", rec.string());
  line(out, "summary", sum.string());
  line(out, "plot_script", plot.string());
  return kExitOk;
}

struct BoundsArgs {
  int p = 0, k = 0;
  double beta = 0.0, n = 0.0;
  bool csv = false;
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  std::vector<std::pair<std::string, double>> rows;
  rows.emplace_back("fano_threshold", fano_threshold(a.beta));
  rows.emplace_back("min_samples_info", min_samples_info(a.p, a.k, a.beta));
  if (a.n > 0.0) {
    const ScalingPoint s{a.n, a.p, a.k};
    rows.emplace_back("theta_dia", theta_dia(s));
    rows.emplace_back("theta_sdp", theta_sdp(s));
  }
  if (a.csv) {
    out << "quantity,value\n";
    for (const auto& [k, v] : rows) out << k << ',' << fmt(v) << '\n';
  } else {
    for (const auto& [k, v] : rows) line(out, k, v);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse PCA support recovery: sampling, SDP decoding, certificates and sweeps", "spca"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw samples from a spiked covariance model");
  simulate->add_option("--p", sim.p, "Dimension")->required()->check(CLI::Range(2, 1 << 20));
  simulate->add_option("--k", sim.k, "Support size")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--beta", sim.beta, "Spike strength")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--n", sim.n, "Number of samples")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Random seed")->required();
  simulate->add_option("--base", sim.base, "'identity' or a CSV with the (p-k)x(p-k) base covariance");
  simulate->add_option("--support", sim.support, "Support placement")->check(CLI::IsMember({"random", "leading"}));
  simulate->add_option("--out", sim.out, "Output prefix for <out>.csv, <out>.json and <out>_cov.csv");

  SolveArgs sol;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the penalized SDP for a covariance matrix");
  solve_cmd->add_option("--input", sol.input, "Covariance CSV")->required();
  solve_cmd->add_option("--rho", sol.rho, "l1 penalty")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--tol", sol.tol, "Residual tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iters", sol.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--step", sol.step, "ADMM penalty")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--output", sol.output, "Write the solution matrix to this CSV");

  CertifyArgs cer;
  auto* certify = app.add_subcommand("certify", "Build and check the dual certificate for a simulated batch");
  certify->add_option("--input", cer.input, "Batch metadata JSON written by simulate")->required();
  certify->add_option("--mode", cer.mode, "Certificate construction")->check(CLI::IsMember({"strong", "rankonly"}));
  certify->add_option("--rho", cer.rho, "l1 penalty (default beta/(2k))")->check(CLI::PositiveNumber);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run a phase-transition sweep from a JSON config");
  sweep->add_option("--config", sw.config, "Sweep configuration JSON")->required();
  sweep->add_option("--out-dir", sw.out_dir, "Directory for records, summary and plot script");
  sweep->add_option("--workers", sw.workers, "Override the worker count")->check(CLI::PositiveNumber);

  BoundsArgs bd;
  auto* bounds = app.add_subcommand("bounds", "Print rescaled sample sizes and the information bound");
  bounds->add_option("--p", bd.p, "Dimension")->required();
  bounds->add_option("--k", bd.k, "Support size")->required();
  bounds->add_option("--beta", bd.beta, "Spike strength")->required();
  bounds->add_option("--n", bd.n, "Sample size");
  bounds->add_flag("--csv", bd.csv, "CSV output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*solve_cmd) return cmd_solve(sol, out, err);
    if (*certify) return cmd_certify(cer, out, err);
    if (*sweep) return cmd_sweep(sw, out);
    if (*bounds) return cmd_bounds(bd, out);
  } catch (const SolverFailed& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.code() == ErrorCode::IoError ? kExitIo : kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    err << "error (IoError): " << e.what() << '\n';
    return kExitIo;
  }
  return kExitInvalid;
}

}  // namespace spca
