#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spca/decoders.hpp"

namespace spca {

enum class Method { Diag, Sdp };

enum class SparsityKind { LogP, SqrtP, LinearP, Fixed };

struct SparsityRule {
  SparsityKind kind = SparsityKind::LogP;
  double coefficient = 1.0;  // c for the scaling rules, k itself for Fixed
};

struct SweepSpec {
  Method method = Method::Diag;
  std::vector<int> dims;
  SparsityRule sparsity;
  double beta = 3.0;
  std::vector<double> theta_grid;  // θ_dia for Diag, θ_sdp for Sdp
  int trials = 100;
  std::uint64_t base_seed = 0;
  std::optional<ScoreMode> score_mode;  // Support for Diag, Signed for Sdp
  SdpDecodeOptions sdp;
  int workers = 1;
  bool record_timing = false;  // elapsed times are zero unless set

  ScoreMode effective_score_mode() const;

  // Throws InvalidInput on an empty or non-increasing grid, trials < 1,
  // workers < 1, β ≤ 0, or any (p, k, n) with p − k < 2.
  void validate() const;
};

const char* to_string(Method m);
const char* to_string(SparsityKind k);

int derive_k(int p, const SparsityRule& rule);
int derive_n(double theta, int p, int k, Method method);

struct TrialRecord {
  Method method = Method::Diag;
  int p = 0;
  int k = 0;
  int n = 0;
  double theta = 0.0;   // recomputed from (n, p, k)
  int theta_index = 0;  // position in the sweep grid
  int trial_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool success = false;
  bool solver_failed = false;
  double elapsed_ms = 0.0;
  // Diag: margin. Sdp: rank, iterations, residuals, objective.
  double margin = 0.0;
  int rank = 0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
};

// Per-trial Rng stream identifier for (p, θ index, trial).
std::uint64_t trial_stream(int p, int theta_index, int trial_index);

// Runs every (p, θ, trial) cell on a pool of spec.workers threads. Output is
// sorted by (p, θ index, trial) and does not depend on the pool size.
std::vector<TrialRecord> run_sweep(const SweepSpec& spec);

// Runs a single cell; exposed so that callers can reuse the sweep's seeding.
TrialRecord run_trial(const SweepSpec& spec, int p, int theta_index, int trial_index);

struct CurvePoint {
  Method method = Method::Diag;
  int p = 0;
  int k = 0;
  int n = 0;
  double theta = 0.0;
  int trials = 0;
  double success_rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double mean_ms = 0.0;

  bool operator==(const CurvePoint&) const = default;
};

// 95% Wilson score interval.
std::pair<double, double> wilson_interval(int successes, int trials);

// Groups by (p, θ index) in sweep order. Throws InvalidInput when empty.
std::vector<CurvePoint> summarize(const std::vector<TrialRecord>& records);

// θ where the success curve first crosses `level`, by linear interpolation;
// nullopt when it never does.
std::optional<double> crossing_theta(const std::vector<CurvePoint>& curve, double level);

enum class OutputFormat { Csv, PlotScript };

inline constexpr const char* kCurveHeader = "method,p,k,n,theta,trials,success_rate,ci_lo,ci_hi,mean_ms";

// Csv writes the curve table to `path`. PlotScript writes a matplotlib script
// to `path` that reads `csv_path` and saves a PNG next to it.
void emit_outputs(const std::vector<CurvePoint>& curves, OutputFormat format,
                  const std::filesystem::path& path, const std::filesystem::path& csv_path = {});

std::vector<CurvePoint> parse_curves_csv(const std::filesystem::path& path);

void write_records_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& records);

struct SweepConfig {
  SweepSpec spec;
  std::string output = "sweep";  // prefix for the emitted files
};

// Parses the JSON sweep configuration; throws InvalidInput on unknown keys,
// wrong types or values that fail SweepSpec::validate.
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::filesystem::path& path);

}  // namespace spca
