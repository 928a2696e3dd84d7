// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <utility>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "feast/feast.hpp"
#include "feast/generators.hpp"
#include "feast/multi_interval.hpp"

namespace feast::experiments {

/// Flat key=value settings. '#' starts a comment. Every lookup records the
/// resolved value (default included) for the echo file.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return raw_.contains(key); }

  std::string text(const std::string& key, const std::string& fallback);
  std::string required_text(const std::string& key);
  double real(const std::string& key, double fallback);
  std::optional<double> optional_real(const std::string& key);
  std::size_t count(const std::string& key, std::size_t fallback);
  bool flag(const std::string& key, bool fallback);
  std::uint64_t seed();  // key "seed", mandatory
  /// Comma separated list.
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback);
  /// Comma separated list; an item "a:b" expands to a, a+1, ..., b.
  std::vector<std::size_t> counts(const std::string& key, const std::vector<std::size_t>& fallback);

  /// Throws InvalidParams naming every key that was never looked up.
  void reject_unused() const;
  /// Resolved values, one key=value per line, sorted by key.
  void echo(std::ostream& out) const;

 private:
  const std::string* lookup(const std::string& key);

  std::map<std::string, std::string> raw_;
  std::map<std::string, std::string> resolved_;
};

/// One CSV file. Integers print as integers, reals with %.16e.
struct CsvReport {
  using Cell = std::variant<std::int64_t, double, std::string>;

  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  /// Throws DimensionMismatch when the row width differs from the header.
  void add(std::vector<Cell> row);
  void write(std::ostream& out) const;
};

std::string format_real(double x);

// ---------------------------------------------------------------------------
// Inputs

struct ProblemSource {
  std::optional<GeneratorSpec> generator;
  std::filesystem::path matrix;
  std::filesystem::path mass;
  std::uint64_t generator_seed = 1;
};

struct Problem {
  SparseHermitianPencil pencil;
  std::vector<double> spectrum;  // ascending; empty if unknown
  std::string label;
};

Problem load_problem(const ProblemSource& source);

struct DenseOracle {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // B-orthonormal
};

/// Explicit bounds, or the `count` lowest / highest eigenvalues with the
/// inner bound in the middle of the adjacent gap and the outer bound padded
/// by a tenth of the covered range.
struct IntervalChoice {
  enum class Rule { bounds, lowest, highest };
  Rule rule = Rule::bounds;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

/// Throws InvalidParams when the rule needs more eigenvalues than `spectrum` holds.
std::pair<double, double> place_interval(const IntervalChoice& choice, const std::vector<double>& spectrum);

/// Full dense generalized eigensolve; desk scale only.
DenseOracle dense_oracle(const SparseHermitianPencil& pencil);

/// Columns of the oracle whose values lie in [lo, hi].
DenseMatrix oracle_eigenspace(const DenseOracle& oracle, double lo, double hi);

// ---------------------------------------------------------------------------
// Subspace-size sweep

struct SubspaceSweepSpec {
  ProblemSource source;
  IntervalChoice interval;
  FeastConfig feast;
  std::vector<std::size_t> m_tilde;
  std::uint64_t seed = 0;
  bool angles = true;
};

struct SweepPoint {
  std::size_t m_tilde = 0;
  FeastStatus status = FeastStatus::MaxIters;
  IterationTrace trace;
};

struct SubspaceSweepResult {
  std::size_t eigencount = 0;
  double bound = 0.0;
  std::vector<SweepPoint> points;  // grid order
};

SubspaceSweepResult run_subspace_sweep(const SubspaceSweepSpec& spec);

// ---------------------------------------------------------------------------
// Deflated starting basis

struct DeflatedStartSpec {
  ProblemSource source;
  IntervalChoice interval;
  std::size_t m_tilde = 0;
  FeastConfig feast;
  std::size_t deflate = 10;
  std::uint64_t seed = 0;
};

struct DeflatedRun {
  std::string label;
  FeastStatus status = FeastStatus::MaxIters;
  IterationTrace trace;
  /// residual[i][j]: residual of the Ritz value nearest eigenvalue j at iteration i + 1.
  std::vector<std::vector<double>> residual;
  std::vector<std::optional<std::size_t>> first_converged;
};

struct DeflatedStartResult {
  std::vector<double> eigenvalues;  // exact values inside the interval
  double bound = 0.0;
  std::vector<DeflatedRun> runs;    // plain, deflated
};

DeflatedStartResult run_deflated_start(const DeflatedStartSpec& spec);

// ---------------------------------------------------------------------------
// Stopping criteria

struct StoppingDemoSpec {
  ProblemSource source;
  IntervalChoice interval;
  std::size_t m_tilde = 0;
  FeastConfig feast;
  std::uint64_t seed = 0;
};

struct StoppingDemoResult {
  IterationTrace trace;
  double bound = 0.0;
  std::optional<std::size_t> trace_fired_at;
  std::optional<std::size_t> residual_fired_at;
};

/// Iterates until both criteria have fired or max_feast_iters is reached.
StoppingDemoResult run_stopping_demo(const StoppingDemoSpec& spec);

// ---------------------------------------------------------------------------
// Inner solver tolerance sweep

struct TolSweepSpec {
  ProblemSource source;
  IntervalChoice interval;
  std::size_t m_tilde = 0;
  FeastConfig feast;
  std::vector<double> lin_tols;
  std::uint64_t seed = 0;
};

struct TolSweepPoint {
  double lin_tol = 0.0;
  FeastStatus status = FeastStatus::MaxIters;
  std::size_t iterations = 0;
  std::size_t in_interval = 0;
  double residual_min = 0.0;
  double residual_max = 0.0;
  double orthogonality = 0.0;
  std::size_t linear_iterations = 0;
};

struct TolSweepResult {
  double bound = 0.0;
  std::vector<TolSweepPoint> points;  // grid order
};

TolSweepResult run_linsolve_tol_sweep(const TolSweepSpec& spec);

// ---------------------------------------------------------------------------
// Multi-interval orthogonality

struct PartitionOutcome {
  std::string label;
  Partition partition;
  MergedSpectrum merged;
  std::size_t true_count = 0;
  /// Worst cross-subinterval |x^H B y| among pairs whose residuals meet the bound.
  double orth_cross_converged = 0.0;
};

/// Equal-count partitions of the eigenvalues with (0-based) indices
/// first .. first + count - 1, one per K.
struct PartitionSweepSpec {
  ProblemSource source;
  FeastConfig feast;
  std::size_t first = 0;
  std::size_t count = 0;
  std::vector<std::size_t> k_values;
  double m_factor = 0.5;       // M~ = c + max(m_factor * c, m_extra)
  std::size_t m_extra = 4;
  std::uint64_t seed = 0;
};

/// The widest cluster plus margin_below / margin_above eigenvalues on either
/// side form the global interval. It is cut once in the middle of the
/// cluster, and separately into three pieces with the cluster and
/// `respect_margin` neighbours per side in the middle piece.
struct ClusterStudySpec {
  ProblemSource source;
  FeastConfig feast;
  std::size_t margin_below = 60;
  std::size_t margin_above = 60;
  std::size_t respect_margin = 20;
  double cluster_tol = 1e-9;
  double m_factor = 0.5;
  std::size_t m_extra = 8;
  std::uint64_t seed = 0;
};

struct MultiIntervalResult {
  std::vector<PartitionOutcome> outcomes;
  std::size_t cluster_first = 0;  // cluster study only
  std::size_t cluster_size = 0;
};

MultiIntervalResult run_partition_sweep(const PartitionSweepSpec& spec);
MultiIntervalResult run_cluster_study(const ClusterStudySpec& spec);

// ---------------------------------------------------------------------------
// Config driven entry points

enum class ExperimentKind { subspace_sweep, deflated_start, stopping_demo, linsolve_tol_sweep, multi_interval_orth };

ExperimentKind parse_kind(const std::string& name);
const char* to_string(ExperimentKind kind) noexcept;

ProblemSource resolve_source(Config& cfg, const GeneratorSpec& fallback);
/// Solver keys: quad_nodes, aspect, max_iters, criterion, eps, trace_tol,
/// scale_floor, rank_strategy, svd_tol, rank_tol, lin_backend, lin_tol,
/// lin_restart, lin_max_iters.
FeastConfig resolve_feast(Config& cfg, const FeastConfig& defaults);

SubspaceSweepSpec resolve_subspace_sweep(Config& cfg);
DeflatedStartSpec resolve_deflated_start(Config& cfg);
StoppingDemoSpec resolve_stopping_demo(Config& cfg);
TolSweepSpec resolve_linsolve_tol_sweep(Config& cfg);
std::variant<PartitionSweepSpec, ClusterStudySpec> resolve_multi_interval(Config& cfg);

std::vector<CsvReport> tables(const SubspaceSweepResult& r);
std::vector<CsvReport> tables(const DeflatedStartResult& r);
std::vector<CsvReport> tables(const StoppingDemoResult& r);
std::vector<CsvReport> tables(const TolSweepResult& r);
std::vector<CsvReport> tables(const MultiIntervalResult& r, bool matrices);

struct RunOptions {
  int jobs = 1;
  bool gnuplot = false;
};

/// Resolves the config, rejects unknown keys, runs and writes the CSV
/// tables, resolved_config.txt and (optionally) gnuplot scripts to out_dir.
void run_experiment(ExperimentKind kind, Config cfg, const std::filesystem::path& out_dir,
                    const RunOptions& opt = {});

}  // namespace feast::experiments
