// SPDX-License-Identifier: Apache-2.0
#include "feast/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "feast/errors.hpp"
#include "feast/kernels.hpp"
#include "feast/rng.hpp"
#include "feast/sparse.hpp"
#include "parallel.hpp"

namespace feast::experiments {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string shortest(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw InvalidParams("config key '" + key + "': not a number: " + v);
  return x;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long x = 0;
  if (!v.empty() && v.front() != '-') {
    try {
      x = std::stoull(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
  }
  if (used == 0 || used != v.size()) throw InvalidParams("config key '" + key + "': not a count: " + v);
  return static_cast<std::size_t>(x);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> items;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += shortest(x);
    else
      out += std::to_string(x);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

Config Config::parse(std::istream& in) {
  Config cfg;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (cfg.raw_.contains(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
    cfg.raw_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("cannot open config file " + path.string());
  return parse(in);
}

void Config::set(const std::string& key, const std::string& value) { raw_[key] = value; }

const std::string* Config::lookup(const std::string& key) {
  const auto it = raw_.find(key);
  return it == raw_.end() ? nullptr : &it->second;
}

std::string Config::text(const std::string& key, const std::string& fallback) {
  const auto* v = lookup(key);
  return resolved_[key] = v ? *v : fallback;
}

std::string Config::required_text(const std::string& key) {
  const auto* v = lookup(key);
  if (!v) throw InvalidParams("config key '" + key + "' is required");
  return resolved_[key] = *v;
}

double Config::real(const std::string& key, double fallback) {
  const auto* v = lookup(key);
  const double x = v ? parse_real(key, *v) : fallback;
  resolved_[key] = shortest(x);
  return x;
}

std::optional<double> Config::optional_real(const std::string& key) {
  const auto* v = lookup(key);
  if (!v) return std::nullopt;
  const double x = parse_real(key, *v);
  resolved_[key] = shortest(x);
  return x;
}

std::size_t Config::count(const std::string& key, std::size_t fallback) {
  const auto* v = lookup(key);
  const std::size_t x = v ? parse_count(key, *v) : fallback;
  resolved_[key] = std::to_string(x);
  return x;
}

bool Config::flag(const std::string& key, bool fallback) {
  const auto* v = lookup(key);
  bool x = fallback;
  if (v) {
    if (*v == "true" || *v == "1" || *v == "yes")
      x = true;
    else if (*v == "false" || *v == "0" || *v == "no")
      x = false;
    else
      throw InvalidParams("config key '" + key + "': not a boolean: " + *v);
  }
  resolved_[key] = x ? "true" : "false";
  return x;
}

std::uint64_t Config::seed() {
  const auto* v = lookup("seed");
  if (!v) throw InvalidParams("config key 'seed' is required");
  std::size_t used = 0;
  std::uint64_t x = 0;
  try {
    x = std::stoull(*v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v->size() || v->front() == '-') throw InvalidParams("config key 'seed': bad value " + *v);
  resolved_["seed"] = std::to_string(x);
  return x;
}

std::vector<double> Config::reals(const std::string& key, const std::vector<double>& fallback) {
  const auto* v = lookup(key);
  std::vector<double> xs = fallback;
  if (v) {
    xs.clear();
    for (const auto& item : split_list(*v)) xs.push_back(parse_real(key, item));
  }
  if (xs.empty()) throw InvalidParams("config key '" + key + "': empty list");
  resolved_[key] = join(xs);
  return xs;
}

std::vector<std::size_t> Config::counts(const std::string& key, const std::vector<std::size_t>& fallback) {
  const auto* v = lookup(key);
  std::vector<std::size_t> xs = fallback;
  if (v) {
    xs.clear();
    for (const auto& item : split_list(*v)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        xs.push_back(parse_count(key, item));
        continue;
      }
      const std::size_t a = parse_count(key, trim(item.substr(0, colon)));
      const std::size_t b = parse_count(key, trim(item.substr(colon + 1)));
      if (b < a) throw InvalidParams("config key '" + key + "': descending range " + item);
      for (std::size_t x = a; x <= b; ++x) xs.push_back(x);
    }
  }
  if (xs.empty()) throw InvalidParams("config key '" + key + "': empty list");
  resolved_[key] = join(xs);
  return xs;
}

void Config::reject_unused() const {
  std::string unknown;
  for (const auto& [key, value] : raw_)
    if (!resolved_.contains(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty()) throw InvalidParams("unknown config keys: " + unknown);
}

void Config::echo(std::ostream& out) const {
  for (const auto& [key, value] : resolved_) out << key << '=' << value << '\n';
}

// ---------------------------------------------------------------------------
// CSV

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

void CsvReport::add(std::vector<Cell> row) {
  if (row.size() != header.size())
    throw DimensionMismatch("CsvReport " + name + ": row has " + std::to_string(row.size()) + " cells, header " +
                            std::to_string(header.size()));
  rows.push_back(std::move(row));
}

void CsvReport::write(std::ostream& out) const {
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      std::visit(
          [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, double>)
              out << format_real(c);
            else
              out << c;
          },
          row[j]);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Inputs

Problem load_problem(const ProblemSource& source) {
  Problem p;
  if (source.generator) {
    auto tp = synthesize_test_matrix(*source.generator, source.generator_seed);
    p.pencil = std::move(tp.pencil);
    p.spectrum = std::move(tp.planted);
    p.label = kind_name(*source.generator);
    return p;
  }
  if (source.matrix.empty()) throw InvalidParams("problem source needs a generator or a matrix file");
  p.pencil.a = read_matrix_market(source.matrix);
  if (!source.mass.empty()) p.pencil.b = read_matrix_market(source.mass);
  p.pencil.validate();
  p.label = source.matrix.stem().string();
  return p;
}

DenseOracle dense_oracle(const SparseHermitianPencil& pencil) {
  DenseOracle o;
  if (pencil.b_is_identity()) {
    auto f = hermitian_eigensolve(pencil.a.to_dense());
    o.values = std::move(f.eigenvalues);
    o.vectors = std::move(f.eigenvectors);
  } else {
    auto g = generalized_eigensolve(pencil.a.to_dense(), pencil.b->to_dense(), 0.0);
    if (g.effective_rank != pencil.n()) throw IndefiniteB("dense_oracle: B is numerically singular");
    o.values = std::move(g.values);
    o.vectors = std::move(g.vectors);
  }
  return o;
}

DenseMatrix oracle_eigenspace(const DenseOracle& oracle, double lo, double hi) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < oracle.values.size(); ++j)
    if (oracle.values[j] >= lo && oracle.values[j] <= hi) idx.push_back(j);
  return oracle.vectors.select_cols(idx);
}

std::pair<double, double> place_interval(const IntervalChoice& choice, const std::vector<double>& spectrum) {
  using Rule = IntervalChoice::Rule;
  if (choice.rule == Rule::bounds) {
    if (!(choice.lo < choice.hi)) throw InvalidParams("interval needs lo < hi");
    return {choice.lo, choice.hi};
  }
  const std::size_t n = spectrum.size();
  if (choice.count == 0 || choice.count >= n)
    throw InvalidParams("interval rule needs 0 < count < number of known eigenvalues");
  if (choice.rule == Rule::lowest) {
    const double hi = 0.5 * (spectrum[choice.count - 1] + spectrum[choice.count]);
    return {spectrum.front() - 0.1 * (spectrum[choice.count] - spectrum.front()), hi};
  }
  const double lo = 0.5 * (spectrum[n - choice.count - 1] + spectrum[n - choice.count]);
  return {lo, spectrum.back() + 0.1 * (spectrum.back() - spectrum[n - choice.count - 1])};
}

namespace {

constexpr std::size_t kOracleCap = 4000;

// Known spectrum: planted values when available, else a dense solve.
const std::vector<double>& spectrum_of(Problem& p, std::optional<DenseOracle>& oracle) {
  if (!p.spectrum.empty()) return p.spectrum;
  if (!oracle) {
    if (p.pencil.n() > kOracleCap) throw InvalidParams("spectrum unknown and matrix too large for the dense oracle");
    oracle = dense_oracle(p.pencil);
  }
  p.spectrum = oracle->values;
  return p.spectrum;
}

const DenseOracle& oracle_of(const Problem& p, std::optional<DenseOracle>& oracle) {
  if (!oracle) {
    if (p.pencil.n() > kOracleCap) throw InvalidParams("matrix too large for the dense oracle");
    oracle = dense_oracle(p.pencil);
  }
  return *oracle;
}

std::size_t count_between(const SparseHermitianPencil& pencil, double lo, double hi) {
  return eigencount_below(pencil, hi) - eigencount_below(pencil, lo);
}

double bound_for(const SparseHermitianPencil& pencil, double lo, double hi, const FeastConfig& cfg) {
  return residual_bound(pencil.n(), lo, hi, cfg.eps, cfg.residual_scale_floor);
}

std::pair<double, double> range_of(const std::vector<double>& xs) {
  if (xs.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  const auto [lo, hi] = std::ranges::minmax(xs);
  return {lo, hi};
}

std::vector<double> interval_residuals(const RitzSet& r) {
  std::vector<double> out;
  for (std::size_t j = 0; j < r.size(); ++j)
    if (r.in_interval[j]) out.push_back(r.residuals[j]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Runners

SubspaceSweepResult run_subspace_sweep(const SubspaceSweepSpec& spec) {
  if (spec.m_tilde.empty()) throw InvalidParams("subspace sweep needs a nonempty M~ grid");
  Problem p = load_problem(spec.source);
  std::optional<DenseOracle> oracle;
  const auto [lo, hi] = place_interval(spec.interval, spec.interval.rule == IntervalChoice::Rule::bounds
                                                          ? p.spectrum
                                                          : spectrum_of(p, oracle));
  std::shared_ptr<const DenseMatrix> reference;
  if (spec.angles) reference = std::make_shared<DenseMatrix>(oracle_eigenspace(oracle_of(p, oracle), lo, hi));

  SubspaceSweepResult out;
  out.eigencount = count_between(p.pencil, lo, hi);
  out.bound = bound_for(p.pencil, lo, hi, spec.feast);
  out.points.resize(spec.m_tilde.size());
  detail::parallel_for(spec.m_tilde.size(), [&](std::size_t i) {
    const std::size_t m = spec.m_tilde[i];
    FeastConfig cfg = spec.feast;
    cfg.interval = {lo, hi, m};
    cfg.seed = derive_seed(spec.seed, 2 * m + 1);
    if (reference && reference->cols() > 0) cfg.reference_eigenspace = reference;
    auto r = feast_solve(p.pencil, cfg, StartingBasis::random(p.pencil.n(), m, derive_seed(spec.seed, 2 * m)));
    out.points[i] = {m, r.status, std::move(r.trace)};
  });
  return out;
}

DeflatedStartResult run_deflated_start(const DeflatedStartSpec& spec) {
  Problem p = load_problem(spec.source);
  std::optional<DenseOracle> oracle;
  const auto& o = oracle_of(p, oracle);
  const auto [lo, hi] = place_interval(spec.interval, spectrum_of(p, oracle));

  DeflatedStartResult out;
  for (double v : o.values)
    if (v >= lo && v <= hi) out.eigenvalues.push_back(v);
  out.bound = bound_for(p.pencil, lo, hi, spec.feast);
  if (spec.deflate > o.values.size()) throw InvalidParams("deflate exceeds the matrix size");

  FeastConfig cfg = spec.feast;
  cfg.interval = {lo, hi, spec.m_tilde};
  cfg.seed = derive_seed(spec.seed, 1);
  const std::uint64_t y_seed = derive_seed(spec.seed, 0);
  const StartingBasis starts[] = {
      StartingBasis::random(p.pencil.n(), spec.m_tilde, y_seed),
      StartingBasis::deflated(p.pencil, spec.m_tilde, y_seed, o.vectors, spec.deflate)};
  const char* labels[] = {"plain", "deflated"};

  out.runs.resize(2);
  detail::parallel_for(2, [&](std::size_t r) {
    auto res = feast_solve(p.pencil, cfg, starts[r]);
    DeflatedRun run;
    run.label = labels[r];
    run.status = res.status;
    run.first_converged.assign(out.eigenvalues.size(), std::nullopt);
    for (const auto& rec : res.trace) {
      std::vector<double> row(out.eigenvalues.size(), std::numeric_limits<double>::quiet_NaN());
      for (std::size_t j = 0; j < out.eigenvalues.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < rec.ritz_values.size(); ++k) {
          const double d = std::abs(rec.ritz_values[k] - out.eigenvalues[j]);
          if (d < best) {
            best = d;
            row[j] = rec.ritz_residuals[k];
          }
        }
        if (row[j] <= out.bound && !run.first_converged[j]) run.first_converged[j] = rec.iteration;
      }
      run.residual.push_back(std::move(row));
    }
    run.trace = std::move(res.trace);
    out.runs[r] = std::move(run);
  });
  return out;
}

StoppingDemoResult run_stopping_demo(const StoppingDemoSpec& spec) {
  Problem p = load_problem(spec.source);
  std::optional<DenseOracle> oracle;
  const auto [lo, hi] = place_interval(spec.interval, spec.interval.rule == IntervalChoice::Rule::bounds
                                                          ? p.spectrum
                                                          : spectrum_of(p, oracle));
  FeastConfig cfg = spec.feast;
  cfg.interval = {lo, hi, spec.m_tilde};
  cfg.seed = derive_seed(spec.seed, 1);
  const auto y0 = StartingBasis::random(p.pencil.n(), spec.m_tilde, derive_seed(spec.seed, 0));

  auto first = [](const IterationTrace& t, bool IterationRecord::*flag) -> std::optional<std::size_t> {
    for (const auto& rec : t)
      if (rec.*flag) return rec.iteration;
    return std::nullopt;
  };

  // The criterion only decides when to stop, so a second run with the other
  // criterion retraces the same iterates further.
  cfg.criterion = Criterion::residual;
  auto r = feast_solve(p.pencil, cfg, y0);
  if (r.status == FeastStatus::Converged && !first(r.trace, &IterationRecord::trace_fired)) {
    cfg.criterion = Criterion::trace;
    auto t = feast_solve(p.pencil, cfg, y0);
    if (t.trace.size() > r.trace.size()) r = std::move(t);
  }

  StoppingDemoResult out;
  out.bound = bound_for(p.pencil, lo, hi, cfg);
  out.trace_fired_at = first(r.trace, &IterationRecord::trace_fired);
  out.residual_fired_at = first(r.trace, &IterationRecord::residual_fired);
  out.trace = std::move(r.trace);
  return out;
}

TolSweepResult run_linsolve_tol_sweep(const TolSweepSpec& spec) {
  if (spec.lin_tols.empty()) throw InvalidParams("tolerance sweep needs a nonempty grid");
  Problem p = load_problem(spec.source);
  std::optional<DenseOracle> oracle;
  const auto [lo, hi] = place_interval(spec.interval, spec.interval.rule == IntervalChoice::Rule::bounds
                                                          ? p.spectrum
                                                          : spectrum_of(p, oracle));
  TolSweepResult out;
  out.bound = bound_for(p.pencil, lo, hi, spec.feast);
  out.points.resize(spec.lin_tols.size());
  const auto y0 = StartingBasis::random(p.pencil.n(), spec.m_tilde, derive_seed(spec.seed, 0));
  detail::parallel_for(spec.lin_tols.size(), [&](std::size_t i) {
    FeastConfig cfg = spec.feast;
    cfg.interval = {lo, hi, spec.m_tilde};
    cfg.seed = derive_seed(spec.seed, 1);
    cfg.lin.tol = spec.lin_tols[i];
    auto r = feast_solve(p.pencil, cfg, y0);
    TolSweepPoint pt;
    pt.lin_tol = spec.lin_tols[i];
    pt.status = r.status;
    pt.iterations = r.trace.size();
    pt.in_interval = r.ritz.count_in_interval();
    std::tie(pt.residual_min, pt.residual_max) = range_of(interval_residuals(r.ritz));
    const DenseMatrix x = r.ritz.interval_vectors();
    pt.orthogonality = x.cols() > 0 ? b_orthogonality(x, p.pencil) : 0.0;
    for (const auto& rec : r.trace) pt.linear_iterations += rec.linear_iterations;
    out.points[i] = pt;
  });
  return out;
}

namespace {

std::size_t m_for(std::size_t c, double factor, std::size_t extra) {
  return c + std::max(static_cast<std::size_t>(std::ceil(factor * static_cast<double>(c))), extra);
}

PartitionOutcome solve_outcome(const Problem& p, std::string label, Partition part, const FeastConfig& feast,
                               std::uint64_t seed) {
  PartitionOutcome o;
  o.label = std::move(label);
  o.merged = solve_partitioned(p.pencil, part, feast, seed);
  o.true_count = count_between(p.pencil, part.boundaries.front(), part.boundaries.back());

  std::vector<double> bounds(part.count());
  for (std::size_t k = 0; k < part.count(); ++k)
    bounds[k] = bound_for(p.pencil, part.boundaries[k], part.boundaries[k + 1], feast);
  const auto& m = o.merged;
  auto ok = [&](std::size_t i) { return m.residuals[i] <= bounds[m.provenance[i]]; };
  for (std::size_t j = 0; j < m.values.size(); ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (m.provenance[i] != m.provenance[j] && ok(i) && ok(j))
        o.orth_cross_converged = std::max(o.orth_cross_converged, std::abs(m.orthogonality(i, j)));
  o.partition = std::move(part);
  return o;
}

}  // namespace

MultiIntervalResult run_partition_sweep(const PartitionSweepSpec& spec) {
  if (spec.k_values.empty()) throw InvalidParams("partition sweep needs a nonempty K grid");
  Problem p = load_problem(spec.source);
  std::optional<DenseOracle> oracle;
  const auto& ev = spectrum_of(p, oracle);
  if (spec.first == 0 || spec.count == 0 || spec.first + spec.count >= ev.size())
    throw InvalidParams("partition sweep needs 1 <= first and first + count < n");
  auto mid = [&](std::size_t i) { return 0.5 * (ev[i - 1] + ev[i]); };

  MultiIntervalResult out;
  for (std::size_t k_count : spec.k_values) {
    if (k_count == 0 || k_count > spec.count) throw InvalidParams("partition sweep needs 1 <= K <= count");
    Partition part;
    for (std::size_t k = 0; k <= k_count; ++k) part.boundaries.push_back(mid(spec.first + spec.count * k / k_count));
    for (std::size_t k = 0; k < k_count; ++k) {
      const std::size_t c = spec.count * (k + 1) / k_count - spec.count * k / k_count;
      part.m_estimates.push_back(m_for(c, spec.m_factor, spec.m_extra));
    }
    out.outcomes.push_back(solve_outcome(p, "K" + std::to_string(k_count), std::move(part), spec.feast,
                                         derive_seed(spec.seed, k_count)));
  }
  return out;
}

MultiIntervalResult run_cluster_study(const ClusterStudySpec& spec) {
  Problem p = load_problem(spec.source);
  std::optional<DenseOracle> oracle;
  const auto& ev = spectrum_of(p, oracle);
  const std::size_t n = ev.size();
  const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));

  std::size_t best_first = 0, best_size = 1;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && ev[j + 1] - ev[j] <= spec.cluster_tol * scale) ++j;
    if (j - i + 1 > best_size) {
      best_first = i;
      best_size = j - i + 1;
    }
    i = j + 1;
  }
  if (best_size < 2) throw InvalidParams("cluster study: no cluster in the spectrum");
  const std::size_t c0 = best_first, c1 = best_first + best_size - 1;
  if (c0 < spec.margin_below || c1 + spec.margin_above + 1 >= n || spec.respect_margin >= spec.margin_below ||
      spec.respect_margin >= spec.margin_above)
    throw InvalidParams("cluster study: margins do not fit around the cluster");

  auto mid = [&](std::size_t i) { return 0.5 * (ev[i - 1] + ev[i]); };
  auto count_in = [&](double lo, double hi) {
    return static_cast<std::size_t>(std::ranges::count_if(ev, [&](double v) { return v >= lo && v <= hi; }));
  };
  auto make = [&](std::vector<double> bd) {
    Partition part;
    part.boundaries = std::move(bd);
    for (std::size_t k = 0; k + 1 < part.boundaries.size(); ++k)
      part.m_estimates.push_back(
          m_for(count_in(part.boundaries[k], part.boundaries[k + 1]), spec.m_factor, spec.m_extra));
    return part;
  };
  const double lo = mid(c0 - spec.margin_below), hi = mid(c1 + spec.margin_above + 1);

  MultiIntervalResult out;
  out.cluster_first = c0;
  out.cluster_size = best_size;
  out.outcomes.push_back(
      solve_outcome(p, "split", make({lo, mid(c0 + (best_size + 1) / 2), hi}), spec.feast, spec.seed));
  out.outcomes.push_back(solve_outcome(
      p, "respecting", make({lo, mid(c0 - spec.respect_margin), mid(c1 + spec.respect_margin + 1), hi}), spec.feast,
      spec.seed));
  return out;
}

// ---------------------------------------------------------------------------
// Config resolution

ExperimentKind parse_kind(const std::string& name) {
  for (auto k : {ExperimentKind::subspace_sweep, ExperimentKind::deflated_start, ExperimentKind::stopping_demo,
                 ExperimentKind::linsolve_tol_sweep, ExperimentKind::multi_interval_orth})
    if (name == to_string(k)) return k;
  throw InvalidParams("unknown experiment kind: " + name);
}

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::subspace_sweep: return "subspace_sweep";
    case ExperimentKind::deflated_start: return "deflated_start";
    case ExperimentKind::stopping_demo: return "stopping_demo";
    case ExperimentKind::linsolve_tol_sweep: return "linsolve_tol_sweep";
    case ExperimentKind::multi_interval_orth: return "multi_interval_orth";
  }
  return "?";
}

namespace {

GeneratorSpec default_generator(const std::string& name) {
  if (name == "graph_laplacian") return GraphLaplacianParams{};
  if (name == "symmetric_spectrum") return SymmetricSpectrumParams{};
  if (name == "clustered_tridiagonal") return ClusteredTridiagonalParams{};
  if (name == "multifold") return MultifoldParams{};
  if (name == "diag_pencil") return DiagPencilParams{};
  if (name == "planted_gap") return PlantedGapParams{};
  if (name == "graded") return GradedParams{};
  throw InvalidParams("unknown generator: " + name);
}

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};

IntervalChoice resolve_interval(Config& cfg, const IntervalChoice& fallback) {
  IntervalChoice c;
  if (cfg.has("lowest")) {
    c.rule = IntervalChoice::Rule::lowest;
    c.count = cfg.count("lowest", 0);
  } else if (cfg.has("highest")) {
    c.rule = IntervalChoice::Rule::highest;
    c.count = cfg.count("highest", 0);
  } else if (cfg.has("interval_lo") || cfg.has("interval_hi") || fallback.rule == IntervalChoice::Rule::bounds) {
    c.rule = IntervalChoice::Rule::bounds;
    c.lo = fallback.rule == IntervalChoice::Rule::bounds ? cfg.real("interval_lo", fallback.lo)
                                                         : cfg.optional_real("interval_lo").value_or(0.0);
    c.hi = fallback.rule == IntervalChoice::Rule::bounds ? cfg.real("interval_hi", fallback.hi)
                                                         : cfg.optional_real("interval_hi").value_or(0.0);
    if (!cfg.has("interval_lo") && fallback.rule != IntervalChoice::Rule::bounds)
      throw InvalidParams("config key 'interval_lo' is required");
    if (!cfg.has("interval_hi") && fallback.rule != IntervalChoice::Rule::bounds)
      throw InvalidParams("config key 'interval_hi' is required");
  } else {
    c = fallback;
    cfg.count(fallback.rule == IntervalChoice::Rule::lowest ? "lowest" : "highest", fallback.count);
  }
  return c;
}

}  // namespace

ProblemSource resolve_source(Config& cfg, const GeneratorSpec& fallback) {
  ProblemSource s;
  if (cfg.has("matrix")) {
    s.matrix = cfg.required_text("matrix");
    s.mass = cfg.text("mass", "");
    return s;
  }
  const std::string name = cfg.text("generator", kind_name(fallback));
  GeneratorSpec g = name == kind_name(fallback) ? fallback : default_generator(name);
  std::visit(overloaded{
                 [&](GraphLaplacianParams& q) {
                   q.n = cfg.count("n", q.n);
                   q.edge_density = cfg.real("edge_density", q.edge_density);
                 },
                 [&](SymmetricSpectrumParams& q) { q.n = cfg.count("n", q.n); },
                 [&](ClusteredTridiagonalParams& q) {
                   q.n = cfg.count("n", q.n);
                   q.cluster_size = cfg.count("cluster_size", q.cluster_size);
                   q.cluster_gap = cfg.real("cluster_gap", q.cluster_gap);
                 },
                 [&](MultifoldParams& q) {
                   q.n = cfg.count("n", q.n);
                   q.eigenvalue = cfg.real("eigenvalue", q.eigenvalue);
                   q.multiplicity = cfg.count("multiplicity", q.multiplicity);
                 },
                 [&](DiagPencilParams& q) {
                   q.n = cfg.count("n", q.n);
                   q.b_random_diag = cfg.flag("b_random_diag", q.b_random_diag);
                   q.edge_density = cfg.real("edge_density", q.edge_density);
                 },
                 [&](PlantedGapParams& q) {
                   q.n = cfg.count("n", q.n);
                   q.low_count = cfg.count("low_count", q.low_count);
                   q.gap_start = cfg.real("gap_start", q.gap_start);
                 },
                 [&](GradedParams& q) {
                   q.n = cfg.count("n", q.n);
                   q.lo = cfg.real("spectrum_lo", q.lo);
                   q.hi = cfg.real("spectrum_hi", q.hi);
                 },
             },
             g);
  s.generator = g;
  s.generator_seed = cfg.count("generator_seed", 1);
  return s;
}

FeastConfig resolve_feast(Config& cfg, const FeastConfig& d) {
  FeastConfig f = d;
  f.quadrature_m = cfg.count("quad_nodes", d.quadrature_m);
  f.aspect = cfg.real("aspect", d.aspect);
  f.max_feast_iters = cfg.count("max_iters", d.max_feast_iters);

  const std::string crit = cfg.text("criterion", d.criterion == Criterion::residual ? "residual" : "trace");
  if (crit == "residual")
    f.criterion = Criterion::residual;
  else if (crit == "trace")
    f.criterion = Criterion::trace;
  else
    throw InvalidParams("criterion must be residual or trace");
  f.eps = cfg.real("eps", d.eps);
  f.trace_tol = cfg.real("trace_tol", d.trace_tol);
  if (auto floor = cfg.optional_real("scale_floor"))
    f.residual_scale_floor = floor;
  else if (d.residual_scale_floor)
    f.residual_scale_floor = cfg.real("scale_floor", *d.residual_scale_floor);

  const std::string rank =
      cfg.text("rank_strategy", d.rank_strategy == RankStrategy::cholesky_check ? "cholesky_check" : "svd_reveal");
  if (rank == "cholesky_check")
    f.rank_strategy = RankStrategy::cholesky_check;
  else if (rank == "svd_reveal")
    f.rank_strategy = RankStrategy::svd_reveal;
  else
    throw InvalidParams("rank_strategy must be cholesky_check or svd_reveal");
  f.svd_tol = cfg.real("svd_tol", d.svd_tol);
  f.reduced_rank_tol = cfg.real("rank_tol", d.reduced_rank_tol);

  const std::string backend =
      cfg.text("lin_backend", d.lin.backend == LinSolveBackend::direct_dense ? "direct" : "gmres");
  if (backend == "direct")
    f.lin.backend = LinSolveBackend::direct_dense;
  else if (backend == "gmres")
    f.lin.backend = LinSolveBackend::gmres;
  else
    throw InvalidParams("lin_backend must be direct or gmres");
  f.lin.tol = cfg.real("lin_tol", d.lin.tol);
  f.lin.restart = cfg.count("lin_restart", d.lin.restart);
  f.lin.max_iters = cfg.count("lin_max_iters", d.lin.max_iters);
  return f;
}

SubspaceSweepSpec resolve_subspace_sweep(Config& cfg) {
  SubspaceSweepSpec s;
  s.seed = cfg.seed();
  s.source = resolve_source(cfg, PlantedGapParams{});
  s.interval = resolve_interval(cfg, {IntervalChoice::Rule::bounds, 0.0, 1.5, 0});
  s.m_tilde = cfg.counts("m_tilde", {20, 40});
  if (!cfg.has("m_tilde")) {
    s.m_tilde.clear();
    for (std::size_t m = 20; m <= 40; ++m) s.m_tilde.push_back(m);
  }
  s.angles = cfg.flag("angles", true);
  s.feast = resolve_feast(cfg, FeastConfig{});
  return s;
}

DeflatedStartSpec resolve_deflated_start(Config& cfg) {
  DeflatedStartSpec s;
  s.seed = cfg.seed();
  s.source = resolve_source(cfg, GraphLaplacianParams{});
  s.interval = resolve_interval(cfg, {IntervalChoice::Rule::lowest, 0.0, 0.0, 40});
  s.m_tilde = cfg.count("m_tilde", 60);
  s.deflate = cfg.count("deflate", 10);
  s.feast = resolve_feast(cfg, FeastConfig{});
  return s;
}

StoppingDemoSpec resolve_stopping_demo(Config& cfg) {
  StoppingDemoSpec s;
  s.seed = cfg.seed();
  s.source = resolve_source(cfg, SymmetricSpectrumParams{});
  IntervalChoice fallback{IntervalChoice::Rule::bounds, -0.51, 0.51, 0};
  std::size_t m_default = 70;
  if (s.source.generator && std::holds_alternative<MultifoldParams>(*s.source.generator)) {
    const auto& q = std::get<MultifoldParams>(*s.source.generator);
    fallback = {IntervalChoice::Rule::bounds, q.eigenvalue - 1.0, q.eigenvalue + 1.0, 0};
    m_default = 120;
  } else if (!s.source.generator ||
             !std::holds_alternative<SymmetricSpectrumParams>(*s.source.generator)) {
    fallback = {IntervalChoice::Rule::lowest, 0.0, 0.0, 10};
    m_default = 20;
  }
  s.interval = resolve_interval(cfg, fallback);
  s.m_tilde = cfg.count("m_tilde", m_default);
  s.feast = resolve_feast(cfg, FeastConfig{});
  return s;
}

TolSweepSpec resolve_linsolve_tol_sweep(Config& cfg) {
  TolSweepSpec s;
  s.seed = cfg.seed();
  s.source = resolve_source(cfg, DiagPencilParams{});
  s.interval = resolve_interval(cfg, {IntervalChoice::Rule::highest, 0.0, 0.0, 10});
  s.m_tilde = cfg.count("m_tilde", 20);
  s.lin_tols = cfg.reals("lin_tols", {1e-6, 1e-8, 1e-10, 1e-12});
  FeastConfig d;
  d.lin.backend = LinSolveBackend::gmres;
  s.feast = resolve_feast(cfg, d);
  return s;
}

std::variant<PartitionSweepSpec, ClusterStudySpec> resolve_multi_interval(Config& cfg) {
  const std::string study = cfg.text("study", "partition_sweep");
  FeastConfig d;
  d.reduced_rank_tol = 1e-8;
  if (study == "partition_sweep") {
    PartitionSweepSpec s;
    s.seed = cfg.seed();
    s.source = resolve_source(cfg, GradedParams{});
    s.first = cfg.count("first", 1);
    s.count = cfg.count("count", 200);
    s.k_values = cfg.counts("k_values", {1, 2, 3, 4, 5, 10});
    s.m_factor = cfg.real("m_factor", s.m_factor);
    s.m_extra = cfg.count("m_extra", s.m_extra);
    if (s.source.generator && std::holds_alternative<GradedParams>(*s.source.generator))
      d.residual_scale_floor = std::get<GradedParams>(*s.source.generator).hi;
    s.feast = resolve_feast(cfg, d);
    return s;
  }
  if (study == "cluster") {
    ClusterStudySpec s;
    s.seed = cfg.seed();
    s.source = resolve_source(cfg, ClusteredTridiagonalParams{});
    s.margin_below = cfg.count("margin_below", s.margin_below);
    s.margin_above = cfg.count("margin_above", s.margin_above);
    s.respect_margin = cfg.count("respect_margin", s.respect_margin);
    s.cluster_tol = cfg.real("cluster_tol", s.cluster_tol);
    s.m_factor = cfg.real("m_factor", s.m_factor);
    s.m_extra = cfg.count("m_extra", s.m_extra);
    s.feast = resolve_feast(cfg, d);
    return s;
  }
  throw InvalidParams("study must be partition_sweep or cluster");
}

// ---------------------------------------------------------------------------
// Tables

namespace {

using Cell = CsvReport::Cell;

Cell as_int(std::size_t x) { return static_cast<std::int64_t>(x); }
Cell as_int(const std::optional<std::size_t>& x) { return x ? static_cast<std::int64_t>(*x) : std::int64_t{-1}; }

}  // namespace

std::vector<CsvReport> tables(const SubspaceSweepResult& r) {
  CsvReport summary{"subspace_sweep",
                    {"m_tilde", "status", "iterations", "in_interval", "eigencount", "res_min", "res_max", "bound",
                     "effective_rank"},
                    {}};
  CsvReport angles{"subspace_angles",
                   {"m_tilde", "iteration", "angle_to_exact_deg", "angle_to_prev_deg", "res_min", "res_max",
                    "in_interval", "effective_rank"},
                   {}};
  for (const auto& pt : r.points) {
    const auto& last = pt.trace.back();
    summary.add({as_int(pt.m_tilde), std::string(to_string(pt.status)), as_int(pt.trace.size()),
                 as_int(last.in_interval), as_int(r.eigencount), last.residual_min, last.residual_max, r.bound,
                 as_int(last.effective_rank)});
    for (const auto& rec : pt.trace)
      angles.add({as_int(pt.m_tilde), as_int(rec.iteration), rec.angle_to_reference_deg, rec.angle_to_prev_deg,
                  rec.residual_min, rec.residual_max, as_int(rec.in_interval), as_int(rec.effective_rank)});
  }
  return {summary, angles};
}

std::vector<CsvReport> tables(const DeflatedStartResult& r) {
  CsvReport conv{"deflated_convergence", {"run", "iteration", "index", "eigenvalue", "residual", "converged"}, {}};
  CsvReport summary{"deflated_summary", {"run", "status", "index", "eigenvalue", "first_converged_iteration"}, {}};
  for (const auto& run : r.runs) {
    for (std::size_t i = 0; i < run.residual.size(); ++i)
      for (std::size_t j = 0; j < r.eigenvalues.size(); ++j)
        conv.add({run.label, as_int(i + 1), as_int(j), r.eigenvalues[j], run.residual[i][j],
                  std::int64_t{run.residual[i][j] <= r.bound}});
    for (std::size_t j = 0; j < r.eigenvalues.size(); ++j)
      summary.add({run.label, std::string(to_string(run.status)), as_int(j), r.eigenvalues[j],
                   as_int(run.first_converged[j])});
  }
  return {conv, summary};
}

std::vector<CsvReport> tables(const StoppingDemoResult& r) {
  CsvReport trace{"stopping_trace",
                  {"iteration", "trace", "trace_change", "res_min", "res_max", "bound", "in_interval", "trace_fired",
                   "residual_fired"},
                  {}};
  for (const auto& rec : r.trace)
    trace.add({as_int(rec.iteration), rec.trace, rec.trace_change, rec.residual_min, rec.residual_max, r.bound,
               as_int(rec.in_interval), std::int64_t{rec.trace_fired}, std::int64_t{rec.residual_fired}});
  CsvReport summary{"stopping_summary", {"criterion", "fired_at", "res_max_at_fire", "bound"}, {}};
  auto res_at = [&](const std::optional<std::size_t>& it) {
    return it ? r.trace[*it - 1].residual_max : std::numeric_limits<double>::quiet_NaN();
  };
  summary.add({std::string("trace"), as_int(r.trace_fired_at), res_at(r.trace_fired_at), r.bound});
  summary.add({std::string("residual"), as_int(r.residual_fired_at), res_at(r.residual_fired_at), r.bound});
  return {trace, summary};
}

std::vector<CsvReport> tables(const TolSweepResult& r) {
  CsvReport t{"linsolve_tol_sweep",
              {"lin_tol", "status", "iterations", "in_interval", "res_min", "res_max", "orthogonality", "bound",
               "linear_iterations"},
              {}};
  for (const auto& pt : r.points)
    t.add({pt.lin_tol, std::string(to_string(pt.status)), as_int(pt.iterations), as_int(pt.in_interval),
           pt.residual_min, pt.residual_max, pt.orthogonality, r.bound, as_int(pt.linear_iterations)});
  return {t};
}

std::vector<CsvReport> tables(const MultiIntervalResult& r, bool matrices) {
  CsvReport t{"multi_interval",
              {"partition", "K", "orth_global", "orth_local_min", "orth_local_max", "orth_cross_converged",
               "merged_count", "true_count", "converged_runs"},
              {}};
  std::vector<CsvReport> out;
  for (const auto& o : r.outcomes) {
    const auto [lmin, lmax] = range_of(o.merged.orth_local);
    const auto conv = std::ranges::count_if(o.merged.runs, [](const FeastResult& x) {
      return x.status == FeastStatus::Converged;
    });
    t.add({o.label, as_int(o.partition.count()), o.merged.orth_global, lmin, lmax, o.orth_cross_converged,
           as_int(o.merged.values.size()), as_int(o.true_count), std::int64_t{conv}});
    if (!matrices) continue;
    const auto& m = o.merged.orthogonality;
    CsvReport mat{"orthogonality_" + o.label, {"i", "j", "value_i", "value_j", "subinterval_i", "subinterval_j", "abs_inner"}, {}};
    for (std::size_t j = 0; j < m.cols(); ++j)
      for (std::size_t i = 0; i < m.rows(); ++i)
        mat.add({as_int(i), as_int(j), o.merged.values[i], o.merged.values[j], as_int(o.merged.provenance[i]),
                 as_int(o.merged.provenance[j]), std::abs(m(i, j))});
    out.push_back(std::move(mat));
  }
  out.insert(out.begin(), std::move(t));
  return out;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

std::string gnuplot_script(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::subspace_sweep:
      return "set datafile separator ','\nset logscale y\nset xlabel 'M~'\n"
             "plot 'subspace_sweep.csv' every ::1 using 1:6 with linespoints title 'min residual', \\\n"
             "     '' every ::1 using 1:7 with linespoints title 'max residual', \\\n"
             "     '' every ::1 using 1:8 with lines title 'bound'\n";
    case ExperimentKind::deflated_start:
      return "set datafile separator ','\nset logscale y\nset xlabel 'iteration'\n"
             "plot 'deflated_convergence.csv' every ::1 using 2:($1 eq 'plain' ? $5 : 1/0) title 'plain', \\\n"
             "     '' every ::1 using 2:($1 eq 'deflated' ? $5 : 1/0) title 'deflated'\n";
    case ExperimentKind::stopping_demo:
      return "set datafile separator ','\nset logscale y\nset xlabel 'iteration'\n"
             "plot 'stopping_trace.csv' every ::1 using 1:3 with linespoints title 'trace change', \\\n"
             "     '' every ::1 using 1:5 with linespoints title 'max residual', \\\n"
             "     '' every ::1 using 1:6 with lines title 'bound'\n";
    case ExperimentKind::linsolve_tol_sweep:
      return "set datafile separator ','\nset logscale xy\nset xlabel 'lin tol'\n"
             "plot 'linsolve_tol_sweep.csv' every ::1 using 1:5:6 with yerrorbars title 'residual range', \\\n"
             "     '' every ::1 using 1:7 with linespoints title 'orthogonality'\n";
    case ExperimentKind::multi_interval_orth:
      return "set datafile separator ','\nset logscale y\nset xlabel 'K'\n"
             "plot 'multi_interval.csv' every ::1 using 2:3 with linespoints title 'global', \\\n"
             "     '' every ::1 using 2:4:5 with yerrorbars title 'local range'\n";
  }
  return {};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidParams("cannot write " + path.string());
  out << text;
}

}  // namespace

void run_experiment(ExperimentKind kind, Config cfg, const std::filesystem::path& out_dir, const RunOptions& opt) {
  if (opt.jobs < 1) throw InvalidParams("jobs must be >= 1");
  kernels::set_threads(opt.jobs);

  std::vector<CsvReport> out;
  auto finish_resolve = [&] {
    cfg.reject_unused();
    std::filesystem::create_directories(out_dir);
    std::ostringstream echo;
    echo << "experiment=" << to_string(kind) << '\n';
    cfg.echo(echo);
    write_text(out_dir / "resolved_config.txt", echo.str());
  };

  switch (kind) {
    case ExperimentKind::subspace_sweep: {
      auto spec = resolve_subspace_sweep(cfg);
      finish_resolve();
      out = tables(run_subspace_sweep(spec));
      break;
    }
    case ExperimentKind::deflated_start: {
      auto spec = resolve_deflated_start(cfg);
      finish_resolve();
      out = tables(run_deflated_start(spec));
      break;
    }
    case ExperimentKind::stopping_demo: {
      auto spec = resolve_stopping_demo(cfg);
      finish_resolve();
      out = tables(run_stopping_demo(spec));
      break;
    }
    case ExperimentKind::linsolve_tol_sweep: {
      auto spec = resolve_linsolve_tol_sweep(cfg);
      finish_resolve();
      out = tables(run_linsolve_tol_sweep(spec));
      break;
    }
    case ExperimentKind::multi_interval_orth: {
      auto spec = resolve_multi_interval(cfg);
      finish_resolve();
      if (auto* sweep = std::get_if<PartitionSweepSpec>(&spec))
        out = tables(run_partition_sweep(*sweep), false);
      else
        out = tables(run_cluster_study(std::get<ClusterStudySpec>(spec)), true);
      break;
    }
  }

  for (const auto& t : out) {
    std::ostringstream s;
    t.write(s);
    write_text(out_dir / (t.name + ".csv"), s.str());
  }
  if (opt.gnuplot) write_text(out_dir / (std::string(to_string(kind)) + ".gp"), gnuplot_script(kind));
}

}  // namespace feast::experiments
