// SPDX-License-Identifier: Apache-2.0
#include "feast/sparse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "feast/errors.hpp"
#include "feast/kernels.hpp"
#include "feast/rng.hpp"

namespace feast {

SparseMatrixCsr::SparseMatrixCsr(std::size_t n, std::vector<std::size_t> row_ptr,
                                 std::vector<std::size_t> col_idx, std::vector<Complex> values)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
  if (row_ptr_.size() != n_ + 1 || row_ptr_.front() != 0)
    throw InvalidParams("csr: row_ptr must have n+1 entries starting at 0");
  if (col_idx_.size() != values_.size() || row_ptr_.back() != values_.size())
    throw InvalidParams("csr: index and value arrays disagree");
  for (std::size_t i = 0; i < n_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw InvalidParams("csr: row_ptr must be nondecreasing");
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] >= n_) throw InvalidParams("csr: column index out of range");
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
        throw InvalidParams("csr: column indices must be strictly increasing within a row");
    }
  }
}

SparseMatrixCsr SparseMatrixCsr::from_triplets(std::size_t n, std::vector<Triplet> t) {
  for (const auto& e : t)
    if (e.row >= n || e.col >= n) throw InvalidParams("csr: triplet index out of range");
  std::ranges::stable_sort(t, [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  std::vector<std::size_t> rp(n + 1, 0), ci;
  std::vector<Complex> va;
  ci.reserve(t.size());
  va.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!ci.empty() && k > 0 && t[k].row == t[k - 1].row && t[k].col == t[k - 1].col) {
      va.back() += t[k].value;
      continue;
    }
    ci.push_back(t[k].col);
    va.push_back(t[k].value);
    ++rp[t[k].row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) rp[i + 1] += rp[i];
  return SparseMatrixCsr(n, std::move(rp), std::move(ci), std::move(va));
}

SparseMatrixCsr SparseMatrixCsr::identity(std::size_t n) {
  std::vector<double> d(n, 1.0);
  return diagonal(d);
}

SparseMatrixCsr SparseMatrixCsr::diagonal(std::span<const double> d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> rp(n + 1), ci(n);
  std::vector<Complex> va(n);
  for (std::size_t i = 0; i < n; ++i) {
    rp[i + 1] = i + 1;
    ci[i] = i;
    va[i] = d[i];
  }
  return SparseMatrixCsr(n, std::move(rp), std::move(ci), std::move(va));
}

SparseMatrixCsr SparseMatrixCsr::from_dense(const DenseMatrix& d, double drop_tol) {
  if (d.rows() != d.cols()) throw InvalidParams("csr: dense source must be square");
  const std::size_t n = d.rows();
  std::vector<std::size_t> rp(n + 1, 0), ci;
  std::vector<Complex> va;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Complex v = d(i, j);
      if (std::abs(v) > drop_tol || (i == j && v != Complex{})) {
        ci.push_back(j);
        va.push_back(v);
      }
    }
    rp[i + 1] = ci.size();
  }
  return SparseMatrixCsr(n, std::move(rp), std::move(ci), std::move(va));
}

Complex SparseMatrixCsr::at(std::size_t i, std::size_t j) const {
  const auto b = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto e = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return {};
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

DenseMatrix SparseMatrixCsr::to_dense() const {
  DenseMatrix d(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) d(i, col_idx_[p]) = values_[p];
  return d;
}

double SparseMatrixCsr::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool SparseMatrixCsr::is_real() const noexcept {
  return std::ranges::all_of(values_, [](const Complex& v) { return v.imag() == 0.0; });
}

bool SparseMatrixCsr::is_hermitian() const {
  const double tol = 1e-12 * max_abs();
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      if (std::abs(values_[p] - std::conj(at(col_idx_[p], i))) > tol) return false;
  return true;
}

std::pair<std::size_t, std::size_t> SparseMatrixCsr::bandwidth() const {
  std::size_t lower = 0, upper = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const std::size_t j = col_idx_[p];
      if (j < i) lower = std::max(lower, i - j);
      else upper = std::max(upper, j - i);
    }
  return {lower, upper};
}

void SparseHermitianPencil::validate(std::uint64_t seed) const {
  if (b && b->n() != a.n()) throw InvalidParams("pencil: A and B dimensions differ");
  if (!a.is_hermitian()) throw NotHermitian("pencil: A is not Hermitian");
  if (!b) return;
  if (!b->is_hermitian()) throw NotHermitian("pencil: B is not Hermitian");
  Rng rng(seed);
  for (int t = 0; t < 20; ++t) {
    std::vector<Complex> x(n());
    for (auto& v : x) v = rng.normal();
    const auto bx = spmv(*b, x);
    Complex q{};
    for (std::size_t i = 0; i < n(); ++i) q += std::conj(x[i]) * bx[i];
    if (!(q.real() > 0.0)) throw InvalidParams("pencil: B is not positive definite");
  }
}

DenseMatrix SparseHermitianPencil::apply_a(const DenseMatrix& x) const { return kernels::spmm(a, x); }

DenseMatrix SparseHermitianPencil::apply_b(const DenseMatrix& x) const {
  if (!b) {
    if (x.rows() != n()) throw DimensionMismatch("apply_b: dimension mismatch");
    return x;
  }
  return kernels::spmm(*b, x);
}

std::vector<Complex> spmv(const SparseMatrixCsr& s, std::span<const Complex> x) {
  if (x.size() != s.n()) throw DimensionMismatch("spmv: dimension mismatch");
  std::vector<Complex> y(s.n());
  const auto rp = s.row_ptr();
  const auto ci = s.col_idx();
  const auto va = s.values();
  for (std::size_t i = 0; i < s.n(); ++i) {
    Complex acc{};
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) acc += va[p] * x[ci[p]];
    y[i] = acc;
  }
  return y;
}

DenseMatrix spmm(const SparseMatrixCsr& s, const DenseMatrix& x) { return kernels::spmm(s, x); }

// ---------------------------------------------------------------- Matrix Market

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool blank(const std::string& s) {
  return std::ranges::all_of(s, [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

}  // namespace

SparseMatrixCsr parse_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty input");
  ++lineno;
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw ParseError(lineno, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw UnsupportedFormat("object '" + object + "' is not supported");
  if (format != "coordinate" && format != "array")
    throw ParseError(lineno, "unknown format '" + format + "'");
  if (field == "pattern") throw UnsupportedFormat("pattern matrices are not supported");
  if (field != "real" && field != "complex" && field != "integer" && field != "double")
    throw ParseError(lineno, "unknown field '" + field + "'");
  if (symmetry == "skew-symmetric") throw UnsupportedFormat("skew-symmetric matrices are not supported");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian")
    throw ParseError(lineno, "unknown symmetry '" + symmetry + "'");
  const bool is_complex = field == "complex";
  const bool coordinate = format == "coordinate";

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      if (out.empty() || out[0] == '%' || blank(out)) continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) throw ParseError(lineno + 1, "missing size line");
  std::size_t rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ss(line);
    long long r = -1, c = -1, z = -1;
    ss >> r >> c;
    if (coordinate) ss >> z;
    if (!ss || r <= 0 || c <= 0 || (coordinate && z < 0)) throw ParseError(lineno, "malformed size line");
    rows = static_cast<std::size_t>(r);
    cols = static_cast<std::size_t>(c);
    nnz = coordinate ? static_cast<std::size_t>(z) : 0;
  }
  if (rows != cols) throw UnsupportedFormat("non-square matrices are not supported");
  const std::size_t n = rows;

  auto read_value = [&](std::istringstream& ss) {
    double re = 0.0, im = 0.0;
    ss >> re;
    if (is_complex) ss >> im;
    if (!ss) throw ParseError(lineno, "malformed numeric value");
    return Complex(re, im);
  };

  std::vector<SparseMatrixCsr::Triplet> trip;
  auto push = [&](std::size_t i, std::size_t j, Complex v) {
    trip.push_back({i, j, v});
    if (i != j) {
      if (symmetry == "symmetric") trip.push_back({j, i, v});
      else if (symmetry == "hermitian") trip.push_back({j, i, std::conj(v)});
    }
  };

  if (coordinate) {
    trip.reserve(symmetry == "general" ? nnz : 2 * nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
      if (!next_data_line(line)) throw ParseError(lineno + 1, "unexpected end of file: fewer entries than declared");
      std::istringstream ss(line);
      long long i = 0, j = 0;
      ss >> i >> j;
      if (!ss) throw ParseError(lineno, "malformed entry indices");
      if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n)
        throw ParseError(lineno, "index out of range");
      push(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), read_value(ss));
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t start = symmetry == "general" ? 0 : j;
      for (std::size_t i = start; i < n; ++i) {
        if (!next_data_line(line)) throw ParseError(lineno + 1, "unexpected end of file in array data");
        std::istringstream ss(line);
        const Complex v = read_value(ss);
        if (v != Complex{}) push(i, j, v);
      }
    }
  }
  if (next_data_line(line)) throw ParseError(lineno, "trailing data after declared entries");
  return SparseMatrixCsr::from_triplets(n, std::move(trip));
}

SparseMatrixCsr read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return parse_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrixCsr& s) {
  const bool real = s.is_real();
  out << "%%MatrixMarket matrix coordinate " << (real ? "real" : "complex") << " general\n";
  out << s.n() << ' ' << s.n() << ' ' << s.nnz() << '\n';
  char buf[96];
  const auto rp = s.row_ptr();
  const auto ci = s.col_idx();
  const auto va = s.values();
  for (std::size_t i = 0; i < s.n(); ++i)
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      if (real) std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i + 1, ci[p] + 1, va[p].real());
      else
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g\n", i + 1, ci[p] + 1, va[p].real(), va[p].imag());
      out << buf;
    }
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrixCsr& s) {
  std::ofstream out(path);
  if (!out) throw InvalidParams("cannot open " + path.string() + " for writing");
  write_matrix_market(out, s);
}

}  // namespace feast
