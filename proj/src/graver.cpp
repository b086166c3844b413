#include "frndp/graver.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "frndp/error.hpp"

namespace frndp {

IntVector IntVector::from_dense(std::span<const int> dense) {
  IntVector v(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0) v.entries_.emplace_back(i, dense[i]);
  return v;
}

int IntVector::at(std::size_t i) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair<std::size_t, int>{i, INT_MIN});
  return it != entries_.end() && it->first == i ? it->second : 0;
}

std::vector<int> IntVector::dense() const {
  std::vector<int> out(dim_, 0);
  for (const auto& [i, v] : entries_) out[i] = v;
  return out;
}

long long IntVector::norm1() const {
  long long total = 0;
  for (const auto& e : entries_) total += std::abs(e.second);
  return total;
}

IntVector IntVector::operator-() const {
  IntVector out = *this;
  for (auto& e : out.entries_) e.second = -e.second;
  return out;
}

IntVector operator+(const IntVector& a, const IntVector& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("IntVector dimension mismatch");
  IntVector out(a.dim_);
  auto i = a.entries_.begin();
  auto j = b.entries_.begin();
  while (i != a.entries_.end() || j != b.entries_.end()) {
    if (j == b.entries_.end() || (i != a.entries_.end() && i->first < j->first)) {
      out.entries_.push_back(*i++);
    } else if (i == a.entries_.end() || j->first < i->first) {
      out.entries_.push_back(*j++);
    } else {
      if (const int sum = i->second + j->second; sum != 0) out.entries_.emplace_back(i->first, sum);
      ++i;
      ++j;
    }
  }
  return out;
}

IntVector IntVector::canonical() const {
  return !entries_.empty() && entries_.front().second < 0 ? -*this : *this;
}

IntVector IntVector::embed(std::size_t offset, std::size_t total_dim) const {
  if (offset + dim_ > total_dim) throw std::invalid_argument("embed out of range");
  IntVector out(total_dim);
  for (const auto& [i, v] : entries_) out.entries_.emplace_back(i + offset, v);
  return out;
}

bool operator<(const IntVector& a, const IntVector& b) {
  if (a.dim_ != b.dim_) return a.dim_ < b.dim_;
  auto i = a.entries_.begin();
  auto j = b.entries_.begin();
  for (; i != a.entries_.end() && j != b.entries_.end(); ++i, ++j) {
    if (i->first != j->first) {
      // The vector whose nonzero comes first is compared against an implicit 0.
      return i->first < j->first ? i->second < 0 : j->second > 0;
    }
    if (i->second != j->second) return i->second < j->second;
  }
  if (i != a.entries_.end()) return i->second < 0;
  if (j != b.entries_.end()) return j->second > 0;
  return false;
}

bool is_conformal(const IntVector& x, const IntVector& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("is_conformal: dimension mismatch");
  auto j = y.entries().begin();
  for (const auto& [i, v] : x.entries()) {
    while (j != y.entries().end() && j->first < i) ++j;
    if (j == y.entries().end() || j->first != i) return false;
    if ((v > 0) != (j->second > 0) || std::abs(v) > std::abs(j->second)) return false;
  }
  return true;
}

bool scan_before(const IntVector& a, const IntVector& b) {
  const long long na = a.norm1();
  const long long nb = b.norm1();
  if (na != nb) return na < nb;
  return b < a;
}

GraverSet::GraverSet(std::size_t dim, std::vector<IntVector> vectors) : dim_(dim) {
  for (auto& v : vectors) {
    if (v.dim() != dim) throw std::invalid_argument("GraverSet: dimension mismatch");
    if (v.is_zero()) throw std::invalid_argument("GraverSet: zero vector");
    v = v.canonical();
  }
  std::sort(vectors.begin(), vectors.end(), scan_before);
  vectors.erase(std::unique(vectors.begin(), vectors.end()), vectors.end());
  vectors_ = std::move(vectors);
}

std::vector<IntVector> GraverSet::with_negatives() const {
  std::vector<IntVector> out;
  out.reserve(2 * vectors_.size());
  for (const auto& v : vectors_) {
    out.push_back(v);
    out.push_back(-v);
  }
  return out;
}

bool GraverSet::in_kernel(const IntMatrix& A) const {
  for (const auto& v : vectors_)
    for (const auto& row : A) {
      long long dot = 0;
      for (const auto& [i, x] : v.entries()) dot += static_cast<long long>(row[i]) * x;
      if (dot != 0) return false;
    }
  return true;
}

std::vector<IntVector> lattice_from_differences(std::span<const IntVector> solutions) {
  std::set<IntVector> out;
  for (std::size_t i = 0; i < solutions.size(); ++i)
    for (std::size_t j = i + 1; j < solutions.size(); ++j) {
      IntVector d = solutions[j] - solutions[i];
      if (!d.is_zero()) out.insert(d.canonical());
    }
  return {out.begin(), out.end()};
}

GraverSet conformal_filter(std::size_t dim, std::vector<IntVector> candidates) {
  const GraverSet sorted(dim, std::move(candidates));
  std::vector<IntVector> kept;
  for (const auto& v : sorted) {
    const long long nv = v.norm1();
    const IntVector neg = -v;
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](const IntVector& u) {
      return u.norm1() < nv && (is_conformal(u, v) || is_conformal(u, neg));
    });
    if (!dominated) kept.push_back(v);
  }
  return GraverSet(dim, std::move(kept));
}

std::vector<IntVector> integer_kernel_basis(const IntMatrix& A, std::size_t cols) {
  using Column = std::vector<long long>;
  const std::size_t rows = A.size();
  // Column j carries (A e_j ; U e_j) under unimodular column operations.
  std::vector<Column> work(cols, Column(rows + cols, 0));
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t r = 0; r < rows; ++r) work[j][r] = A[r].at(j);
    work[j][rows + j] = 1;
  }
  std::size_t pivot = 0;
  for (std::size_t r = 0; r < rows && pivot < cols; ++r) {
    while (true) {
      std::size_t best = cols;
      for (std::size_t j = pivot; j < cols; ++j)
        if (work[j][r] != 0 && (best == cols || std::llabs(work[j][r]) < std::llabs(work[best][r])))
          best = j;
      if (best == cols) break;
      bool reduced = false;
      for (std::size_t j = pivot; j < cols; ++j) {
        if (j == best || work[j][r] == 0) continue;
        const long long q = work[j][r] / work[best][r];
        for (std::size_t t = 0; t < rows + cols; ++t) work[j][t] -= q * work[best][t];
        reduced = true;
      }
      if (!reduced) {
        std::swap(work[pivot], work[best]);
        ++pivot;
        break;
      }
    }
  }
  std::vector<IntVector> basis;
  for (std::size_t j = pivot; j < cols; ++j) {
    std::vector<int> v(cols);
    for (std::size_t t = 0; t < cols; ++t) v[t] = static_cast<int>(work[j][rows + t]);
    basis.push_back(IntVector::from_dense(v));
  }
  return basis;
}

namespace {

using Dense = std::vector<int>;

bool dense_conformal(const Dense& x, const Dense& y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    if ((x[i] > 0) != (y[i] > 0) || std::abs(x[i]) > std::abs(y[i])) return false;
  }
  return true;
}

bool dense_zero(const Dense& x) {
  return std::all_of(x.begin(), x.end(), [](int v) { return v == 0; });
}

Dense normal_form(Dense s, const std::vector<Dense>& reducers) {
  bool changed = true;
  while (changed && !dense_zero(s)) {
    changed = false;
    for (const auto& g : reducers) {
      if (!dense_conformal(g, s)) continue;
      for (std::size_t i = 0; i < s.size(); ++i) s[i] -= g[i];
      changed = true;
      break;
    }
  }
  return s;
}

Dense add(const Dense& a, const Dense& b) {
  Dense out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

}  // namespace

GraverSet pottier_graver(const IntMatrix& A, std::size_t cols) {
  if (cols > kPottierMaxColumns)
    throw SizeLimitExceeded("pottier_graver: " + std::to_string(cols) + " columns exceeds guard of " +
                            std::to_string(kPottierMaxColumns));
  std::vector<Dense> G;
  for (const auto& b : integer_kernel_basis(A, cols)) {
    G.push_back(b.dense());
    G.push_back((-b).dense());
  }
  std::deque<Dense> pending;
  for (std::size_t i = 0; i < G.size(); ++i)
    for (std::size_t j = i + 1; j < G.size(); ++j) pending.push_back(add(G[i], G[j]));
  while (!pending.empty()) {
    Dense f = normal_form(std::move(pending.front()), G);
    pending.pop_front();
    if (dense_zero(f)) continue;
    for (const auto& g : G) pending.push_back(add(f, g));
    G.push_back(std::move(f));
  }
  std::vector<IntVector> minimal;
  for (const auto& g : G) {
    const bool dominated = std::any_of(G.begin(), G.end(), [&](const Dense& h) {
      return h != g && !dense_zero(h) && dense_conformal(h, g);
    });
    if (!dominated) minimal.push_back(IntVector::from_dense(g));
  }
  return GraverSet(cols, std::move(minimal));
}

StepResult try_step(std::span<const int> current, double current_value, const IntVector& g,
                    int lambda, int lower, std::optional<int> upper,
                    const std::function<std::optional<double>(std::span<const int>)>& objective) {
  StepResult result;
  result.point.assign(current.begin(), current.end());
  for (const auto& [i, v] : g.entries()) {
    const int x = result.point[i] + lambda * v;
    if (x < lower || (upper && x > *upper)) return result;
    result.point[i] = x;
  }
  result.value = objective(result.point);
  if (!result.value) return result;
  result.outcome = *result.value < current_value ? StepOutcome::Improved : StepOutcome::NotImproving;
  return result;
}

std::optional<std::vector<int>> augment(
    std::span<const int> current, double current_value, const IntVector& g, int lower,
    std::optional<int> upper,
    const std::function<std::optional<double>(std::span<const int>)>& objective) {
  auto step = try_step(current, current_value, g, 1, lower, upper, objective);
  if (step.outcome != StepOutcome::Improved) return std::nullopt;
  return std::move(step.point);
}

void save_graver(const GraverSet& set, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << set.size() << ' ' << set.dim() << '\n';
  for (const auto& v : set) {
    const auto d = v.dense();
    for (std::size_t i = 0; i < d.size(); ++i) out << (i ? " " : "") << d[i];
    out << '\n';
  }
}

GraverSet load_graver(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read " + file.string());
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(in >> rows >> cols)) throw SchemaError(file.string(), "missing 'rows cols' header");
  std::vector<IntVector> vectors;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<int> d(cols);
    for (auto& x : d)
      if (!(in >> x)) throw SchemaError(file.string() + ":row " + std::to_string(r), "short row");
    vectors.push_back(IntVector::from_dense(d));
  }
  return GraverSet(cols, std::move(vectors));
}

}  // namespace frndp
