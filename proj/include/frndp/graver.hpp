#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace frndp {

using IntMatrix = std::vector<std::vector<int>>;

/// Sparse integer vector of fixed dimension; entries kept sorted by index,
/// zeros never stored.
class IntVector {
 public:
  IntVector() = default;
  explicit IntVector(std::size_t dim) : dim_(dim) {}
  static IntVector from_dense(std::span<const int> dense);

  std::size_t dim() const { return dim_; }
  const std::vector<std::pair<std::size_t, int>>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  int at(std::size_t i) const;
  std::vector<int> dense() const;
  long long norm1() const;

  IntVector operator-() const;
  friend IntVector operator+(const IntVector& a, const IntVector& b);
  friend IntVector operator-(const IntVector& a, const IntVector& b) { return a + (-b); }

  /// First nonzero entry positive.
  IntVector canonical() const;
  /// Copy placed at [offset, offset + dim()) of a `total_dim` vector.
  IntVector embed(std::size_t offset, std::size_t total_dim) const;

  /// Lexicographic order of the dense vectors.
  friend bool operator<(const IntVector& a, const IntVector& b);
  friend bool operator==(const IntVector&, const IntVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::pair<std::size_t, int>> entries_;
};

/// x ⊑ y: same orthant and |x_i| <= |y_i|. Throws std::invalid_argument on
/// dimension mismatch.
bool is_conformal(const IntVector& x, const IntVector& y);

/// Directions for augmentation, sign-canonical and pairwise ⊑-incomparable
/// up to sign. Iteration follows the scan order: ascending 1-norm, ties in
/// descending lexicographic order.
class GraverSet {
 public:
  GraverSet() = default;
  /// Canonicalizes, dedupes and sorts; does not filter.
  GraverSet(std::size_t dim, std::vector<IntVector> vectors);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }
  const IntVector& operator[](std::size_t i) const { return vectors_[i]; }
  auto begin() const { return vectors_.begin(); }
  auto end() const { return vectors_.end(); }
  const std::vector<IntVector>& vectors() const { return vectors_; }

  /// Both signs of every member.
  std::vector<IntVector> with_negatives() const;
  /// True when A g = 0 for every member.
  bool in_kernel(const IntMatrix& A) const;

 private:
  std::size_t dim_ = 0;
  std::vector<IntVector> vectors_;
};

/// Scan-order comparison used by GraverSet.
bool scan_before(const IntVector& a, const IntVector& b);

/// Pairwise differences, zeros dropped, sign-canonical, deduplicated.
std::vector<IntVector> lattice_from_differences(std::span<const IntVector> solutions);

/// Keeps the candidates that have no other candidate (of either sign)
/// conformal to them.
GraverSet conformal_filter(std::size_t dim, std::vector<IntVector> candidates);

/// Integer basis of ker(A) ∩ Z^n from a column Hermite reduction.
std::vector<IntVector> integer_kernel_basis(const IntMatrix& A, std::size_t cols);

inline constexpr std::size_t kPottierMaxColumns = 12;

/// Complete Graver basis by completion from a kernel lattice basis
/// (normal-form reduction of pairwise sums). Throws SizeLimitExceeded above
/// kPottierMaxColumns columns.
GraverSet pottier_graver(const IntMatrix& A, std::size_t cols);

enum class StepOutcome { Infeasible, NotImproving, Improved };

/// One augmentation candidate x + lambda * g. `lower`/`upper` bound every
/// coordinate (upper may be absent for flows). The objective is called only
/// for in-bounds candidates; std::nullopt from it counts as infeasible.
struct StepResult {
  StepOutcome outcome = StepOutcome::Infeasible;
  std::vector<int> point;
  std::optional<double> value;
};

StepResult try_step(std::span<const int> current, double current_value, const IntVector& g,
                    int lambda, int lower, std::optional<int> upper,
                    const std::function<std::optional<double>(std::span<const int>)>& objective);

/// current + g if in bounds and strictly improving, else nothing.
std::optional<std::vector<int>> augment(
    std::span<const int> current, double current_value, const IntVector& g, int lower,
    std::optional<int> upper,
    const std::function<std::optional<double>(std::span<const int>)>& objective);

/// Text format: "rows cols" header, then one vector per line.
void save_graver(const GraverSet& set, const std::filesystem::path& file);
GraverSet load_graver(const std::filesystem::path& file);

}  // namespace frndp
