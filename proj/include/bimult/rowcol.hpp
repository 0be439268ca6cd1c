#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace bimult {

struct Cell {
  std::int64_t k = 0;
  std::int64_t l = 0;
  auto operator<=>(const Cell&) const = default;
};

struct CoeffEntry {
  Cell cell;
  std::complex<double> value;
};

/// Finitely supported coefficient family c_{k,l} on Z x Z. Entries are kept
/// sorted by (k, l); cells that are not stored are zero.
class CoeffMatrix {
 public:
  CoeffMatrix() = default;
  /// Throws InvalidArgument on duplicate cells or non-finite values.
  explicit CoeffMatrix(std::vector<CoeffEntry> entries);

  std::span<const CoeffEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::complex<double> at(Cell c) const;

  CoeffMatrix scaled(std::complex<double> s) const;
  CoeffMatrix transposed() const;
  /// Entries inside [-M, M]^2 only.
  CoeffMatrix restricted(std::int64_t M) const;

  /// ||c||_{l^{q,inf}} with respect to counting measure.
  double weak_norm(double q = 4.0) const;

 private:
  std::vector<CoeffEntry> entries_;
};

enum class Side { S1, S2 };

/// Labels of support cells. Duplicate labels are representable so that
/// verify_partition can reject double coverage.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<std::pair<Cell, Side>> labels);

  std::span<const std::pair<Cell, Side>> labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  /// Label of a cell; throws InvalidArgument if the cell is unlabeled.
  Side side(Cell c) const;
  bool contains(Cell c) const;

  /// Partition of the transposed matrix with S1 and S2 exchanged.
  Partition mirrored() const;

 private:
  std::vector<std::pair<Cell, Side>> labels_;
};

struct PartitionSums {
  double max_row_sum = 0.0;  // max_k sum_{l:(k,l) in S1} |f|^2
  double max_col_sum = 0.0;  // max_l sum_{k:(k,l) in S2} |f|^2
};

/// Splits the support of f into S1 (row square sums bounded) and S2 (column
/// square sums bounded) relative to ||f||^2_{l^{4,inf}}.
///
/// After normalizing ||f||_{l^{4,inf}} = 1:
///  1. a row whose square sum is <= 2 goes entirely to the row-auxiliary set;
///     otherwise its largest entries (ties by ascending column) are taken
///     until the square sum first reaches 2, together with its zero entries;
///  2. the column-auxiliary set is built the same way along columns;
///  3. residual row maxima R_k (outside the row set) and column maxima C_l
///     (outside the column set) are ranked descending, ties by index;
///  4. a cell in neither set, at row rank i and column rank j, joins S1 iff
///     i >= j. Row-set cells join S1, the rest of the column set joins S2.
/// Every row of S1 and every column of S2 then has square sum < 4 ||f||^2.
Partition decompose(const CoeffMatrix& f);

/// Maximal S1-row and S2-column square sums. Throws InvalidArgument when a
/// support cell is unlabeled or labeled twice.
PartitionSums verify_partition(const CoeffMatrix& f, const Partition& p);

/// S1 = {|k| >= |l|}, S2 = {|k| < |l|} on the support of f.
Partition canonical_partition(const CoeffMatrix& f);

/// (sum_{|k|,|l| <= M} |f|^2) / (2 (2M+1)): every valid partition has a
/// constant at least this large. Requires |f| non-increasing in max(|k|,|l|)
/// (checked, InvalidArgument otherwise).
double necessity_lower_bound(const CoeffMatrix& f, std::int64_t M);

/// True when |f| is non-increasing in max(|k|, |l|) over all of Z^2.
bool is_shell_monotone(const CoeffMatrix& f);

namespace detail {

struct CellTrace {
  Cell cell;
  bool in_row_set = false;
  bool in_col_set = false;
  std::int64_t row_rank = 0;  // 0 when R_k == 0
  std::int64_t col_rank = 0;  // 0 when C_l == 0
  Side side = Side::S1;
};

/// decompose() with the per-cell algorithm state exposed, for tests.
std::vector<CellTrace> decompose_traced(const CoeffMatrix& f);

}  // namespace detail

/// JSON list of [k, l, re, im].
nlohmann::json to_json(const CoeffMatrix& f);
CoeffMatrix coeff_from_json(const nlohmann::json& j);
/// JSON list of [k, l, "S1"|"S2"].
nlohmann::json to_json(const Partition& p);
Partition partition_from_json(const nlohmann::json& j);

}  // namespace bimult
