#include "bimult/rowcol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "bimult/error.hpp"
#include "bimult/lorentz.hpp"

namespace bimult {
namespace {

std::int64_t shell_of(Cell c) { return std::max(std::abs(c.k), std::abs(c.l)); }

// ||f||^2_{l^{4,inf}} = max_j sqrt(j) (f*(j))^2, without the final square root.
double weak_norm_squared(std::span<const CoeffEntry> entries) {
  std::vector<double> mags;
  mags.reserve(entries.size());
  for (const auto& e : entries) mags.push_back(std::abs(e.value));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double best = 0.0;
  for (std::size_t j = 0; j < mags.size() && mags[j] > 0.0; ++j)
    best = std::max(best, std::sqrt(static_cast<double>(j + 1)) * mags[j] * mags[j]);
  return best;
}

// Builds one auxiliary set along lines (rows or columns). `order` lists entry
// indices grouped by line; `line_of` and `pos_of` give the line key and the
// position within the line used for tie-breaking.
template <class LineOf, class PosOf>
std::vector<char> auxiliary_set(std::span<const CoeffEntry> entries, const std::vector<std::size_t>& order,
                                double threshold, LineOf line_of, PosOf pos_of) {
  std::vector<char> member(entries.size(), 0);
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin;
    const auto key = line_of(entries[order[begin]].cell);
    double sum = 0.0;
    while (end < order.size() && line_of(entries[order[end]].cell) == key) {
      sum += std::norm(entries[order[end]].value);
      ++end;
    }
    if (sum <= threshold) {
      for (std::size_t i = begin; i < end; ++i) member[order[i]] = 1;
    } else {
      std::vector<std::size_t> line(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                    order.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(line.begin(), line.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(entries[a].value), mb = std::abs(entries[b].value);
        if (ma != mb) return ma > mb;
        return pos_of(entries[a].cell) < pos_of(entries[b].cell);
      });
      double cum = 0.0;
      for (std::size_t idx : line) {
        if (entries[idx].value == std::complex<double>{}) {
          member[idx] = 1;
          continue;
        }
        if (cum < threshold) {
          member[idx] = 1;
          cum += std::norm(entries[idx].value);
        }
      }
    }
    begin = end;
  }
  return member;
}

// Descending rank (1-based) of positive residual maxima, ties by ascending key.
std::map<std::int64_t, std::int64_t> rank_residuals(const std::map<std::int64_t, double>& maxima) {
  std::vector<std::pair<std::int64_t, double>> items;
  for (const auto& [key, value] : maxima)
    if (value > 0.0) items.emplace_back(key, value);
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::map<std::int64_t, std::int64_t> rank;
  for (std::size_t i = 0; i < items.size(); ++i) rank[items[i].first] = static_cast<std::int64_t>(i) + 1;
  return rank;
}

}  // namespace

CoeffMatrix::CoeffMatrix(std::vector<CoeffEntry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const CoeffEntry& a, const CoeffEntry& b) { return a.cell < b.cell; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i].value.real()) || !std::isfinite(entries_[i].value.imag()))
      throw InvalidArgument("CoeffMatrix: non-finite coefficient");
    if (i > 0 && entries_[i].cell == entries_[i - 1].cell) throw InvalidArgument("CoeffMatrix: duplicate cell");
  }
}

std::complex<double> CoeffMatrix::at(Cell c) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), c,
                             [](const CoeffEntry& e, const Cell& key) { return e.cell < key; });
  if (it != entries_.end() && it->cell == c) return it->value;
  return {};
}

CoeffMatrix CoeffMatrix::scaled(std::complex<double> s) const {
  auto out = entries_;
  for (auto& e : out) e.value *= s;
  return CoeffMatrix(std::move(out));
}

CoeffMatrix CoeffMatrix::transposed() const {
  auto out = entries_;
  for (auto& e : out) std::swap(e.cell.k, e.cell.l);
  return CoeffMatrix(std::move(out));
}

CoeffMatrix CoeffMatrix::restricted(std::int64_t M) const {
  std::vector<CoeffEntry> out;
  for (const auto& e : entries_)
    if (shell_of(e.cell) <= M) out.push_back(e);
  return CoeffMatrix(std::move(out));
}

double CoeffMatrix::weak_norm(double q) const {
  std::vector<std::complex<double>> vals;
  vals.reserve(entries_.size());
  for (const auto& e : entries_) vals.push_back(e.value);
  return weak_quasinorm(measured(vals), q);
}

Partition::Partition(std::vector<std::pair<Cell, Side>> labels) : labels_(std::move(labels)) {
  std::stable_sort(labels_.begin(), labels_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
}

bool Partition::contains(Cell c) const {
  return std::binary_search(labels_.begin(), labels_.end(), std::pair<Cell, Side>{c, Side::S1},
                            [](const auto& a, const auto& b) { return a.first < b.first; });
}

Side Partition::side(Cell c) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), c,
                             [](const auto& a, const Cell& key) { return a.first < key; });
  if (it == labels_.end() || it->first != c) throw InvalidArgument("Partition: cell is not labeled");
  return it->second;
}

Partition Partition::mirrored() const {
  auto out = labels_;
  for (auto& [cell, side] : out) {
    std::swap(cell.k, cell.l);
    side = side == Side::S1 ? Side::S2 : Side::S1;
  }
  return Partition(std::move(out));
}

std::vector<detail::CellTrace> detail::decompose_traced(const CoeffMatrix& f) {
  const auto entries = f.entries();
  std::vector<CellTrace> trace(entries.size());
  if (entries.empty()) return trace;
  for (std::size_t i = 0; i < entries.size(); ++i) trace[i].cell = entries[i].cell;

  const double w2 = weak_norm_squared(entries);
  if (w2 == 0.0) {
    for (auto& t : trace) t.in_row_set = true;
    return trace;
  }
  const double threshold = 2.0 * w2;

  std::vector<std::size_t> by_row(entries.size());
  std::iota(by_row.begin(), by_row.end(), 0);  // entries are already (k, l) sorted
  std::vector<std::size_t> by_col = by_row;
  std::stable_sort(by_col.begin(), by_col.end(), [&](std::size_t a, std::size_t b) {
    const Cell ca = entries[a].cell, cb = entries[b].cell;
    return std::tie(ca.l, ca.k) < std::tie(cb.l, cb.k);
  });

  const auto row_set = auxiliary_set(entries, by_row, threshold, [](Cell c) { return c.k; }, [](Cell c) { return c.l; });
  const auto col_set = auxiliary_set(entries, by_col, threshold, [](Cell c) { return c.l; }, [](Cell c) { return c.k; });

  std::map<std::int64_t, double> row_max, col_max;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double a = std::abs(entries[i].value);
    if (!row_set[i]) row_max[entries[i].cell.k] = std::max(row_max[entries[i].cell.k], a);
    if (!col_set[i]) col_max[entries[i].cell.l] = std::max(col_max[entries[i].cell.l], a);
  }
  const auto row_rank = rank_residuals(row_max);
  const auto col_rank = rank_residuals(col_max);

  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& t = trace[i];
    t.in_row_set = row_set[i];
    t.in_col_set = col_set[i];
    if (auto it = row_rank.find(t.cell.k); it != row_rank.end()) t.row_rank = it->second;
    if (auto it = col_rank.find(t.cell.l); it != col_rank.end()) t.col_rank = it->second;
    if (t.in_row_set)
      t.side = Side::S1;
    else if (t.in_col_set)
      t.side = Side::S2;
    else
      t.side = t.row_rank >= t.col_rank ? Side::S1 : Side::S2;
  }
  return trace;
}

Partition decompose(const CoeffMatrix& f) {
  std::vector<std::pair<Cell, Side>> labels;
  for (const auto& t : detail::decompose_traced(f)) labels.emplace_back(t.cell, t.side);
  return Partition(std::move(labels));
}

PartitionSums verify_partition(const CoeffMatrix& f, const Partition& p) {
  const auto labels = p.labels();
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i].first == labels[i - 1].first) throw InvalidArgument("verify_partition: cell labeled twice");
  std::map<std::int64_t, double> rows, cols;
  for (const auto& e : f.entries()) {
    if (!p.contains(e.cell)) throw InvalidArgument("verify_partition: support cell not covered");
    if (p.side(e.cell) == Side::S1)
      rows[e.cell.k] += std::norm(e.value);
    else
      cols[e.cell.l] += std::norm(e.value);
  }
  PartitionSums out;
  for (const auto& [k, s] : rows) out.max_row_sum = std::max(out.max_row_sum, s);
  for (const auto& [l, s] : cols) out.max_col_sum = std::max(out.max_col_sum, s);
  return out;
}

Partition canonical_partition(const CoeffMatrix& f) {
  std::vector<std::pair<Cell, Side>> labels;
  for (const auto& e : f.entries())
    labels.emplace_back(e.cell, std::abs(e.cell.k) >= std::abs(e.cell.l) ? Side::S1 : Side::S2);
  return Partition(std::move(labels));
}

bool is_shell_monotone(const CoeffMatrix& f) {
  if (f.empty()) return true;
  std::int64_t max_shell = 0;
  for (const auto& e : f.entries()) max_shell = std::max(max_shell, shell_of(e.cell));
  const auto shells = static_cast<std::size_t>(max_shell) + 1;
  std::vector<double> lo(shells, INFINITY), hi(shells, 0.0);
  std::vector<std::int64_t> stored(shells, 0);
  for (const auto& e : f.entries()) {
    const auto s = static_cast<std::size_t>(shell_of(e.cell));
    const double a = std::abs(e.value);
    lo[s] = std::min(lo[s], a);
    hi[s] = std::max(hi[s], a);
    ++stored[s];
  }
  for (std::size_t s = 0; s < shells; ++s) {
    const std::int64_t cells = s == 0 ? 1 : 8 * static_cast<std::int64_t>(s);
    if (stored[s] < cells) lo[s] = 0.0;  // implicit zeros
    if (stored[s] == 0) hi[s] = 0.0;
  }
  for (std::size_t s = 0; s + 1 < shells; ++s)
    if (hi[s + 1] > lo[s]) return false;
  return true;
}

double necessity_lower_bound(const CoeffMatrix& f, std::int64_t M) {
  if (M < 0) throw InvalidArgument("necessity_lower_bound: M must be >= 0");
  if (!is_shell_monotone(f)) throw InvalidArgument("necessity_lower_bound: |f| is not monotone in max(|k|,|l|)");
  double sum = 0.0;
  for (const auto& e : f.entries())
    if (shell_of(e.cell) <= M) sum += std::norm(e.value);
  return sum / (2.0 * static_cast<double>(2 * M + 1));
}

nlohmann::json to_json(const CoeffMatrix& f) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : f.entries()) out.push_back({e.cell.k, e.cell.l, e.value.real(), e.value.imag()});
  return out;
}

CoeffMatrix coeff_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw SchemaError("CoeffMatrix: expected a JSON list");
  std::vector<CoeffEntry> entries;
  try {
    for (const auto& row : j) {
      if (!row.is_array() || row.size() < 3 || row.size() > 4)
        throw SchemaError("CoeffMatrix: each entry is [k, l, re] or [k, l, re, im]");
      const double im = row.size() == 4 ? row[3].get<double>() : 0.0;
      entries.push_back({{row[0].get<std::int64_t>(), row[1].get<std::int64_t>()}, {row[2].get<double>(), im}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("CoeffMatrix: ") + e.what());
  }
  return CoeffMatrix(std::move(entries));
}

nlohmann::json to_json(const Partition& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [cell, side] : p.labels()) out.push_back({cell.k, cell.l, side == Side::S1 ? "S1" : "S2"});
  return out;
}

Partition partition_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw SchemaError("Partition: expected a JSON list");
  std::vector<std::pair<Cell, Side>> labels;
  try {
    for (const auto& row : j) {
      if (!row.is_array() || row.size() != 3) throw SchemaError("Partition: each entry is [k, l, side]");
      const auto tag = row[2].get<std::string>();
      if (tag != "S1" && tag != "S2") throw SchemaError("Partition: side must be \"S1\" or \"S2\"");
      labels.emplace_back(Cell{row[0].get<std::int64_t>(), row[1].get<std::int64_t>()},
                          tag == "S1" ? Side::S1 : Side::S2);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("Partition: ") + e.what());
  }
  return Partition(std::move(labels));
}

}  // namespace bimult
