#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ohd/errors.hpp"

namespace ohd {

enum class CellRole { ColumnHeader, RowHeader, Data };

enum class Axis { Column, Row };

inline const char* to_string(CellRole r) {
  switch (r) {
    case CellRole::ColumnHeader: return "column_header";
    case CellRole::RowHeader: return "row_header";
    case CellRole::Data: return "data";
  }
  return "";
}

inline const char* to_string(Axis a) { return a == Axis::Column ? "column" : "row"; }

inline CellRole role_from_string(const std::string& s) {
  if (s == "column_header") return CellRole::ColumnHeader;
  if (s == "row_header") return CellRole::RowHeader;
  if (s == "data") return CellRole::Data;
  throw MalformedInput("unknown role \"" + s + "\"");
}

// An annotated grid region. Spans are 0-based and inclusive on both ends.
struct Cell {
  int id = 0;
  std::string text;
  int row_start = 0;
  int row_end = 0;
  int col_start = 0;
  int col_end = 0;
  CellRole role = CellRole::Data;

  bool operator==(const Cell&) const = default;

  bool rows_contain(const Cell& other) const {
    return row_start <= other.row_start && other.row_end <= row_end;
  }
  bool cols_contain(const Cell& other) const {
    return col_start <= other.col_start && other.col_end <= col_end;
  }
  bool rows_intersect(const Cell& other) const {
    return row_start <= other.row_end && other.row_start <= row_end;
  }
  bool cols_intersect(const Cell& other) const {
    return col_start <= other.col_end && other.col_start <= col_end;
  }
};

// Validated collection of non-overlapping cells on an n_rows x n_cols grid.
// Cell order is canonical: row-major by (row_start, col_start).
class Table {
 public:
  Table(int n_rows, int n_cols, std::vector<Cell> cells,
        std::optional<std::string> title = std::nullopt)
      : n_rows_(n_rows), n_cols_(n_cols), title_(std::move(title)), cells_(std::move(cells)) {
    validate();
    std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
      if (a.row_start != b.row_start) return a.row_start < b.row_start;
      return a.col_start < b.col_start;
    });
    for (std::size_t i = 0; i < cells_.size(); ++i) index_[cells_[i].id] = i;
  }

  int n_rows() const { return n_rows_; }
  int n_cols() const { return n_cols_; }
  const std::optional<std::string>& title() const { return title_; }
  const std::vector<Cell>& cells() const { return cells_; }

  const Cell& cell(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw MalformedInput("no cell with id " + std::to_string(id));
    return cells_[it->second];
  }

  bool has_cell(int id) const { return index_.count(id) != 0; }

  std::vector<Cell> cells_with_role(CellRole role) const {
    std::vector<Cell> out;
    for (const Cell& c : cells_)
      if (c.role == role) out.push_back(c);
    return out;
  }

  bool operator==(const Table& other) const {
    return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ && title_ == other.title_ &&
           cells_ == other.cells_;
  }

 private:
  void validate() const {
    if (n_rows_ <= 0 || n_cols_ <= 0) throw MalformedInput("grid dimensions must be positive");
    std::map<int, int> seen_ids;
    bool any_data = false;
    for (const Cell& c : cells_) {
      if (c.id < 0) throw MalformedInput("negative cell id");
      if (seen_ids.count(c.id)) throw MalformedInput("duplicate cell id " + std::to_string(c.id));
      seen_ids[c.id] = 1;
      if (c.row_start > c.row_end || c.col_start > c.col_end) throw OutOfBounds(c.id);
      if (c.row_start < 0 || c.col_start < 0 || c.row_end >= n_rows_ || c.col_end >= n_cols_)
        throw OutOfBounds(c.id);
      if (c.role == CellRole::Data) any_data = true;
    }
    check_overlaps();
    if (!any_data) throw NoDataCells();
  }

  // Row sweep with an active interval set ordered by col_start: O(k log k).
  void check_overlaps() const {
    struct Event {
      int row;
      bool add;
      const Cell* cell;
    };
    std::vector<Event> events;
    events.reserve(cells_.size() * 2);
    for (const Cell& c : cells_) {
      events.push_back({c.row_start, true, &c});
      events.push_back({c.row_end + 1, false, &c});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
      if (a.row != b.row) return a.row < b.row;
      return a.add < b.add;  // removals first
    });
    std::map<int, const Cell*> active;  // col_start -> cell
    for (const Event& e : events) {
      if (!e.add) {
        active.erase(e.cell->col_start);
        continue;
      }
      auto next = active.lower_bound(e.cell->col_start);
      if (next != active.end() && next->second->col_start <= e.cell->col_end)
        throw OverlappingCells(e.cell->id, next->second->id);
      if (next != active.begin()) {
        auto prev = std::prev(next);
        if (prev->second->col_end >= e.cell->col_start)
          throw OverlappingCells(prev->second->id, e.cell->id);
      }
      active.emplace(e.cell->col_start, e.cell);
    }
  }

  int n_rows_;
  int n_cols_;
  std::optional<std::string> title_;
  std::vector<Cell> cells_;
  std::map<int, std::size_t> index_;
};

// Swaps axes: spans, grid dimensions, and header roles. Involution.
inline Table transpose(const Table& t) {
  std::vector<Cell> cells = t.cells();
  for (Cell& c : cells) {
    std::swap(c.row_start, c.col_start);
    std::swap(c.row_end, c.col_end);
    if (c.role == CellRole::ColumnHeader)
      c.role = CellRole::RowHeader;
    else if (c.role == CellRole::RowHeader)
      c.role = CellRole::ColumnHeader;
  }
  return Table(t.n_cols(), t.n_rows(), std::move(cells), t.title());
}

}  // namespace ohd
