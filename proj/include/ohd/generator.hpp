#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ohd/errors.hpp"
#include "ohd/induction.hpp"
#include "ohd/predicate.hpp"
#include "ohd/table.hpp"

namespace ohd {

struct GenSpec {
  std::uint64_t seed = 0;
  int max_col_depth = 2;  // header levels per axis
  int max_row_depth = 2;
  int min_data_rows = 1;
  int max_data_rows = 6;
  int min_data_cols = 1;
  int max_data_cols = 6;
  bool conflict_headers = false;
  bool merged_data = false;
  bool headerless_regions = false;
  bool offset_headers = false;
};

struct GeneratedTable {
  Table table;
  HierTree truth_col;
  HierTree truth_row;
  std::shared_ptr<SemanticPredicate> truth_pred;
};

// Ground-truth subsumption is a label-prefix test: header texts are
// path-encoded ("C0.2" is a child of "C0"), so no linguistic judgment is
// needed in the oracle. Everything else, including header-vs-data
// arbitration queries, is false.
inline std::shared_ptr<SemanticPredicate> make_truth_predicate() {
  return std::make_shared<FunctionPredicate>(
      [](const std::string& parent, const std::string& child, const PredicateContext&) {
        return child.size() > parent.size() + 1 && child.compare(0, parent.size(), parent) == 0 &&
               child[parent.size()] == '.';
      });
}

namespace gen_detail {

struct Node {
  std::string label;
  int lo = 0, hi = 0;  // data-unit interval [lo, hi)
  int level = 0;
  int parent = -1;  // index into nodes, -1 for top level
  bool leaf = true;
  bool offset = false;
};

// Random forest of nested intervals over [0, width).
inline std::vector<Node> build_forest(int width, int max_depth, const std::string& prefix,
                                      std::mt19937_64& rng, bool force_multi_top) {
  std::vector<Node> nodes;
  struct Task {
    int lo, hi, level, parent;
    std::string label;
  };
  int top_max = std::min(width, 3);
  int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(top_max));
  if (force_multi_top && width >= 2 && k < 2) k = 2;

  auto partition = [&rng](int lo, int hi, int parts) {
    std::vector<int> cuts{lo};
    std::vector<int> interior;
    for (int i = lo + 1; i < hi; ++i) interior.push_back(i);
    std::shuffle(interior.begin(), interior.end(), rng);
    interior.resize(parts - 1);
    std::sort(interior.begin(), interior.end());
    for (int c : interior) cuts.push_back(c);
    cuts.push_back(hi);
    return cuts;
  };

  std::vector<Task> tasks;
  auto cuts = partition(0, width, k);
  for (int i = 0; i + 1 < static_cast<int>(cuts.size()); ++i)
    tasks.push_back({cuts[i], cuts[i + 1], 0, -1, prefix + std::to_string(i)});
  while (!tasks.empty()) {
    Task t = tasks.back();
    tasks.pop_back();
    Node n;
    n.label = t.label;
    n.lo = t.lo;
    n.hi = t.hi;
    n.level = t.level;
    n.parent = t.parent;
    int idx = static_cast<int>(nodes.size());
    nodes.push_back(n);
    int w = t.hi - t.lo;
    bool subdivide = t.level + 1 < max_depth && w >= 2 && rng() % 2 == 0;
    if (subdivide) {
      nodes[idx].leaf = false;
      int parts = 2 + (w > 2 ? static_cast<int>(rng() % 2) : 0);
      auto sub = partition(t.lo, t.hi, parts);
      for (int i = 0; i + 1 < static_cast<int>(sub.size()); ++i)
        tasks.push_back({sub[i], sub[i + 1], t.level + 1, idx, t.label + "." + std::to_string(i)});
    }
  }
  return nodes;
}

}  // namespace gen_detail

// Deterministic in the seed. The returned truth trees are what induce_tree
// must reproduce given the truth predicate.
inline GeneratedTable generate(const GenSpec& spec) {
  using gen_detail::Node;
  if (spec.max_col_depth < 1 || spec.max_row_depth < 1)
    throw SpecInfeasible("header depth must be at least 1");
  if (spec.min_data_rows > spec.max_data_rows || spec.min_data_cols > spec.max_data_cols ||
      spec.min_data_rows < 1 || spec.min_data_cols < 1)
    throw SpecInfeasible("empty data dimension range");
  if (spec.conflict_headers && spec.max_data_rows < 3)
    throw SpecInfeasible("conflict headers need at least 3 data rows");
  if (spec.merged_data && spec.max_data_cols < 2)
    throw SpecInfeasible("merged data needs at least 2 data columns");

  std::mt19937_64 rng(spec.seed);
  auto pick = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  int data_cols = pick(std::max(spec.min_data_cols, spec.merged_data ? 2 : 1), spec.max_data_cols);
  int data_rows = pick(std::max(spec.min_data_rows, spec.conflict_headers ? 3 : 1),
                       spec.max_data_rows);

  bool force_multi_top = spec.headerless_regions && spec.conflict_headers;
  std::vector<Node> col_nodes =
      gen_detail::build_forest(data_cols, spec.max_col_depth, "C", rng, force_multi_top);
  std::vector<Node> row_nodes =
      gen_detail::build_forest(data_rows, spec.max_row_depth, "R", rng, false);

  // Headerless regions: drop one top-level column subtree.
  std::vector<int> headerless_cols;  // data-unit columns without any header
  if (spec.headerless_regions) {
    std::vector<int> tops;
    for (int i = 0; i < static_cast<int>(col_nodes.size()); ++i)
      if (col_nodes[i].parent == -1) tops.push_back(i);
    int victim = tops[rng() % tops.size()];
    // keep at least one leaf when a conflict must be injected
    if (!spec.conflict_headers || tops.size() > 1) {
      const Node& v = col_nodes[victim];
      for (int c = v.lo; c < v.hi; ++c) headerless_cols.push_back(c);
      std::vector<Node> kept;
      std::vector<int> remap(col_nodes.size(), -1);
      for (int i = 0; i < static_cast<int>(col_nodes.size()); ++i) {
        bool removed = false;
        int cur = i;
        while (cur != -1) {
          if (cur == victim) {
            removed = true;
            break;
          }
          cur = col_nodes[cur].parent;
        }
        if (!removed) {
          remap[i] = static_cast<int>(kept.size());
          kept.push_back(col_nodes[i]);
        }
      }
      for (Node& n : kept)
        if (n.parent != -1) n.parent = remap[n.parent];
      col_nodes = std::move(kept);
    }
  }

  int col_depth = 0;
  for (const Node& n : col_nodes) col_depth = std::max(col_depth, n.level + 1);
  int row_depth = 0;
  for (const Node& n : row_nodes) row_depth = std::max(row_depth, n.level + 1);

  if (spec.offset_headers) {
    for (Node& n : col_nodes)
      if (n.leaf && n.level < col_depth - 1 && rng() % 2 == 0) n.offset = true;
    for (Node& n : row_nodes)
      if (n.leaf && n.level < row_depth - 1 && rng() % 2 == 0) n.offset = true;
  }

  int n_rows = col_depth + data_rows;
  int n_cols = row_depth + data_cols;

  std::vector<Cell> cells;
  int next_id = 0;
  std::vector<int> col_node_ids(col_nodes.size());
  std::vector<int> row_node_ids(row_nodes.size());

  for (std::size_t i = 0; i < col_nodes.size(); ++i) {
    const Node& n = col_nodes[i];
    Cell c;
    c.id = next_id++;
    c.text = n.label;
    c.role = CellRole::ColumnHeader;
    c.col_start = row_depth + n.lo;
    c.col_end = row_depth + n.hi - 1;
    if (n.leaf) {
      c.row_start = n.offset ? col_depth - 1 : n.level;
      c.row_end = col_depth - 1;
    } else {
      c.row_start = c.row_end = n.level;
    }
    col_node_ids[i] = c.id;
    cells.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < row_nodes.size(); ++i) {
    const Node& n = row_nodes[i];
    Cell c;
    c.id = next_id++;
    c.text = n.label;
    c.role = CellRole::RowHeader;
    c.row_start = col_depth + n.lo;
    c.row_end = col_depth + n.hi - 1;
    if (n.leaf) {
      c.col_start = n.offset ? row_depth - 1 : n.level;
      c.col_end = row_depth - 1;
    } else {
      c.col_start = c.col_end = n.level;
    }
    row_node_ids[i] = c.id;
    cells.push_back(std::move(c));
  }

  // Conflict header: an extra column header inside a leaf's column range at
  // a data row, with a label the truth predicate rejects. Data above its row
  // stays with the covering leaf, data at or below moves under it.
  int conflict_cell_id = -1;
  int conflict_leaf_index = -1;
  int conflict_row = -1;
  if (spec.conflict_headers) {
    std::vector<int> leaves;
    for (int i = 0; i < static_cast<int>(col_nodes.size()); ++i)
      if (col_nodes[i].leaf) leaves.push_back(i);
    if (leaves.empty()) throw SpecInfeasible("no column leaf available for a conflict header");
    conflict_leaf_index = leaves[rng() % leaves.size()];
    conflict_row = pick(col_depth + 1, col_depth + data_rows - 2);
    const Node& leaf = col_nodes[conflict_leaf_index];
    Cell c;
    c.id = next_id++;
    c.text = "X" + std::to_string(rng() % 100);
    c.role = CellRole::ColumnHeader;
    c.row_start = c.row_end = conflict_row;
    c.col_start = row_depth + leaf.lo;
    c.col_end = row_depth + leaf.hi - 1;
    conflict_cell_id = c.id;
    cells.push_back(std::move(c));
  }

  // Data cells: one per grid position in the data region, minus positions
  // covered by the conflict header, with optional horizontal merges.
  struct DataInfo {
    int id;
    int col_parent;  // cell id or HierTree::kRoot
    int row_parent;
  };
  std::vector<DataInfo> data_infos;

  auto col_leaf_for = [&](int data_col) -> int {  // node index or -1
    for (int i = 0; i < static_cast<int>(col_nodes.size()); ++i)
      if (col_nodes[i].leaf && col_nodes[i].lo <= data_col && data_col < col_nodes[i].hi) return i;
    return -1;
  };
  auto row_leaf_for = [&](int data_row) -> int {
    for (int i = 0; i < static_cast<int>(row_nodes.size()); ++i)
      if (row_nodes[i].leaf && row_nodes[i].lo <= data_row && data_row < row_nodes[i].hi) return i;
    return -1;
  };

  auto conflict_covers = [&](int data_col) {
    if (conflict_leaf_index < 0) return false;
    const Node& leaf = col_nodes[conflict_leaf_index];
    return leaf.lo <= data_col && data_col < leaf.hi;
  };

  for (int r = 0; r < data_rows; ++r) {
    int grid_row = col_depth + r;
    for (int c = 0; c < data_cols; ++c) {
      if (conflict_cell_id >= 0 && grid_row == conflict_row && conflict_covers(c)) continue;
      int span = 1;
      if (spec.merged_data && c + 1 < data_cols && !conflict_covers(c) && !conflict_covers(c + 1) &&
          rng() % 4 == 0)
        span = 2;
      Cell cell;
      cell.id = next_id++;
      cell.text = "v" + std::to_string(r) + "_" + std::to_string(c);
      cell.role = CellRole::Data;
      cell.row_start = cell.row_end = grid_row;
      cell.col_start = row_depth + c;
      cell.col_end = row_depth + c + span - 1;

      // truth parent in the column tree
      int col_parent = HierTree::kRoot;
      if (conflict_cell_id >= 0 && conflict_covers(c)) {
        col_parent = grid_row >= conflict_row ? conflict_cell_id
                                              : col_node_ids[conflict_leaf_index];
      } else {
        int best = -1;
        for (int cc = c; cc < c + span; ++cc) {
          int leaf = col_leaf_for(cc);
          if (leaf >= 0 && (best < 0 || col_nodes[leaf].lo < col_nodes[best].lo)) best = leaf;
        }
        if (best >= 0) col_parent = col_node_ids[best];
      }
      int row_leaf = row_leaf_for(r);
      int row_parent = row_leaf >= 0 ? row_node_ids[row_leaf] : HierTree::kRoot;
      data_infos.push_back({cell.id, col_parent, row_parent});
      cells.push_back(std::move(cell));
      c += span - 1;
    }
  }

  Table table(n_rows, n_cols, cells, "synthetic " + std::to_string(spec.seed));

  // Assemble truth trees with the same attachment order the induction
  // pipeline uses: headers in axis-sorted order, then data, then the
  // orthogonal headers under the root.
  auto build_truth = [&table](Axis axis, const std::vector<std::pair<int, int>>& header_parents,
                              const std::vector<std::pair<int, int>>& data_parents) {
    HierTree tree(axis);
    std::vector<Cell> headers = sort_headers(table.cells_with_role(detail::header_role(axis)), axis);
    auto parent_of = [](const std::vector<std::pair<int, int>>& edges, int id) {
      for (const auto& [child, parent] : edges)
        if (child == id) return parent;
      return HierTree::kRoot;
    };
    for (const Cell& h : headers) tree.attach(parent_of(header_parents, h.id), h.id);
    std::vector<Cell> data = sort_headers(table.cells_with_role(CellRole::Data), axis);
    for (const Cell& d : data) tree.attach(parent_of(data_parents, d.id), d.id);
    CellRole orth = axis == Axis::Column ? CellRole::RowHeader : CellRole::ColumnHeader;
    for (const Cell& c : sort_headers(table.cells_with_role(orth), axis))
      tree.attach(HierTree::kRoot, c.id);
    return tree;
  };

  std::vector<std::pair<int, int>> col_header_parents;
  for (std::size_t i = 0; i < col_nodes.size(); ++i)
    col_header_parents.push_back({col_node_ids[i], col_nodes[i].parent == -1
                                                       ? HierTree::kRoot
                                                       : col_node_ids[col_nodes[i].parent]});
  if (conflict_cell_id >= 0) col_header_parents.push_back({conflict_cell_id, HierTree::kRoot});
  std::vector<std::pair<int, int>> row_header_parents;
  for (std::size_t i = 0; i < row_nodes.size(); ++i)
    row_header_parents.push_back({row_node_ids[i], row_nodes[i].parent == -1
                                                       ? HierTree::kRoot
                                                       : row_node_ids[row_nodes[i].parent]});
  std::vector<std::pair<int, int>> col_data_parents;
  std::vector<std::pair<int, int>> row_data_parents;
  for (const DataInfo& d : data_infos) {
    col_data_parents.push_back({d.id, d.col_parent});
    row_data_parents.push_back({d.id, d.row_parent});
  }

  HierTree truth_col = build_truth(Axis::Column, col_header_parents, col_data_parents);
  HierTree truth_row = build_truth(Axis::Row, row_header_parents, row_data_parents);
  return GeneratedTable{std::move(table), std::move(truth_col), std::move(truth_row),
                        make_truth_predicate()};
}

}  // namespace ohd
