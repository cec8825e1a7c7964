#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ohd/errors.hpp"
#include "ohd/predicate.hpp"
#include "ohd/table.hpp"

namespace ohd {

// Rooted hierarchy over one axis of a table. Nodes are cell ids plus a
// virtual root (-1). Child order is the order of attachment.
class HierTree {
 public:
  static constexpr int kRoot = -1;

  explicit HierTree(Axis axis) : axis_(axis) { children_[kRoot] = {}; }

  Axis axis() const { return axis_; }

  void attach(int parent, int child) {
    parent_[child] = parent;
    children_[parent].push_back(child);
    if (!children_.count(child)) children_[child] = {};
  }

  bool contains(int id) const { return id == kRoot || parent_.count(id) != 0; }

  int parent_of(int id) const {
    auto it = parent_.find(id);
    if (it == parent_.end()) throw MissingInTree(id);
    return it->second;
  }

  const std::vector<int>& children_of(int id) const {
    static const std::vector<int> empty;
    auto it = children_.find(id);
    return it == children_.end() ? empty : it->second;
  }

  bool is_leaf(int id) const { return children_of(id).empty(); }

  std::size_t node_count() const { return parent_.size(); }

  // Ancestor chain of `id`, outermost first, root excluded.
  std::vector<int> ancestors(int id) const {
    std::vector<int> chain;
    int cur = parent_of(id);
    while (cur != kRoot) {
      chain.push_back(cur);
      cur = parent_of(cur);
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
  }

  // Pre-order DFS node sequence, root excluded.
  std::vector<int> dfs_order() const {
    std::vector<int> order;
    std::vector<int> stack{kRoot};
    while (!stack.empty()) {
      int node = stack.back();
      stack.pop_back();
      if (node != kRoot) order.push_back(node);
      const auto& kids = children_of(node);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return order;
  }

  bool operator==(const HierTree& other) const {
    return axis_ == other.axis_ && children_ == other.children_;
  }

  // {"axis": ..., "edges": [[parent, child], ...]} with edges in DFS order.
  std::string to_json() const {
    nlohmann::ordered_json j;
    j["axis"] = to_string(axis_);
    j["edges"] = nlohmann::ordered_json::array();
    for (int node : dfs_order()) j["edges"].push_back({parent_of(node), node});
    return j.dump(2) + "\n";
  }

  static HierTree from_json(const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedInput(e.what());
    }
    HierTree tree(j.at("axis").get<std::string>() == "row" ? Axis::Row : Axis::Column);
    for (const auto& edge : j.at("edges")) tree.attach(edge.at(0).get<int>(), edge.at(1).get<int>());
    return tree;
  }

 private:
  Axis axis_;
  std::map<int, int> parent_;
  std::map<int, std::vector<int>> children_;
};

struct ConflictPair {
  int outer;  // h_a
  int inner;  // h_b
  auto operator<=>(const ConflictPair&) const = default;
};

namespace detail {

inline CellRole header_role(Axis axis) {
  return axis == Axis::Column ? CellRole::ColumnHeader : CellRole::RowHeader;
}

// Position of a cell along the growth direction of the axis: grid row for
// the column tree, grid column for the row tree.
inline int depth_pos(const Cell& c, Axis axis) {
  return axis == Axis::Column ? c.row_start : c.col_start;
}

// Position along the breadth direction, used for leftmost tie-breaks.
inline int breadth_pos(const Cell& c, Axis axis) {
  return axis == Axis::Column ? c.col_start : c.row_start;
}

inline bool axis_span_contains(const Cell& outer, const Cell& inner, Axis axis) {
  return axis == Axis::Column ? outer.cols_contain(inner) : outer.rows_contain(inner);
}

inline bool axis_span_intersects(const Cell& a, const Cell& b, Axis axis) {
  return axis == Axis::Column ? a.cols_intersect(b) : a.rows_intersect(b);
}

}  // namespace detail

// Row-major order for the column axis, column-major for the row axis.
inline std::vector<Cell> sort_headers(std::vector<Cell> headers, Axis axis) {
  std::sort(headers.begin(), headers.end(), [axis](const Cell& a, const Cell& b) {
    int da = detail::depth_pos(a, axis), db = detail::depth_pos(b, axis);
    if (da != db) return da < db;
    return detail::breadth_pos(a, axis) < detail::breadth_pos(b, axis);
  });
  return headers;
}

// P_spatial: the candidate parent's axis span contains the child's, and the
// parent sits strictly earlier along the growth direction.
inline bool spatial_subsumes(const Cell& h_i, const Cell& h_j, Axis axis) {
  if (axis == Axis::Column) return h_i.cols_contain(h_j) && h_i.row_end <= h_j.row_start;
  return h_i.rows_contain(h_j) && h_i.col_end <= h_j.col_start;
}

// Spatial test first; the semantic predicate is consulted only on a spatial
// hit, so remote-backed predicates see the minimum number of queries.
inline bool rss_subsumes(const Cell& h_i, const Cell& h_j, Axis axis, SemanticPredicate& pred,
                         const std::string& title = {}) {
  if (!spatial_subsumes(h_i, h_j, axis)) return false;
  return pred.judge(h_i.text, h_j.text, PredicateContext{axis, title});
}

// Stage I: each header links to the most recently processed header that
// subsumes it, or to the virtual root.
inline HierTree induce_skeleton(const std::vector<Cell>& sorted_headers, Axis axis,
                                SemanticPredicate& pred, const std::string& title = {}) {
  HierTree tree(axis);
  std::vector<const Cell*> built;
  for (const Cell& h : sorted_headers) {
    int parent = HierTree::kRoot;
    for (auto it = built.rbegin(); it != built.rend(); ++it) {
      if (rss_subsumes(**it, h, axis, pred, title)) {
        parent = (*it)->id;
        break;
      }
    }
    tree.attach(parent, h.id);
    built.push_back(&h);
  }
  return tree;
}

// Leaf-header pairs that nest spatially without a hierarchy edge between
// them (the predicate already rejected the link during Stage I).
inline std::set<ConflictPair> compute_conflict_set(const HierTree& tree, const Table& t,
                                                   Axis axis) {
  std::vector<const Cell*> leaves;
  for (const Cell& c : t.cells())
    if (c.role == detail::header_role(axis) && tree.contains(c.id) && tree.is_leaf(c.id))
      leaves.push_back(&c);
  std::set<ConflictPair> conflicts;
  for (const Cell* a : leaves)
    for (const Cell* b : leaves) {
      if (a == b) continue;
      if (detail::depth_pos(*a, axis) < detail::depth_pos(*b, axis) &&
          detail::axis_span_contains(*a, *b, axis))
        conflicts.insert({a->id, b->id});
    }
  return conflicts;
}

namespace detail {

// Single-cell anchoring decision; shared by anchor_data and the brute-force
// oracle in the tests.
inline int anchor_parent(const Cell& d, const std::vector<const Cell*>& leaves,
                         const std::set<ConflictPair>& conflicts, const Table& t, Axis axis,
                         SemanticPredicate& pred) {
  // A conflict pair governs d when d's axis span reaches into the inner
  // header's span.
  const Cell* crossed = nullptr;   // innermost h_b at or before d
  const Cell* outer = nullptr;     // outermost h_a when no boundary crossed
  bool governed = false;
  for (const ConflictPair& pair : conflicts) {
    const Cell& h_a = t.cell(pair.outer);
    const Cell& h_b = t.cell(pair.inner);
    if (!axis_span_intersects(d, h_b, axis)) continue;
    governed = true;
    if (depth_pos(d, axis) >= depth_pos(h_b, axis)) {
      if (!crossed || depth_pos(h_b, axis) > depth_pos(*crossed, axis) ||
          (depth_pos(h_b, axis) == depth_pos(*crossed, axis) &&
           breadth_pos(h_b, axis) < breadth_pos(*crossed, axis)))
        crossed = &h_b;
    } else {
      if (!outer || depth_pos(h_a, axis) < depth_pos(*outer, axis) ||
          (depth_pos(h_a, axis) == depth_pos(*outer, axis) &&
           breadth_pos(h_a, axis) < breadth_pos(*outer, axis)))
        outer = &h_a;
    }
  }
  if (governed) return crossed ? crossed->id : outer->id;

  std::vector<const Cell*> candidates;
  for (const Cell* h : leaves)
    if (axis_span_intersects(d, *h, axis)) candidates.push_back(h);
  if (candidates.empty()) return HierTree::kRoot;
  if (candidates.size() > 1) {
    std::vector<const Cell*> accepted;
    for (const Cell* h : candidates)
      if (pred.judge(h->text, d.text, PredicateContext{axis, t.title().value_or("")}))
        accepted.push_back(h);
    if (!accepted.empty()) candidates = std::move(accepted);
  }
  const Cell* best = candidates.front();
  for (const Cell* h : candidates) {
    if (breadth_pos(*h, axis) < breadth_pos(*best, axis) ||
        (breadth_pos(*h, axis) == breadth_pos(*best, axis) && h->id < best->id))
      best = h;
  }
  return best->id;
}

}  // namespace detail

// Stage II: every data cell gains exactly one parent. Conflict pairs split
// data at the inner header's boundary; otherwise data attaches to an
// overlapping Stage-I leaf (predicate-arbitrated when merged cells overlap
// several), or to the root when no leaf covers it.
inline HierTree anchor_data(HierTree tree, const std::set<ConflictPair>& conflicts,
                            const std::vector<Cell>& data_cells, const Table& t, Axis axis,
                            SemanticPredicate& pred) {
  std::vector<const Cell*> leaves;
  for (const Cell& c : t.cells())
    if (c.role == detail::header_role(axis) && tree.contains(c.id) && tree.is_leaf(c.id))
      leaves.push_back(&c);
  for (const Cell& d : data_cells)
    tree.attach(detail::anchor_parent(d, leaves, conflicts, t, axis, pred), d.id);
  return tree;
}

// Full OTI pipeline for one axis. Orthogonal-axis headers carry no branching
// agency here; they are housed as leaves under the virtual root.
inline HierTree induce_tree(const Table& t, Axis axis, SemanticPredicate& pred) {
  std::string title = t.title().value_or("");
  std::vector<Cell> headers = sort_headers(t.cells_with_role(detail::header_role(axis)), axis);
  HierTree tree = induce_skeleton(headers, axis, pred, title);
  std::set<ConflictPair> conflicts = compute_conflict_set(tree, t, axis);

  // Data in the same traversal order as the headers (row-major for the
  // column tree, column-major for the row tree).
  std::vector<Cell> data = sort_headers(t.cells_with_role(CellRole::Data), axis);
  tree = anchor_data(std::move(tree), conflicts, data, t, axis, pred);

  CellRole orth = axis == Axis::Column ? CellRole::RowHeader : CellRole::ColumnHeader;
  for (const Cell& c : sort_headers(t.cells_with_role(orth), axis))
    tree.attach(HierTree::kRoot, c.id);
  return tree;
}

// Structural invariants of a complete induced tree. Throws ohd::Error on the
// first violation.
inline void validate_tree(const HierTree& tree, const Table& t) {
  if (tree.node_count() != t.cells().size())
    throw Error("tree does not cover every cell exactly once");
  std::set<int> seen;
  for (int node : tree.dfs_order()) {
    if (!seen.insert(node).second) throw Error("node visited twice (cycle or shared parent)");
    if (!t.has_cell(node)) throw Error("tree references unknown cell " + std::to_string(node));
  }
  if (seen.size() != tree.node_count()) throw Error("tree is not connected");
  CellRole branching = detail::header_role(tree.axis());
  for (int node : tree.dfs_order()) {
    const Cell& c = t.cell(node);
    if (c.role != branching && !tree.is_leaf(node))
      throw Error("non-branching cell " + std::to_string(node) + " has children");
  }
}

}  // namespace ohd
