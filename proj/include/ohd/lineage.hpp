#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "ohd/errors.hpp"
#include "ohd/induction.hpp"
#include "ohd/table.hpp"

namespace ohd {

struct LineageRecord {
  int data_cell = 0;
  std::vector<std::string> premise_path;    // primary tree, root -> parent order
  std::vector<std::string> attribute_path;  // orthogonal tree, after truncation
};

struct RepresentationItem {
  enum class Kind { Header, DataStatement };
  Kind kind;
  std::string text;
  int cell_id;
  int depth;  // tree depth of header items; 0 for data statements

  bool operator==(const RepresentationItem&) const = default;
};

struct Representation {
  Axis primary_axis = Axis::Column;
  std::vector<RepresentationItem> items;

  bool operator==(const Representation&) const = default;
};

// Rectangular table region, inclusive bounds.
struct Region {
  int row_start = 0;
  int row_end = 0;
  int col_start = 0;
  int col_end = 0;
};

// Pre-order walk of the primary tree restricted to its own header role.
// Data nodes and orthogonal headers are traversed but not emitted.
inline std::vector<int> dfs_skeleton(const HierTree& tree, const Table& t) {
  CellRole role = detail::header_role(tree.axis());
  std::vector<int> out;
  for (int node : tree.dfs_order())
    if (t.cell(node).role == role) out.push_back(node);
  return out;
}

// Ancestor texts of a data cell in the primary tree, outermost first.
inline std::vector<std::string> premise_lineage(int d, const HierTree& primary, const Table& t) {
  if (t.cell(d).role != CellRole::Data) throw NotAData(d);
  std::vector<std::string> texts;
  for (int anc : primary.ancestors(d)) texts.push_back(t.cell(anc).text);
  return texts;
}

// Bounding rectangle of the subtree rooted at the data cell's primary-tree
// parent; the boundary used for attribute truncation. Root-anchored data
// gets the whole grid.
inline Region lineage_boundary(int d, const HierTree& primary, const Table& t) {
  int parent = primary.parent_of(d);
  if (parent == HierTree::kRoot) return {0, t.n_rows() - 1, 0, t.n_cols() - 1};
  Region r{t.n_rows(), -1, t.n_cols(), -1};
  std::vector<int> stack{parent};
  while (!stack.empty()) {
    int node = stack.back();
    stack.pop_back();
    const Cell& c = t.cell(node);
    r.row_start = std::min(r.row_start, c.row_start);
    r.row_end = std::max(r.row_end, c.row_end);
    r.col_start = std::min(r.col_start, c.col_start);
    r.col_end = std::max(r.col_end, c.col_end);
    for (int child : primary.children_of(node)) stack.push_back(child);
  }
  return r;
}

// Ancestor texts from the orthogonal tree with boundary truncation: walking
// outward from the immediate parent, the first ancestor whose span (along
// the orthogonal tree's axis) leaves the boundary is dropped together with
// everything above it. The result is always a suffix of the full chain.
inline std::vector<std::string> attribute_lineage(int d, const HierTree& orthogonal,
                                                  const Region& bound, const Table& t) {
  if (t.cell(d).role != CellRole::Data) throw NotAData(d);
  std::vector<int> chain = orthogonal.ancestors(d);  // outermost first
  std::size_t keep_from = 0;
  for (std::size_t i = chain.size(); i-- > 0;) {
    const Cell& a = t.cell(chain[i]);
    bool inside = orthogonal.axis() == Axis::Column
                      ? (a.col_start <= bound.col_end && bound.col_start <= a.col_end)
                      : (a.row_start <= bound.row_end && bound.row_start <= a.row_end);
    if (!inside) {
      keep_from = i + 1;
      break;
    }
  }
  std::vector<std::string> texts;
  for (std::size_t i = keep_from; i < chain.size(); ++i) texts.push_back(t.cell(chain[i]).text);
  return texts;
}

namespace detail {

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace detail

// "premise | attribute => value" with " > " joining path steps. Empty path
// segments are elided together with their separator.
inline std::string render_statement(const LineageRecord& rec, const Table& t) {
  std::string premise = detail::join(rec.premise_path, " > ");
  std::string attribute = detail::join(rec.attribute_path, " > ");
  std::string head;
  if (!premise.empty() && !attribute.empty())
    head = premise + " | " + attribute;
  else
    head = premise + attribute;
  if (!head.empty()) head += " ";
  return head + "=> " + t.cell(rec.data_cell).text;
}

inline LineageRecord associate(int d, const HierTree& primary, const HierTree& orthogonal,
                               const Table& t) {
  if (t.cell(d).role != CellRole::Data) throw NotAData(d);
  if (!primary.contains(d) || !orthogonal.contains(d)) throw MissingInTree(d);
  LineageRecord rec;
  rec.data_cell = d;
  rec.premise_path = premise_lineage(d, primary, t);
  rec.attribute_path = attribute_lineage(d, orthogonal, lineage_boundary(d, primary, t), t);
  return rec;
}

inline std::vector<LineageRecord> lineage_records(const Table& t, const HierTree& primary,
                                                  const HierTree& orthogonal) {
  std::vector<LineageRecord> records;
  for (int node : primary.dfs_order())
    if (t.cell(node).role == CellRole::Data)
      records.push_back(associate(node, primary, orthogonal, t));
  return records;
}

// Interweaves the primary header skeleton with one associated statement per
// data cell, in primary-tree DFS order.
inline Representation reconstruct(const Table& t, const HierTree& t_col, const HierTree& t_row,
                                  Axis primary_axis) {
  const HierTree& primary = primary_axis == Axis::Column ? t_col : t_row;
  const HierTree& orthogonal = primary_axis == Axis::Column ? t_row : t_col;
  CellRole header_role = detail::header_role(primary_axis);
  Representation rep;
  rep.primary_axis = primary_axis;
  for (int node : primary.dfs_order()) {
    const Cell& c = t.cell(node);
    if (c.role == header_role) {
      int depth = static_cast<int>(primary.ancestors(node).size()) + 1;
      rep.items.push_back({RepresentationItem::Kind::Header, c.text, node, depth});
    } else if (c.role == CellRole::Data) {
      LineageRecord rec = associate(node, primary, orthogonal, t);
      rep.items.push_back({RepresentationItem::Kind::DataStatement, render_statement(rec, t),
                           node, 0});
    }
  }
  return rep;
}

inline std::string representation_to_json(const Representation& rep) {
  nlohmann::ordered_json j;
  j["primary_axis"] = to_string(rep.primary_axis);
  j["items"] = nlohmann::ordered_json::array();
  for (const RepresentationItem& item : rep.items) {
    nlohmann::ordered_json ij;
    ij["kind"] = item.kind == RepresentationItem::Kind::Header ? "header" : "data_statement";
    ij["text"] = item.text;
    ij["cell_id"] = item.cell_id;
    j["items"].push_back(std::move(ij));
  }
  return j.dump(2) + "\n";
}

inline Representation representation_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedInput(e.what());
  }
  Representation rep;
  rep.primary_axis = j.at("primary_axis").get<std::string>() == "row" ? Axis::Row : Axis::Column;
  for (const auto& ij : j.at("items")) {
    RepresentationItem item;
    item.kind = ij.at("kind").get<std::string>() == "header" ? RepresentationItem::Kind::Header
                                                             : RepresentationItem::Kind::DataStatement;
    item.text = ij.at("text").get<std::string>();
    item.cell_id = ij.at("cell_id").get<int>();
    item.depth = ij.value("depth", item.kind == RepresentationItem::Kind::Header ? 1 : 0);
    rep.items.push_back(std::move(item));
  }
  return rep;
}

// One item per line; headers carry a '#' per tree level.
inline std::string representation_to_text(const Representation& rep) {
  std::string out;
  for (const RepresentationItem& item : rep.items) {
    if (item.kind == RepresentationItem::Kind::Header)
      out += std::string(static_cast<std::size_t>(item.depth), '#') + " " + item.text + "\n";
    else
      out += item.text + "\n";
  }
  return out;
}

}  // namespace ohd
