#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "ohd/induction.hpp"
#include "ohd/lineage.hpp"
#include "test_util.hpp"

using namespace ohd;

namespace {

HeuristicPredicate always;

struct Induced {
  Table t;
  HierTree col;
  HierTree row;
};

Induced induce_fixture(const std::string& name) {
  Table t = test_util::load_fixture(name);
  HierTree col = induce_tree(t, Axis::Column, always);
  HierTree row = induce_tree(t, Axis::Row, always);
  return {std::move(t), std::move(col), std::move(row)};
}

}  // namespace

TEST_CASE("dfs skeleton lists only primary headers, pre-order") {
  auto [t, col, row] = induce_fixture("regions.table.json");
  CHECK(dfs_skeleton(row, t) == std::vector<int>{3, 6, 7, 10, 13, 16, 19, 20, 23});
  CHECK(dfs_skeleton(col, t) == std::vector<int>{0, 1, 2});
}

TEST_CASE("premise lineage is root-to-parent over the primary tree") {
  auto [t, col, row] = induce_fixture("halves.table.json");
  CHECK(premise_lineage(5, row, t) ==
        std::vector<std::string>{"details in 2007", "first half"});
  CHECK(premise_lineage(2, row, t) == std::vector<std::string>{"2016"});
  CHECK_THROWS_AS(premise_lineage(1, row, t), NotAData);
}

TEST_CASE("lineage boundary is the parent subtree's bounding rectangle") {
  auto [t, col, row] = induce_fixture("halves.table.json");
  Region b = lineage_boundary(5, row, t);  // parent: "first half"
  CHECK(b.row_start == 2);
  CHECK(b.row_end == 2);
  CHECK(b.col_start == 1);
  CHECK(b.col_end == 2);
  Region outer = lineage_boundary(5, col, t);  // parent: "percentage" subtree
  CHECK(outer.row_start == 0);
  CHECK(outer.row_end == 3);
  CHECK(outer.col_start == 2);
  CHECK(outer.col_end == 2);
}

TEST_CASE("root-anchored data gets the whole grid as boundary") {
  Table t(2, 2, {Cell{0, "h", 0, 0, 0, 0, CellRole::ColumnHeader},
                 Cell{1, "u", 1, 1, 1, 1, CellRole::Data},
                 Cell{2, "v", 1, 1, 0, 0, CellRole::Data}});
  HierTree col = induce_tree(t, Axis::Column, always);
  Region b = lineage_boundary(1, col, t);
  CHECK(b.row_start == 0);
  CHECK(b.row_end == 1);
  CHECK(b.col_start == 0);
  CHECK(b.col_end == 1);
}

TEST_CASE("attribute lineage keeps the full chain inside the boundary") {
  auto [t, col, row] = induce_fixture("halves.table.json");
  Region b = lineage_boundary(5, row, t);
  CHECK(attribute_lineage(5, col, b, t) == std::vector<std::string>{"percentage"});
}

TEST_CASE("truncation drops everything above the first out-of-bounds ancestor") {
  // two nested column headers over one data cell
  Table t(3, 4, {Cell{0, "A", 0, 0, 0, 3, CellRole::ColumnHeader},
                 Cell{1, "B", 1, 1, 2, 3, CellRole::ColumnHeader},
                 Cell{2, "v", 2, 2, 2, 2, CellRole::Data}});
  HierTree col = induce_tree(t, Axis::Column, always);
  REQUIRE(col.ancestors(2) == std::vector<int>{0, 1});

  Region inside{0, 2, 2, 3};
  CHECK(attribute_lineage(2, col, inside, t) == std::vector<std::string>{"A", "B"});

  // a boundary missing B's columns also severs A, even though A intersects:
  // the result is always a suffix of the chain
  Region left_only{0, 2, 0, 1};
  CHECK(attribute_lineage(2, col, left_only, t).empty());

  Region nowhere{0, 2, 10, 11};
  CHECK(attribute_lineage(2, col, nowhere, t).empty());
}

TEST_CASE("pipeline boundaries never truncate") {
  for (const char* name : {"conflict.table.json", "regions.table.json", "halves.table.json"}) {
    auto [t, col, row] = induce_fixture(name);
    for (const Cell& c : t.cells()) {
      if (c.role != CellRole::Data) continue;
      Region b = lineage_boundary(c.id, row, t);
      Region whole{0, t.n_rows() - 1, 0, t.n_cols() - 1};
      CHECK(attribute_lineage(c.id, col, b, t) == attribute_lineage(c.id, col, whole, t));
    }
  }
}

TEST_CASE("statement rendering and elision") {
  Table t = test_util::load_fixture("conflict.table.json");
  LineageRecord rec{5, {"Details in 2016"}, {"percentage"}};
  CHECK(render_statement(rec, t) == "Details in 2016 | percentage => growth");
  CHECK(render_statement({5, {"Details in 2016"}, {}}, t) == "Details in 2016 => growth");
  CHECK(render_statement({5, {}, {"percentage"}}, t) == "percentage => growth");
  CHECK(render_statement({5, {}, {}}, t) == "=> growth");
  CHECK(render_statement({5, {"A", "B"}, {"C", "D"}}, t) == "A > B | C > D => growth");
}

TEST_CASE("associate joins both pathways for a data cell") {
  auto [t, col, row] = induce_fixture("halves.table.json");
  LineageRecord rec = associate(5, row, col, t);
  CHECK(rec.premise_path == std::vector<std::string>{"details in 2007", "first half"});
  CHECK(rec.attribute_path == std::vector<std::string>{"percentage"});
  CHECK(render_statement(rec, t) == "details in 2007 > first half | percentage => 55");
  // the inner record must not inherit the sibling premise "2016"
  for (const std::string& s : rec.premise_path) CHECK(s != "2016");
  CHECK_THROWS_AS(associate(0, row, col, t), NotAData);
}

TEST_CASE("lineage records cover every data cell exactly once") {
  auto [t, col, row] = induce_fixture("regions.table.json");
  auto records = lineage_records(t, row, col);
  std::vector<int> seen;
  for (const auto& r : records) seen.push_back(r.data_cell);
  std::sort(seen.begin(), seen.end());
  std::vector<int> expected;
  for (const Cell& c : t.cells())
    if (c.role == CellRole::Data) expected.push_back(c.id);
  CHECK(seen == expected);
}

TEST_CASE("reconstruction interleaves headers and statements in DFS order") {
  auto [t, col, row] = induce_fixture("halves.table.json");
  Representation rep = reconstruct(t, col, row, Axis::Row);
  REQUIRE(rep.items.size() == 7);
  CHECK(rep.items[0].text == "2016");
  CHECK(rep.items[0].depth == 1);
  CHECK(rep.items[1].text == "2016 | percentage => 67");
  CHECK(rep.items[2].text == "details in 2007");
  CHECK(rep.items[3].text == "first half");
  CHECK(rep.items[3].depth == 2);
  CHECK(rep.items[4].text == "details in 2007 > first half | percentage => 55");
  CHECK(rep.items[5].text == "second half");
  CHECK(rep.items[6].text == "details in 2007 > second half | percentage => 60");
}

TEST_CASE("representation completeness against the source table") {
  auto [t, col, row] = induce_fixture("regions.table.json");
  for (Axis axis : {Axis::Column, Axis::Row}) {
    Representation rep = reconstruct(t, col, row, axis);
    CellRole role = axis == Axis::Column ? CellRole::ColumnHeader : CellRole::RowHeader;
    std::vector<int> header_ids, data_ids;
    for (const auto& item : rep.items)
      (item.kind == RepresentationItem::Kind::Header ? header_ids : data_ids)
          .push_back(item.cell_id);
    std::sort(header_ids.begin(), header_ids.end());
    std::sort(data_ids.begin(), data_ids.end());
    std::vector<int> want_headers, want_data;
    for (const Cell& c : t.cells()) {
      if (c.role == role) want_headers.push_back(c.id);
      if (c.role == CellRole::Data) want_data.push_back(c.id);
    }
    CHECK(header_ids == want_headers);
    CHECK(data_ids == want_data);
  }
}

TEST_CASE("cell input order does not change the reconstruction") {
  Table t = test_util::load_fixture("halves.table.json");
  std::vector<Cell> shuffled(t.cells().rbegin(), t.cells().rend());
  Table t2(t.n_rows(), t.n_cols(), shuffled);
  auto rep = [](const Table& table) {
    HierTree col = induce_tree(table, Axis::Column, always);
    HierTree row = induce_tree(table, Axis::Row, always);
    return representation_to_text(reconstruct(table, col, row, Axis::Row));
  };
  CHECK(rep(t) == rep(t2));
}

TEST_CASE("representation text and JSON serializations") {
  auto [t, col, row] = induce_fixture("halves.table.json");
  Representation rep = reconstruct(t, col, row, Axis::Row);
  std::string text = representation_to_text(rep);
  CHECK(text.find("# 2016\n") != std::string::npos);
  CHECK(text.find("## first half\n") != std::string::npos);
  CHECK(text.find("details in 2007 > first half | percentage => 55\n") != std::string::npos);

  Representation back = representation_from_json(representation_to_json(rep));
  REQUIRE(back.items.size() == rep.items.size());
  CHECK(back.primary_axis == rep.primary_axis);
  for (std::size_t i = 0; i < rep.items.size(); ++i) {
    CHECK(back.items[i].kind == rep.items[i].kind);
    CHECK(back.items[i].text == rep.items[i].text);
    CHECK(back.items[i].cell_id == rep.items[i].cell_id);
  }
}
