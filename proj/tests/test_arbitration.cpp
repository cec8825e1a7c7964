#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ohd/arbitration.hpp"
#include "ohd/induction.hpp"
#include "test_util.hpp"

using namespace ohd;

namespace {

HeuristicPredicate always;

std::pair<Representation, Representation> both_views(const Table& t) {
  HierTree col = induce_tree(t, Axis::Column, always);
  HierTree row = induce_tree(t, Axis::Row, always);
  return {reconstruct(t, col, row, Axis::Column), reconstruct(t, col, row, Axis::Row)};
}

}  // namespace

TEST_CASE("arbitration prompt embeds both views verbatim and is deterministic") {
  Table t = test_util::load_fixture("halves.table.json");
  auto [r_col, r_row] = both_views(t);
  std::string prompt = build_arbitration_prompt(r_col, r_row);
  CHECK(prompt == build_arbitration_prompt(r_col, r_row));
  CHECK(prompt.find(representation_to_text(r_col)) != std::string::npos);
  CHECK(prompt.find(representation_to_text(r_row)) != std::string::npos);
  CHECK(prompt.find("Logical Cohesion") != std::string::npos);
  CHECK(prompt.find("Information Completeness") != std::string::npos);
  CHECK(prompt.find("Syntactic Readability") != std::string::npos);
}

TEST_CASE("empty representations are rejected") {
  Table t = test_util::load_fixture("halves.table.json");
  auto [r_col, r_row] = both_views(t);
  Representation empty;
  CHECK_THROWS_AS(build_arbitration_prompt(empty, r_row), EmptyRepresentation);
  CHECK_THROWS_AS(build_arbitration_prompt(r_col, empty), EmptyRepresentation);
  CHECK_THROWS_AS(build_arbitration_prompt("", "x"), EmptyRepresentation);
}

TEST_CASE("offline merge labels and concatenates the two views") {
  Table t = test_util::load_fixture("halves.table.json");
  auto [r_col, r_row] = both_views(t);
  std::string merged = offline_merge(r_col, r_row);
  CHECK(merged.rfind("== column-major view ==\n", 0) == 0);
  CHECK(merged.find("== row-major view ==\n") != std::string::npos);
  CHECK(merged == offline_merge(r_col, r_row));
  // every data value from the table survives the merge
  for (const Cell& c : t.cells())
    if (c.role == CellRole::Data)
      CHECK(merged.find("=> " + c.text) != std::string::npos);
}

TEST_CASE("audit log appends one JSON line per round trip") {
  auto path = (std::filesystem::temp_directory_path() / "ohd_audit_test.jsonl").string();
  std::remove(path.c_str());
  {
    AuditLog log(path);
    log.record("t1", "prompt one", "response one", 12);
    log.record("t2", "multi\nline", "r", 7);
  }
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  auto j = nlohmann::json::parse(line);
  CHECK(j["table_id"] == "t1");
  CHECK(j["prompt"] == "prompt one");
  CHECK(j["latency_ms"] == 12);
  REQUIRE(std::getline(in, line));
  j = nlohmann::json::parse(line);
  CHECK(j["prompt"] == "multi\nline");
  CHECK_FALSE(std::getline(in, line));
  std::remove(path.c_str());
}

TEST_CASE("arbitrate surfaces transport failure as ArbitrationUnavailable") {
  Table t = test_util::load_fixture("conflict.table.json");
  auto [r_col, r_row] = both_views(t);
  ArbitrationRequest req;
  req.r_col = r_col;
  req.r_row = r_row;
  req.endpoint.url = "http://127.0.0.1:9/v1/chat/completions";  // discard port
  req.endpoint.max_retries = 0;
  req.endpoint.backoff_base_seconds = 0.0;
  req.endpoint.timeout_seconds = 1;
  CHECK_THROWS_AS(arbitrate(req), ArbitrationUnavailable);
}
