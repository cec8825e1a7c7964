#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "ohd/generator.hpp"
#include "ohd/induction.hpp"
#include "ohd/predicate.hpp"
#include "test_util.hpp"

using namespace ohd;

namespace {
const PredicateContext kCol{Axis::Column, ""};

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path((std::filesystem::temp_directory_path() / name).string()) {}
  ~TempFile() { std::remove(path.c_str()); }
};
}  // namespace

TEST_CASE("heuristic rule cascade") {
  HeuristicPredicate pred;
  CHECK(pred.judge("", "Harbin", kCol));
  CHECK(pred.judge("Harbin", "", kCol));
  CHECK_FALSE(pred.judge("1996", "2007", kCol));
  CHECK(pred.judge("Region", "Harbin", kCol));  // default true

  pred.deny("Year", "details in 2007");
  CHECK_FALSE(pred.judge("Year", "details in 2007", kCol));
}

TEST_CASE("heuristic is pure") {
  HeuristicPredicate pred;
  pred.deny("a", "b");
  for (int i = 0; i < 3; ++i) {
    CHECK_FALSE(pred.judge("a", "b", kCol));
    CHECK(pred.judge("b", "a", kCol));
  }
}

TEST_CASE("cache serves repeats without consulting the inner predicate") {
  auto counting = std::make_shared<CountingPredicate>(std::make_shared<HeuristicPredicate>());
  CachedPredicate cached(counting);
  CHECK(cached.judge("p", "c", kCol));
  CHECK(cached.judge("p", "c", kCol));
  CHECK(cached.judge("p", "c", kCol));
  CHECK(counting->calls() == 1);
  // different axis is a different key
  CHECK(cached.judge("p", "c", PredicateContext{Axis::Row, ""}));
  CHECK(counting->calls() == 2);
}

TEST_CASE("cache file round trip with escaping") {
  TempFile tmp("ohd_cache_test.tsv");
  {
    CachedPredicate cached(std::make_shared<HeuristicPredicate>());
    cached.judge("has\ttab", "has\nnewline", kCol);
    cached.judge("plain", "pair", PredicateContext{Axis::Row, ""});
    cached.save(tmp.path);
  }
  CachedPredicate replay(nullptr);
  replay.load(tmp.path);
  CHECK(replay.size() == 2);
  CHECK(replay.judge("has\ttab", "has\nnewline", kCol));
  // a miss with no inner predicate is an error
  CHECK_THROWS_AS(replay.judge("never", "seen", kCol), PredicateUnavailable);
}

TEST_CASE("corrupt cache line is reported with its line number") {
  TempFile tmp("ohd_cache_corrupt.tsv");
  {
    std::ofstream out(tmp.path);
    out << "column\ta\tb\t1\n";
    out << "column\tbroken line\n";
  }
  CachedPredicate cached(nullptr);
  try {
    cached.load(tmp.path);
    FAIL("expected CacheCorrupt");
  } catch (const CacheCorrupt& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("record-replay: cached run reproduces trees byte for byte offline") {
  GenSpec spec;
  spec.seed = 42;
  spec.conflict_headers = true;
  spec.merged_data = true;
  GeneratedTable gen = generate(spec);

  TempFile tmp("ohd_cache_replay.tsv");
  std::string col_json, row_json;
  {
    auto recorder = std::make_shared<CachedPredicate>(gen.truth_pred);
    col_json = induce_tree(gen.table, Axis::Column, *recorder).to_json();
    row_json = induce_tree(gen.table, Axis::Row, *recorder).to_json();
    recorder->save(tmp.path);
  }
  CachedPredicate replay(nullptr);  // offline: any miss would throw
  replay.load(tmp.path);
  CHECK(induce_tree(gen.table, Axis::Column, replay).to_json() == col_json);
  CHECK(induce_tree(gen.table, Axis::Row, replay).to_json() == row_json);
}
