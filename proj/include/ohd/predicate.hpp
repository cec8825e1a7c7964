#pragma once

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ohd/errors.hpp"
#include "ohd/table.hpp"

namespace ohd {

struct PredicateContext {
  Axis axis = Axis::Column;
  std::string table_title;
};

// Logical-subsumption judgment between two header texts: does `child`
// denote a sub-category or attribute of `parent`?
class SemanticPredicate {
 public:
  virtual ~SemanticPredicate() = default;
  virtual bool judge(const std::string& parent_text, const std::string& child_text,
                     const PredicateContext& ctx) = 0;
};

namespace detail {

inline bool parses_as_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  while (end && *end == ' ') ++end;
  return end && *end == '\0';
}

}  // namespace detail

// Deterministic rule cascade. With empty allow/deny lists this reduces to
// the pure-spatial configuration (always true unless both texts are numbers).
class HeuristicPredicate : public SemanticPredicate {
 public:
  using TextPair = std::pair<std::string, std::string>;

  HeuristicPredicate() = default;
  HeuristicPredicate(std::set<TextPair> allow, std::set<TextPair> deny)
      : allow_(std::move(allow)), deny_(std::move(deny)) {}

  void allow(const std::string& parent, const std::string& child) {
    allow_.insert({parent, child});
  }
  void deny(const std::string& parent, const std::string& child) {
    deny_.insert({parent, child});
  }

  bool judge(const std::string& parent_text, const std::string& child_text,
             const PredicateContext&) override {
    if (parent_text.empty() || child_text.empty()) return true;
    if (detail::parses_as_number(parent_text) && detail::parses_as_number(child_text))
      return false;
    if (deny_.count({parent_text, child_text})) return false;
    if (allow_.count({parent_text, child_text})) return true;
    return true;
  }

 private:
  std::set<TextPair> allow_;
  std::set<TextPair> deny_;
};

// Callable wrapper, handy for oracle predicates in tests and the generator.
class FunctionPredicate : public SemanticPredicate {
 public:
  using Fn = std::function<bool(const std::string&, const std::string&, const PredicateContext&)>;
  explicit FunctionPredicate(Fn fn) : fn_(std::move(fn)) {}
  bool judge(const std::string& p, const std::string& c, const PredicateContext& ctx) override {
    return fn_(p, c, ctx);
  }

 private:
  Fn fn_;
};

namespace detail {

inline std::string escape_cache_field(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '\\') out += "\\\\";
    else if (ch == '\t') out += "\\t";
    else if (ch == '\n') out += "\\n";
    else out += ch;
  }
  return out;
}

inline std::string unescape_cache_field(const std::string& s, long line) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (i + 1 >= s.size()) throw CacheCorrupt(line, "dangling escape");
    char next = s[++i];
    if (next == 't') out += '\t';
    else if (next == 'n') out += '\n';
    else if (next == '\\') out += '\\';
    else throw CacheCorrupt(line, std::string("unknown escape \\") + next);
  }
  return out;
}

}  // namespace detail

// Memoizing decorator keyed on (axis, parent_text, child_text). Cached pairs
// are never re-queried, which makes recorded runs replayable offline.
// Concurrent reads, serialized writes.
class CachedPredicate : public SemanticPredicate {
 public:
  using Key = std::tuple<Axis, std::string, std::string>;

  explicit CachedPredicate(std::shared_ptr<SemanticPredicate> inner) : inner_(std::move(inner)) {}

  bool judge(const std::string& parent_text, const std::string& child_text,
             const PredicateContext& ctx) override {
    Key key{ctx.axis, parent_text, child_text};
    {
      std::shared_lock lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    if (!inner_) throw PredicateUnavailable("cache miss and no inner predicate configured");
    bool verdict = inner_->judge(parent_text, child_text, ctx);
    std::unique_lock lock(mutex_);
    cache_.emplace(key, verdict);
    return verdict;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
  }

  // One record per line: axis<TAB>parent<TAB>child<TAB>0|1 with TAB and
  // newline escaped.
  void save(const std::string& path) const {
    std::shared_lock lock(mutex_);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write cache file " + path);
    for (const auto& [key, verdict] : cache_) {
      const auto& [axis, parent, child] = key;
      out << to_string(axis) << '\t' << detail::escape_cache_field(parent) << '\t'
          << detail::escape_cache_field(child) << '\t' << (verdict ? '1' : '0') << '\n';
    }
  }

  void load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read cache file " + path);
    std::string line;
    long line_no = 0;
    std::unique_lock lock(mutex_);
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::vector<std::string> fields;
      std::string field;
      for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || (line[i] == '\t' && fields.size() < 3)) {
          fields.push_back(field);
          field.clear();
        } else {
          field += line[i];
        }
      }
      if (fields.size() != 4) throw CacheCorrupt(line_no, "expected 4 tab-separated fields");
      Axis axis;
      if (fields[0] == "column") axis = Axis::Column;
      else if (fields[0] == "row") axis = Axis::Row;
      else throw CacheCorrupt(line_no, "unknown axis \"" + fields[0] + "\"");
      bool verdict;
      if (fields[3] == "1") verdict = true;
      else if (fields[3] == "0") verdict = false;
      else throw CacheCorrupt(line_no, "verdict must be 0 or 1");
      cache_[{axis, detail::unescape_cache_field(fields[1], line_no),
              detail::unescape_cache_field(fields[2], line_no)}] = verdict;
    }
  }

 private:
  std::shared_ptr<SemanticPredicate> inner_;
  mutable std::shared_mutex mutex_;
  std::map<Key, bool> cache_;
};

// Counts delegated calls; used to assert cache hit behaviour.
class CountingPredicate : public SemanticPredicate {
 public:
  explicit CountingPredicate(std::shared_ptr<SemanticPredicate> inner) : inner_(std::move(inner)) {}
  bool judge(const std::string& p, const std::string& c, const PredicateContext& ctx) override {
    ++calls_;
    return inner_->judge(p, c, ctx);
  }
  long calls() const { return calls_.load(); }

 private:
  std::shared_ptr<SemanticPredicate> inner_;
  std::atomic<long> calls_{0};
};

}  // namespace ohd
