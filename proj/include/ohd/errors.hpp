#pragma once

#include <stdexcept>
#include <string>

namespace ohd {

// Base for all library errors; subcommands map these to exit codes.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct MalformedInput : Error {
  explicit MalformedInput(const std::string& msg) : Error("malformed input: " + msg) {}
};

struct OverlappingCells : Error {
  int first_id;
  int second_id;
  OverlappingCells(int a, int b)
      : Error("overlapping cells: id " + std::to_string(a) + " and id " + std::to_string(b)),
        first_id(a),
        second_id(b) {}
};

struct OutOfBounds : Error {
  int cell_id;
  explicit OutOfBounds(int id)
      : Error("cell id " + std::to_string(id) + " lies outside the table grid"), cell_id(id) {}
};

struct MissingRole : Error {
  explicit MissingRole(const std::string& where) : Error("cell without data-role: " + where) {}
};

struct NoDataCells : Error {
  NoDataCells() : Error("table contains no data cells") {}
};

struct PredicateUnavailable : Error {
  explicit PredicateUnavailable(const std::string& msg)
      : Error("semantic predicate unavailable: " + msg) {}
};

struct MalformedVerdict : Error {
  explicit MalformedVerdict(const std::string& raw)
      : Error("response contains neither 0 nor 1: \"" + raw + "\"") {}
};

struct CacheCorrupt : Error {
  long line;
  CacheCorrupt(long line_number, const std::string& msg)
      : Error("predicate cache corrupt at line " + std::to_string(line_number) + ": " + msg),
        line(line_number) {}
};

struct NotAData : Error {
  explicit NotAData(int id) : Error("cell id " + std::to_string(id) + " is not a data cell"), cell_id(id) {}
  int cell_id;
};

struct MissingInTree : Error {
  explicit MissingInTree(int id)
      : Error("cell id " + std::to_string(id) + " is absent from the tree"), cell_id(id) {}
  int cell_id;
};

struct EmptyRepresentation : Error {
  EmptyRepresentation() : Error("representation is empty") {}
};

struct ArbitrationUnavailable : Error {
  explicit ArbitrationUnavailable(const std::string& msg)
      : Error("arbitration endpoint unavailable: " + msg) {}
};

struct JudgeUnavailable : Error {
  explicit JudgeUnavailable(const std::string& judge)
      : Error("judge unavailable: " + judge) {}
};

struct SpecInfeasible : Error {
  explicit SpecInfeasible(const std::string& msg) : Error("generator spec infeasible: " + msg) {}
};

}  // namespace ohd
