#pragma once

#include <chrono>
#include <fstream>
#include <mutex>
#include <string>

#include <json.hpp>

#include "ohd/errors.hpp"
#include "ohd/lineage.hpp"
#include "ohd/llm_client.hpp"

namespace ohd {

// Versioned merge-instruction template. The two serialized views are
// embedded verbatim.
inline std::string build_arbitration_prompt(const std::string& r_col_text,
                                            const std::string& r_row_text) {
  if (r_col_text.empty() || r_row_text.empty()) throw EmptyRepresentation();
  std::string prompt =
      "You are given two serialized views of the same table: a column-major view and a "
      "row-major view. Merge them into a single textual representation of the table, "
      "optimizing for three criteria: Logical Cohesion (the hierarchical nesting of "
      "attributes is accurately reflected without fragmentation), Information Completeness "
      "(every data anchor from both views is integrated), and Syntactic Readability "
      "(structural fragments flow as coherent text). Favor conciseness and logical "
      "clarity. Output only the merged representation.\n"
      "\n"
      "Column-major view:\n" +
      r_col_text +
      "\n"
      "Row-major view:\n" +
      r_row_text;
  return prompt;
}

inline std::string build_arbitration_prompt(const Representation& r_col,
                                            const Representation& r_row) {
  if (r_col.items.empty() || r_row.items.empty()) throw EmptyRepresentation();
  return build_arbitration_prompt(representation_to_text(r_col), representation_to_text(r_row));
}

// Deterministic offline stand-in: labeled concatenation of both views.
inline std::string offline_merge(const std::string& r_col_text, const std::string& r_row_text) {
  return "== column-major view ==\n" + r_col_text + "== row-major view ==\n" + r_row_text;
}

inline std::string offline_merge(const Representation& r_col, const Representation& r_row) {
  return offline_merge(representation_to_text(r_col), representation_to_text(r_row));
}

// Line-delimited JSON audit trail of every arbitration round trip.
class AuditLog {
 public:
  explicit AuditLog(std::string path) : path_(std::move(path)) {}

  void record(const std::string& table_id, const std::string& prompt,
              const std::string& response, long latency_ms) {
    nlohmann::ordered_json j;
    j["table_id"] = table_id;
    j["prompt"] = prompt;
    j["response"] = response;
    j["latency_ms"] = latency_ms;
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    out << j.dump() << "\n";
  }

 private:
  std::string path_;
  std::mutex mutex_;
};

struct ArbitrationRequest {
  Representation r_col;
  Representation r_row;
  EndpointConfig endpoint;
  std::string table_id;
};

inline std::string arbitrate(const ArbitrationRequest& req, AuditLog* audit = nullptr,
                             RequestLimiter& limiter = RequestLimiter::shared()) {
  std::string prompt = build_arbitration_prompt(req.r_col, req.r_row);
  auto start = std::chrono::steady_clock::now();
  std::string response;
  try {
    response = chat_completion(req.endpoint, prompt, limiter);
  } catch (const Error& e) {
    throw ArbitrationUnavailable(e.what());
  }
  auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  if (audit) audit->record(req.table_id, prompt, response, latency);
  return response;
}

}  // namespace ohd
