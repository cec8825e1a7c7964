#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ohd/errors.hpp"
#include "ohd/predicate.hpp"

namespace ohd {

struct EndpointConfig {
  std::string url;          // e.g. http://host:port/v1/chat/completions
  std::string model;
  std::string api_key;      // from OHD_API_KEY
  int timeout_seconds = 30;
  int max_retries = 3;
  double backoff_base_seconds = 1.0;
};

// Global in-flight cap shared by predicate, arbitration and judge calls.
class RequestLimiter {
 public:
  explicit RequestLimiter(int max_in_flight = 4) : sem_(max_in_flight) {}

  struct Permit {
    explicit Permit(std::counting_semaphore<64>& s) : sem(s) { sem.acquire(); }
    ~Permit() { sem.release(); }
    std::counting_semaphore<64>& sem;
  };

  Permit acquire() { return Permit(sem_); }

  static RequestLimiter& shared() {
    static RequestLimiter limiter;
    return limiter;
  }

 private:
  std::counting_semaphore<64> sem_;
};

namespace detail {

inline std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("endpoint URL must include a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace detail

// One chat-style completion. Retries with exponential backoff; throws
// ohd::Error on exhaustion with the last failure reason.
inline std::string chat_completion(const EndpointConfig& cfg, const std::string& prompt,
                                   RequestLimiter& limiter = RequestLimiter::shared()) {
  auto [base, path] = detail::split_url(cfg.url);
  std::string last_error;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      auto delay = cfg.backoff_base_seconds * (1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    auto permit = limiter.acquire();
    httplib::Client client(base);
    client.set_connection_timeout(cfg.timeout_seconds);
    client.set_read_timeout(cfg.timeout_seconds);
    httplib::Headers headers;
    if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
    nlohmann::json body = {
        {"model", cfg.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", 0},
    };
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("bad response body: ") + e.what();
    }
  }
  throw Error("remote call failed after " + std::to_string(cfg.max_retries + 1) +
              " attempts: " + last_error);
}

namespace detail {

// Strict 1/0 extraction: the trimmed response must contain exactly one of
// the two digits to be accepted.
inline bool parse_binary_verdict(const std::string& raw) {
  bool saw_one = raw.find('1') != std::string::npos;
  bool saw_zero = raw.find('0') != std::string::npos;
  if (saw_one == saw_zero) throw MalformedVerdict(raw);
  return saw_one;
}

}  // namespace detail

inline std::string subsumption_prompt(const std::string& parent_text,
                                      const std::string& child_text,
                                      const PredicateContext& ctx) {
  std::string axis_word = ctx.axis == Axis::Column ? "column" : "row";
  std::string prompt =
      "You are analyzing the " + axis_word + " header hierarchy of a table";
  if (!ctx.table_title.empty()) prompt += " titled \"" + ctx.table_title + "\"";
  prompt +=
      ".\nHeader A: \"" + parent_text + "\"\nHeader B: \"" + child_text +
      "\"\nDoes header B denote a sub-category of header A, or a specific attribute "
      "belonging to header A? Answer 1 for yes, 0 for no. Only output the digit.";
  return prompt;
}

// P_semantic backed by a chat endpoint. Wrap in CachedPredicate for
// determinism within a run.
class RemotePredicate : public SemanticPredicate {
 public:
  explicit RemotePredicate(EndpointConfig cfg, RequestLimiter& limiter = RequestLimiter::shared())
      : cfg_(std::move(cfg)), limiter_(limiter) {}

  bool judge(const std::string& parent_text, const std::string& child_text,
             const PredicateContext& ctx) override {
    std::string raw;
    try {
      raw = chat_completion(cfg_, subsumption_prompt(parent_text, child_text, ctx), limiter_);
    } catch (const Error& e) {
      throw PredicateUnavailable(e.what());
    }
    return detail::parse_binary_verdict(raw);
  }

 private:
  EndpointConfig cfg_;
  RequestLimiter& limiter_;
};

}  // namespace ohd
