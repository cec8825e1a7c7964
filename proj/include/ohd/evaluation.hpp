#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ohd/errors.hpp"
#include "ohd/llm_client.hpp"

namespace ohd {

struct QAPair {
  std::string table_id;
  std::string question;
  std::string gold;
  std::string prediction;
};

struct EvalReport {
  double em = 0.0;
  std::map<std::string, double> judge_scores;
  double avg = 0.0;  // mean over present judge columns
  std::size_t n = 0;
};

namespace detail {

// Trim, collapse whitespace runs to one space, ASCII casefold.
inline std::string normalize_answer(const std::string& s) {
  std::string out;
  bool pending_space = false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return out;
}

// Strips commas, currency symbols, and a trailing percent sign, then parses
// a plain signed decimal. Returns the value plus its decimal-place count.
inline std::optional<std::pair<double, int>> parse_decimal(const std::string& raw) {
  static const std::vector<std::string> symbols = {",", "$", "¥", "€"};
  std::string s;
  for (std::size_t i = 0; i < raw.size();) {
    bool skipped = false;
    for (const std::string& sym : symbols) {
      if (raw.compare(i, sym.size(), sym) == 0) {
        i += sym.size();
        skipped = true;
        break;
      }
    }
    if (!skipped) s += raw[i++];
  }
  // trim
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  s = s.substr(b, e - b);
  if (!s.empty() && s.back() == '%') s.pop_back();
  if (s.empty()) return std::nullopt;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') ++i;
  std::size_t digits = 0, decimals = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ++i;
    ++digits;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++decimals;
    }
  }
  if (i != s.size() || digits + decimals == 0) return std::nullopt;
  return std::make_pair(std::stod(s), static_cast<int>(decimals));
}

inline double round_to_places(double v, int places) {
  double scale = std::pow(10.0, places);
  return std::round(v * scale) / scale;
}

}  // namespace detail

// Strict string equality after surface normalization. Numeric tolerance is
// deliberately not applied here.
inline bool exact_match(const std::string& gold, const std::string& prediction) {
  return detail::normalize_answer(gold) == detail::normalize_answer(prediction);
}

// Both sides must parse as numbers after symbol stripping; the value with
// more decimal places is rounded to the other's precision before comparing.
inline bool tolerant_numeric_equal(const std::string& gold, const std::string& prediction) {
  auto g = detail::parse_decimal(gold);
  auto p = detail::parse_decimal(prediction);
  if (!g || !p) return false;
  int places = std::min(g->second, p->second);
  return std::abs(detail::round_to_places(g->first, places) -
                  detail::round_to_places(p->first, places)) < 1e-9;
}

inline std::string judge_prompt(const QAPair& pair) {
  return
      "System Role: You are a professional Table QA evaluation expert. Your task is to "
      "determine whether the model's prediction is correct by comparing the \"Gold Label\" "
      "with the \"Prediction.\"\n"
      "\n"
      "Evaluation Principles:\n"
      "- Semantic Consistency: If the prediction conveys the same meaning as the gold label, "
      "it should be judged as correct (1), regardless of phrasing.\n"
      "- Numerical Tolerance: Ignore formatting differences (e.g., commas, %). If decimal "
      "places differ, round the longer value to match the shorter one for comparison.\n"
      "- Unit Handling: If the question already specifies the unit, its presence in the "
      "prediction does not affect the judgment.\n"
      "- Output: Output 1 for correct, 0 for incorrect. Only output the digit.\n"
      "\n"
      "Input Format:\n"
      "Question: " + pair.question + "\n"
      "Gold Label: " + pair.gold + "\n"
      "Prediction: " + pair.prediction + "\n";
}

// A judge is a name plus a completion backend; tests inject deterministic
// backends, the CLI wires remote endpoints.
struct Judge {
  std::string name;
  std::function<std::string(const std::string& prompt)> complete;
};

inline Judge remote_judge(const std::string& name, EndpointConfig cfg,
                          RequestLimiter& limiter = RequestLimiter::shared()) {
  return Judge{name, [cfg, &limiter](const std::string& prompt) {
                 try {
                   return chat_completion(cfg, prompt, limiter);
                 } catch (const Error& e) {
                   throw JudgeUnavailable(e.what());
                 }
               }};
}

// Scores every pair with every judge. Locally decidable pairs (exact match
// or tolerant numeric equality) score 1 without a remote call; malformed
// verdicts fall back to the local comparator; an unavailable judge drops
// its whole column and the average is taken over the rest.
inline EvalReport llm_eval(const std::vector<QAPair>& pairs, const std::vector<Judge>& judges) {
  if (judges.empty()) throw Error("at least one judge must be configured");
  for (const QAPair& p : pairs)
    if (p.gold.empty()) throw MalformedInput("QA pair with empty gold label");
  EvalReport report;
  report.n = pairs.size();
  std::size_t em_hits = 0;
  for (const QAPair& p : pairs)
    if (exact_match(p.gold, p.prediction)) ++em_hits;
  report.em = pairs.empty() ? 0.0 : static_cast<double>(em_hits) / pairs.size();

  for (const Judge& judge : judges) {
    double hits = 0;
    bool available = true;
    for (const QAPair& p : pairs) {
      bool local = exact_match(p.gold, p.prediction) || tolerant_numeric_equal(p.gold, p.prediction);
      if (local) {
        hits += 1;
        continue;
      }
      try {
        if (detail::parse_binary_verdict(judge.complete(judge_prompt(p)))) hits += 1;
      } catch (const JudgeUnavailable&) {
        available = false;
        break;
      } catch (const MalformedVerdict& e) {
        std::cerr << "judge " << judge.name << ": " << e.what() << "\n";
        // local comparator already said no
      }
    }
    if (available && !pairs.empty()) report.judge_scores[judge.name] = hits / pairs.size();
    if (available && pairs.empty()) report.judge_scores[judge.name] = 0.0;
  }
  double sum = 0;
  for (const auto& [name, score] : report.judge_scores) sum += score;
  report.avg = report.judge_scores.empty() ? 0.0 : sum / report.judge_scores.size();
  return report;
}

// Line-delimited JSON: {table_id, question, gold, prediction}.
inline std::vector<QAPair> load_qa_pairs(std::istream& in) {
  std::vector<QAPair> pairs;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedInput("line " + std::to_string(line_no) + ": " + e.what());
    }
    QAPair p;
    p.table_id = j.value("table_id", "");
    p.question = j.value("question", "");
    p.gold = j.value("gold", "");
    p.prediction = j.value("prediction", "");
    if (p.gold.empty())
      throw MalformedInput("line " + std::to_string(line_no) + ": empty gold label");
    pairs.push_back(std::move(p));
  }
  return pairs;
}

inline std::string report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["em"] = r.em;
  j["judges"] = nlohmann::ordered_json::object();
  for (const auto& [name, score] : r.judge_scores) j["judges"][name] = score;
  j["avg"] = r.avg;
  return j.dump(2) + "\n";
}

inline std::string report_to_text(const EvalReport& r) {
  std::ostringstream out;
  out << "n      " << r.n << "\n";
  out << "EM     " << r.em << "\n";
  for (const auto& [name, score] : r.judge_scores) out << name << "  " << score << "\n";
  out << "Avg    " << r.avg << "\n";
  return out.str();
}

}  // namespace ohd
