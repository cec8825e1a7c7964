#pragma once

#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ohd/errors.hpp"
#include "ohd/table.hpp"

namespace ohd {

enum class TableFormat { Json, Html };

namespace detail {

inline int require_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw MalformedInput(std::string("missing or non-integer \"") + key + "\"");
  return j[key].get<int>();
}

inline std::pair<int, int> require_span(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2 ||
      !j[key][0].is_number_integer() || !j[key][1].is_number_integer())
    throw MalformedInput(std::string("\"") + key + "\" must be a two-element integer array");
  return {j[key][0].get<int>(), j[key][1].get<int>()};
}

inline Table table_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedInput(e.what());
  }
  if (!j.is_object()) throw MalformedInput("top-level value must be an object");
  int n_rows = require_int(j, "n_rows");
  int n_cols = require_int(j, "n_cols");
  std::optional<std::string> title;
  if (j.contains("title") && !j["title"].is_null()) {
    if (!j["title"].is_string()) throw MalformedInput("\"title\" must be a string or null");
    title = j["title"].get<std::string>();
  }
  if (!j.contains("cells") || !j["cells"].is_array())
    throw MalformedInput("missing \"cells\" array");
  std::vector<Cell> cells;
  for (const auto& cj : j["cells"]) {
    if (!cj.is_object()) throw MalformedInput("cell entries must be objects");
    Cell c;
    c.id = require_int(cj, "id");
    if (!cj.contains("text") || !cj["text"].is_string())
      throw MalformedInput("cell \"text\" must be a string");
    c.text = cj["text"].get<std::string>();
    std::tie(c.row_start, c.row_end) = require_span(cj, "rows");
    std::tie(c.col_start, c.col_end) = require_span(cj, "cols");
    if (!cj.contains("role") || !cj["role"].is_string())
      throw MalformedInput("cell \"role\" must be a string");
    c.role = role_from_string(cj["role"].get<std::string>());
    cells.push_back(std::move(c));
  }
  return Table(n_rows, n_cols, std::move(cells), std::move(title));
}

// Minimal HTML table reader: <table>, <tr>, <td>/<th> with rowspan/colspan
// and a mandatory data-role attribute. Grid coordinates follow the usual
// occupancy-grid layout rule.
struct HtmlTag {
  std::string name;
  std::map<std::string, std::string> attrs;
  bool closing = false;
};

inline std::string html_unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      auto semi = s.find(';', i);
      if (semi != std::string::npos && semi - i <= 6) {
        std::string ent = s.substr(i + 1, semi - i - 1);
        if (ent == "amp") { out += '&'; i = semi + 1; continue; }
        if (ent == "lt") { out += '<'; i = semi + 1; continue; }
        if (ent == "gt") { out += '>'; i = semi + 1; continue; }
        if (ent == "quot") { out += '"'; i = semi + 1; continue; }
        if (ent == "apos") { out += '\''; i = semi + 1; continue; }
      }
    }
    out += s[i++];
  }
  return out;
}

inline std::string trim_ws(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline HtmlTag parse_tag(const std::string& raw) {
  HtmlTag tag;
  std::size_t i = 0;
  if (i < raw.size() && raw[i] == '/') {
    tag.closing = true;
    ++i;
  }
  while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) && raw[i] != '/')
    tag.name += static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i++])));
  while (i < raw.size()) {
    while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
    if (i >= raw.size() || raw[i] == '/') break;
    std::string key;
    while (i < raw.size() && raw[i] != '=' && raw[i] != '/' &&
           !std::isspace(static_cast<unsigned char>(raw[i])))
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i++])));
    std::string value;
    while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
    if (i < raw.size() && raw[i] == '=') {
      ++i;
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i < raw.size() && (raw[i] == '"' || raw[i] == '\'')) {
        char quote = raw[i++];
        while (i < raw.size() && raw[i] != quote) value += raw[i++];
        if (i < raw.size()) ++i;
      } else {
        while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) value += raw[i++];
      }
    }
    if (!key.empty()) tag.attrs[key] = html_unescape(value);
  }
  return tag;
}

inline Table table_from_html(const std::string& text) {
  struct PendingCell {
    std::string text;
    int row, col, rowspan, colspan;
    std::string role;
  };
  std::vector<PendingCell> pending;
  std::vector<std::vector<bool>> occupied;
  int row = -1;
  bool in_table = false;
  bool in_cell = false;
  PendingCell current;
  std::string content;
  int max_col = 0;

  auto grow = [&occupied](int r, int c) {
    if (static_cast<int>(occupied.size()) <= r) occupied.resize(r + 1);
    for (auto& rw : occupied)
      if (static_cast<int>(rw.size()) <= c) rw.resize(c + 1, false);
  };

  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '<') {
      auto close = text.find('>', i);
      if (close == std::string::npos) throw MalformedInput("unterminated tag");
      std::string raw = text.substr(i + 1, close - i - 1);
      i = close + 1;
      if (raw.empty() || raw[0] == '!' || raw[0] == '?') continue;
      HtmlTag tag = parse_tag(raw);
      if (tag.name == "table" && !tag.closing) {
        in_table = true;
      } else if (tag.name == "table" && tag.closing) {
        in_table = false;
      } else if (!in_table) {
        continue;
      } else if (tag.name == "tr" && !tag.closing) {
        ++row;
      } else if ((tag.name == "td" || tag.name == "th") && !tag.closing) {
        if (row < 0) throw MalformedInput("cell outside a table row");
        current = PendingCell{};
        current.row = row;
        current.rowspan = tag.attrs.count("rowspan") ? std::stoi(tag.attrs["rowspan"]) : 1;
        current.colspan = tag.attrs.count("colspan") ? std::stoi(tag.attrs["colspan"]) : 1;
        if (current.rowspan < 1 || current.colspan < 1)
          throw MalformedInput("rowspan/colspan must be >= 1");
        if (!tag.attrs.count("data-role"))
          throw MissingRole("row " + std::to_string(row) + ", cell " +
                            std::to_string(pending.size()));
        current.role = tag.attrs["data-role"];
        // first free column in this row
        int col = 0;
        grow(row, col);
        while (col < static_cast<int>(occupied[row].size()) && occupied[row][col]) ++col;
        current.col = col;
        grow(row + current.rowspan - 1, col + current.colspan - 1);
        for (int r = row; r < row + current.rowspan; ++r)
          for (int c = col; c < col + current.colspan; ++c) occupied[r][c] = true;
        max_col = std::max(max_col, col + current.colspan - 1);
        content.clear();
        in_cell = true;
      } else if ((tag.name == "td" || tag.name == "th") && tag.closing) {
        if (!in_cell) throw MalformedInput("stray cell close tag");
        current.text = html_unescape(trim_ws(content));
        pending.push_back(current);
        in_cell = false;
      }
    } else {
      if (in_cell) content += text[i];
      ++i;
    }
  }
  if (pending.empty()) throw MalformedInput("no table cells found");
  std::vector<Cell> cells;
  int next_id = 0;
  int max_row = 0;
  for (const PendingCell& p : pending) {
    Cell c;
    c.id = next_id++;
    c.text = p.text;
    c.row_start = p.row;
    c.row_end = p.row + p.rowspan - 1;
    c.col_start = p.col;
    c.col_end = p.col + p.colspan - 1;
    c.role = role_from_string(p.role);
    max_row = std::max(max_row, c.row_end);
    cells.push_back(std::move(c));
  }
  return Table(max_row + 1, max_col + 1, std::move(cells));
}

}  // namespace detail

inline Table parse_table(const std::string& input, TableFormat format) {
  switch (format) {
    case TableFormat::Json: return detail::table_from_json(input);
    case TableFormat::Html: return detail::table_from_html(input);
  }
  throw MalformedInput("unknown format");
}

// Canonical JSON: UTF-8, LF, 2-space indent, fixed key order, trailing newline.
inline std::string export_table(const Table& t) {
  nlohmann::ordered_json j;
  j["n_rows"] = t.n_rows();
  j["n_cols"] = t.n_cols();
  if (t.title())
    j["title"] = *t.title();
  else
    j["title"] = nullptr;
  j["cells"] = nlohmann::ordered_json::array();
  for (const Cell& c : t.cells()) {
    nlohmann::ordered_json cj;
    cj["id"] = c.id;
    cj["text"] = c.text;
    cj["rows"] = {c.row_start, c.row_end};
    cj["cols"] = {c.col_start, c.col_end};
    cj["role"] = to_string(c.role);
    j["cells"].push_back(std::move(cj));
  }
  return j.dump(2) + "\n";
}

}  // namespace ohd
