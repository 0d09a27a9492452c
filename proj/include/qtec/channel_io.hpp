#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qtec/channels.hpp"

namespace qtec {

// Channel file format:
//   {"n": 2, "d": 2, "kraus": [ K_1, ..., K_d ]}
// where each K_j is a list of n rows, each row a list of n entries, and
// each entry a two-element array [re, im].

struct ChannelParseOptions {
  double tol = 1e-6;            // completeness tolerance
  bool allow_incomplete = false;
};

namespace detail {

using JsonPathElem = std::variant<std::string, std::size_t>;

struct TextPosition {
  std::size_t line = 1;
  std::size_t column = 1;
};

inline TextPosition position_of(std::string_view text, std::size_t offset) {
  TextPosition p;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

// Minimal scanner over text already accepted by the JSON parser; used
// only to map a path back to its source offset.
class JsonLocator {
 public:
  explicit JsonLocator(std::string_view text) : text_(text) {}

  std::optional<std::size_t> find(const std::vector<JsonPathElem>& path) {
    std::size_t pos = skip_ws(0);
    for (const auto& elem : path) {
      if (pos >= text_.size()) return std::nullopt;
      if (const auto* key = std::get_if<std::string>(&elem)) {
        if (text_[pos] != '{') return std::nullopt;
        pos = skip_ws(pos + 1);
        bool found = false;
        while (pos < text_.size() && text_[pos] != '}') {
          const std::size_t key_end = skip_string(pos);
          const std::string_view k = text_.substr(pos + 1, key_end - pos - 2);
          pos = skip_ws(key_end);
          pos = skip_ws(pos + 1);  // ':'
          if (k == *key) {
            found = true;
            break;
          }
          pos = skip_ws(skip_value(pos));
          if (pos < text_.size() && text_[pos] == ',') pos = skip_ws(pos + 1);
        }
        if (!found) return std::nullopt;
      } else {
        const std::size_t index = std::get<std::size_t>(elem);
        if (text_[pos] != '[') return std::nullopt;
        pos = skip_ws(pos + 1);
        for (std::size_t i = 0; i < index; ++i) {
          if (pos >= text_.size() || text_[pos] == ']') return std::nullopt;
          pos = skip_ws(skip_value(pos));
          if (pos < text_.size() && text_[pos] == ',') pos = skip_ws(pos + 1);
        }
        if (pos >= text_.size() || text_[pos] == ']') return std::nullopt;
      }
    }
    return pos;
  }

 private:
  std::size_t skip_ws(std::size_t pos) const {
    while (pos < text_.size() && (text_[pos] == ' ' || text_[pos] == '\n' || text_[pos] == '\r' || text_[pos] == '\t'))
      ++pos;
    return pos;
  }

  std::size_t skip_string(std::size_t pos) const {
    ++pos;
    while (pos < text_.size() && text_[pos] != '"') pos += (text_[pos] == '\\') ? 2 : 1;
    return pos + 1;
  }

  std::size_t skip_value(std::size_t pos) const {
    if (pos >= text_.size()) return pos;
    const char c = text_[pos];
    if (c == '"') return skip_string(pos);
    if (c == '[' || c == '{') {
      int depth = 0;
      while (pos < text_.size()) {
        const char ch = text_[pos];
        if (ch == '"') {
          pos = skip_string(pos);
          continue;
        }
        if (ch == '[' || ch == '{') ++depth;
        if (ch == ']' || ch == '}') {
          if (--depth == 0) return pos + 1;
        }
        ++pos;
      }
      return pos;
    }
    while (pos < text_.size() && text_[pos] != ',' && text_[pos] != ']' && text_[pos] != '}' &&
           text_[pos] != ' ' && text_[pos] != '\n' && text_[pos] != '\r' && text_[pos] != '\t')
      ++pos;
    return pos;
  }

  std::string_view text_;
};

inline std::string describe_path(const std::vector<JsonPathElem>& path) {
  std::string out;
  for (const auto& e : path) {
    if (const auto* k = std::get_if<std::string>(&e))
      out += (out.empty() ? "" : ".") + *k;
    else
      out += "[" + std::to_string(std::get<std::size_t>(e)) + "]";
  }
  return out.empty() ? "<root>" : out;
}

[[noreturn]] inline void parse_fail(std::string_view text, const std::vector<JsonPathElem>& path,
                                    const std::string& what) {
  std::string where = describe_path(path);
  if (const auto off = JsonLocator(text).find(path)) {
    const TextPosition p = position_of(text, *off);
    where += " (line " + std::to_string(p.line) + ", column " + std::to_string(p.column) + ")";
  }
  throw Error(ErrorKind::ParseError, where + ": " + what);
}

}  // namespace detail

inline KrausChannel parse_channel(std::string_view text, const ChannelParseOptions& opts = {}) {
  using nlohmann::json;
  using detail::JsonPathElem;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto p = detail::position_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::ParseError, "line " + std::to_string(p.line) + ", column " +
                                           std::to_string(p.column) + ": malformed document");
  }
  std::vector<JsonPathElem> path;
  if (!doc.is_object()) detail::parse_fail(text, path, "expected an object");

  const auto read_count = [&](const char* key, std::size_t minimum) -> std::size_t {
    path = {std::string(key)};
    if (!doc.contains(key)) detail::parse_fail(text, {}, std::string("missing field '") + key + "'");
    const json& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(minimum)) {
      detail::parse_fail(text, path, "expected an integer >= " + std::to_string(minimum));
    }
    return v.get<std::size_t>();
  };
  const std::size_t n = read_count("n", 2);
  const std::size_t d = read_count("d", 1);

  path = {std::string("kraus")};
  if (!doc.contains("kraus")) detail::parse_fail(text, {}, "missing field 'kraus'");
  const json& kraus = doc.at("kraus");
  if (!kraus.is_array() || kraus.size() != d) {
    detail::parse_fail(text, path, "expected a list of d = " + std::to_string(d) + " matrices");
  }
  std::vector<ComplexMatrix> ops;
  ops.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    path = {std::string("kraus"), j};
    const json& mat = kraus[j];
    if (!mat.is_array() || mat.size() != n) {
      detail::parse_fail(text, path, "expected " + std::to_string(n) + " rows");
    }
    ComplexMatrix k(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      path = {std::string("kraus"), j, r};
      const json& row = mat[r];
      if (!row.is_array() || row.size() != n) {
        detail::parse_fail(text, path, "expected " + std::to_string(n) + " entries");
      }
      for (std::size_t c = 0; c < n; ++c) {
        path = {std::string("kraus"), j, r, c};
        const json& entry = row[c];
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
          detail::parse_fail(text, path, "complex entry must be a two-element array [re, im]");
        }
        k(r, c) = complex{entry[0].get<double>(), entry[1].get<double>()};
        if (!std::isfinite(k(r, c).real()) || !std::isfinite(k(r, c).imag())) {
          detail::parse_fail(text, path, "entry is not finite");
        }
      }
    }
    ops.push_back(std::move(k));
  }
  if (opts.allow_incomplete) return KrausChannel::unchecked(std::move(ops));
  return KrausChannel(std::move(ops), opts.tol);
}

inline KrausChannel read_channel_file(const std::filesystem::path& file, const ChannelParseOptions& opts = {}) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_channel(buf.str(), opts);
}

/// One matrix row per line; entries printed with 17 significant digits.
inline std::string write_channel(const KrausChannel& ch) {
  const auto num = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  std::string out = "{\n  \"n\": " + std::to_string(ch.n()) + ",\n  \"d\": " + std::to_string(ch.d()) +
                    ",\n  \"kraus\": [\n";
  for (std::size_t j = 0; j < ch.d(); ++j) {
    out += "    [\n";
    for (std::size_t r = 0; r < ch.n(); ++r) {
      out += "      [";
      for (std::size_t c = 0; c < ch.n(); ++c) {
        const complex z = ch[j](r, c);
        out += "[" + num(z.real()) + ", " + num(z.imag()) + "]";
        if (c + 1 < ch.n()) out += ", ";
      }
      out += (r + 1 < ch.n()) ? "],\n" : "]\n";
    }
    out += (j + 1 < ch.d()) ? "    ],\n" : "    ]\n";
  }
  out += "  ]\n}\n";
  return out;
}

}  // namespace qtec
