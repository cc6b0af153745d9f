#pragma once

// Manifest files: a JSON description of an (alpha, epsilon)-manifold chart.
//
//   {"name": "...", "dim2n": 4, "alpha": -1, "epsilon": 1,
//    "g": [["1", "0", ...], ...], "J": [[...], ...],
//    "sample_box": [[-1, 1], ...], "seed": 0}
//
// Errors carry the byte offset into the file text.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "jmetric/catalog.hpp"
#include "jmetric/field.hpp"
#include "jmetric/parser.hpp"
#include "jmetric/sampling.hpp"
#include "jmetric/structure.hpp"

namespace jmetric {

struct Manifest {
  std::string name;
  std::size_t dim2n = 0;
  int alpha = -1;
  int epsilon = 1;
  std::vector<std::vector<std::string>> g;
  std::vector<std::vector<std::string>> J;
  Box sample_box;
  std::uint64_t seed = 0;

  Manifold manifold() const {
    return Manifold(dim2n, alpha, epsilon, MatrixField::parse(g, dim2n), MatrixField::parse(J, dim2n));
  }
};

namespace detail {

/// Byte offsets of the opening quote of every string literal, in document order.
inline std::vector<std::size_t> string_offsets(std::string_view text) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '"') continue;
    out.push_back(i);
    for (++i; i < text.size() && text[i] != '"'; ++i)
      if (text[i] == '\\') ++i;
  }
  return out;
}

struct Located {
  nlohmann::json doc;
  std::map<std::string, std::size_t> key_offset;                   // top-level keys
  std::map<std::string, std::vector<std::size_t>> matrix_offsets;  // "g", "J": row-major string offsets
};

inline Located parse_located(std::string_view text) {
  using json = nlohmann::json;
  const auto offsets = string_offsets(text);
  Located out;
  std::size_t next = 0;
  std::string key;
  auto take = [&]() { return next < offsets.size() ? offsets[next++] : text.size(); };
  auto cb = [&](int depth, json::parse_event_t ev, json& parsed) {
    if (ev == json::parse_event_t::key) {
      const std::size_t at = take();
      if (depth == 1) {
        key = parsed.get<std::string>();
        out.key_offset.emplace(key, at);
      }
    } else if (ev == json::parse_event_t::value && parsed.is_string()) {
      const std::size_t at = take();
      if (depth == 3 && (key == "g" || key == "J")) out.matrix_offsets[key].push_back(at);
    }
    return true;
  };
  try {
    out.doc = json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string what = e.what();
    if (auto colon = what.rfind(": "); colon != std::string::npos) what = what.substr(colon + 2);
    throw ParseError(at, "malformed JSON: " + what);
  }
  return out;
}

}  // namespace detail

/// Parses manifest text; every failure is a ParseError located in `text`.
inline Manifest parse_manifest(std::string_view text) {
  const auto loc = detail::parse_located(text);
  const auto& doc = loc.doc;
  if (!doc.is_object()) throw ParseError(0, "manifest must be a JSON object");
  auto at_key = [&](const std::string& k) {
    auto it = loc.key_offset.find(k);
    return it == loc.key_offset.end() ? std::size_t{0} : it->second;
  };
  auto require = [&](const std::string& k) -> const nlohmann::json& {
    if (!doc.contains(k)) throw ParseError(0, "missing field \"" + k + "\"");
    return doc.at(k);
  };
  auto integer = [&](const std::string& k) -> std::int64_t {
    const auto& v = require(k);
    if (!v.is_number_integer()) throw ParseError(at_key(k), "field \"" + k + "\" must be an integer");
    return v.get<std::int64_t>();
  };

  Manifest m;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ParseError(at_key("name"), "field \"name\" must be a string");
    m.name = doc["name"].get<std::string>();
  }
  const auto dim = integer("dim2n");
  if (dim < 2 || dim % 2 != 0 || dim > 16) throw ParseError(at_key("dim2n"), "dim2n must be even and in 2..16");
  m.dim2n = static_cast<std::size_t>(dim);
  const auto alpha = integer("alpha");
  if (alpha != 1 && alpha != -1) throw ParseError(at_key("alpha"), "alpha must be 1 or -1");
  m.alpha = static_cast<int>(alpha);
  const auto eps = integer("epsilon");
  if (eps != 1 && eps != -1) throw ParseError(at_key("epsilon"), "epsilon must be 1 or -1");
  m.epsilon = static_cast<int>(eps);

  auto matrix = [&](const std::string& k) {
    const auto& v = require(k);
    const std::string shape = "field \"" + k + "\" must be a " + std::to_string(dim) + "x" + std::to_string(dim) +
                              " array of expression strings";
    if (!v.is_array() || v.size() != m.dim2n) throw ParseError(at_key(k), shape);
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : v) {
      if (!row.is_array() || row.size() != m.dim2n) throw ParseError(at_key(k), shape);
      std::vector<std::string> r;
      for (const auto& cell : row) {
        if (!cell.is_string()) throw ParseError(at_key(k), shape);
        r.push_back(cell.get<std::string>());
      }
      rows.push_back(std::move(r));
    }
    // Check every expression now so errors point into the file.
    const auto& offs = loc.matrix_offsets.at(k);
    for (std::size_t i = 0; i < m.dim2n; ++i)
      for (std::size_t j = 0; j < m.dim2n; ++j) {
        try {
          (void)parse_expression(rows[i][j], m.dim2n);
        } catch (const ParseError& e) {
          throw ParseError(offs[i * m.dim2n + j] + 1 + e.offset(),
                           k + "[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]: " + e.reason());
        }
      }
    return rows;
  };
  m.g = matrix("g");
  m.J = matrix("J");

  if (doc.contains("sample_box")) {
    const auto& b = doc["sample_box"];
    const std::string shape = "sample_box must be a list of " + std::to_string(dim) + " [lo, hi] pairs with lo <= hi";
    if (!b.is_array() || b.size() != m.dim2n) throw ParseError(at_key("sample_box"), shape);
    for (const auto& pair : b) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
        throw ParseError(at_key("sample_box"), shape);
      const double lo = pair[0].get<double>(), hi = pair[1].get<double>();
      if (!(lo <= hi)) throw ParseError(at_key("sample_box"), shape);
      m.sample_box.emplace_back(lo, hi);
    }
  } else {
    m.sample_box = unit_box(m.dim2n);
  }
  if (doc.contains("seed")) {
    const auto& s = doc["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw ParseError(at_key("seed"), "seed must be a non-negative integer");
    m.seed = s.get<std::uint64_t>();
  }
  return m;
}

inline Manifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

inline nlohmann::ordered_json to_json(const Manifest& m) {
  nlohmann::ordered_json j;
  if (!m.name.empty()) j["name"] = m.name;
  j["dim2n"] = m.dim2n;
  j["alpha"] = m.alpha;
  j["epsilon"] = m.epsilon;
  j["g"] = m.g;
  j["J"] = m.J;
  auto box = nlohmann::ordered_json::array();
  for (const auto& [lo, hi] : m.sample_box) box.push_back({lo, hi});
  j["sample_box"] = box;
  j["seed"] = m.seed;
  return j;
}

inline std::string dump_manifest(const Manifest& m) { return to_json(m).dump(2) + "\n"; }

inline std::vector<std::vector<std::string>> print_field(const MatrixField& f) {
  const auto d = static_cast<Eigen::Index>(f.dim());
  std::vector<std::vector<std::string>> rows(f.dim());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) rows[static_cast<std::size_t>(i)].push_back(print(f(i, j)));
  return rows;
}

inline Manifest manifest_from(const Manifold& mf, std::string name, Box box, std::uint64_t seed) {
  Manifest m;
  m.name = std::move(name);
  m.dim2n = mf.dim();
  m.alpha = mf.alpha();
  m.epsilon = mf.epsilon();
  m.g = print_field(mf.g());
  m.J = print_field(mf.J());
  m.sample_box = std::move(box);
  m.seed = seed;
  return m;
}

inline Manifest manifest_from(const ExampleEntry& e) { return manifest_from(e.manifold, e.name, e.sample_box, e.seed); }

inline void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write manifest: " + path);
  out << dump_manifest(m);
  if (!out) throw Error("failed writing manifest: " + path);
}

}  // namespace jmetric
