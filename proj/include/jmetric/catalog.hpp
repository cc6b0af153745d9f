#pragma once

// Built-in 4-dimensional example manifolds: a flat and a curved entry for each
// (alpha, epsilon) geometry, plus a Hermitian witness where the well-adapted and
// Chern connections differ.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "jmetric/field.hpp"
#include "jmetric/sampling.hpp"
#include "jmetric/structure.hpp"

namespace jmetric {

struct ExpectedFlags {
  bool kaehler_type = false;
  int alpha = -1;
  int epsilon = 1;
  std::string notes;
};

struct ExampleEntry {
  std::string id;
  std::string name;
  Manifold manifold;
  ExpectedFlags expected;
  Box sample_box;
  std::uint64_t seed = 0;
  std::optional<Point> witness;
};

namespace detail {

using Rows = std::vector<std::vector<std::string>>;

inline const Rows kStandardComplex = {{"0", "0", "-1", "0"}, {"0", "0", "0", "-1"}, {"1", "0", "0", "0"}, {"0", "1", "0", "0"}};
inline const Rows kStandardProduct = {{"1", "0", "0", "0"}, {"0", "1", "0", "0"}, {"0", "0", "-1", "0"}, {"0", "0", "0", "-1"}};
inline const Rows kIdentity = {{"1", "0", "0", "0"}, {"0", "1", "0", "0"}, {"0", "0", "1", "0"}, {"0", "0", "0", "1"}};

inline MatrixField field(const Rows& rows) { return MatrixField::parse(rows, 4); }

/// R J0 R^t for a rotation R given as rows.
inline MatrixField conjugate(const Rows& rotation, const Rows& j0) {
  const MatrixField R = field(rotation);
  return multiply(multiply(R, field(j0)), transpose(R));
}

inline ExampleEntry entry(std::string id, std::string name, int alpha, int eps, MatrixField g, MatrixField J,
                          bool kaehler, std::string notes) {
  return {std::move(id), std::move(name), Manifold(4, alpha, eps, std::move(g), std::move(J)),
          ExpectedFlags{kaehler, alpha, eps, std::move(notes)}, unit_box(4), 0, std::nullopt};
}

}  // namespace detail

/// Chern witness family: J standard complex, g averaged from I + a x1 on h_22 and b x3 on h_12 = h_21.
inline Manifold chern_witness_family(double a, double b) {
  detail::Rows h = detail::kIdentity;
  h[1][1] = "1 + " + print(Expr::constant(a)) + "*x1";
  h[0][1] = h[1][0] = print(Expr::constant(b)) + "*x3";
  const MatrixField J = detail::field(detail::kStandardComplex);
  return Manifold(4, -1, 1, averaged_metric(J, detail::field(h), 1), J);
}

/// Parameters and witness point found by tools/witness_search (grid over a, b in 0.05..0.30).
inline constexpr double kWitnessA = 0.3;
inline constexpr double kWitnessB = 0.3;
inline const Point& chern_witness_point() {
  static const Point p = (Point(4) << -0.5, 0.25, 0.75, -0.25).finished();
  return p;
}

inline std::vector<ExampleEntry> build_catalog() {
  using namespace detail;
  std::vector<ExampleEntry> out;
  const MatrixField Jc = field(kStandardComplex);
  const MatrixField Jp = field(kStandardProduct);

  out.push_back(entry("E1", "flat_hermitian", -1, 1, field(kIdentity), Jc, true, "R^4 with the standard complex structure and g = I"));

  out.push_back(entry("E2", "flat_norden", -1, -1, field(kStandardProduct), Jc, true,
                      "standard complex structure with the Norden metric diag(1,1,-1,-1)"));

  {
    Rows h = kIdentity;
    h[0][2] = h[2][0] = "1 + 0.1*x2";
    h[0][3] = h[3][0] = "0.1*x1";
    h[1][3] = h[3][1] = "1 + 0.1*x3";
    out.push_back(entry("E3", "curved_para_hermitian", 1, -1, averaged_metric(Jp, field(h), -1), Jp, false,
                        "J = diag(1,1,-1,-1); g = [[0, I+B],[I+B^t, 0]] with a linear bump B"));
  }

  {
    Rows h = kIdentity;
    h[1][1] = "1 + 0.2*x1^2";
    out.push_back(entry("E4", "curved_hermitian", -1, 1, averaged_metric(Jc, field(h), 1), Jc, false,
                        "standard complex structure; bump 0.2*x1^2 on h_22 so the fundamental form is not closed"));
  }

  {
    const Rows R = {{"cos(0.3*x3)", "-sin(0.3*x3)", "0", "0"},
                    {"sin(0.3*x3)", "cos(0.3*x3)", "0", "0"},
                    {"0", "0", "1", "0"},
                    {"0", "0", "0", "1"}};
    const MatrixField J = conjugate(R, kStandardComplex);
    Rows h = kStandardProduct;
    h[0][0] = "1 + 0.2*x2";
    out.push_back(entry("E5", "curved_norden", -1, -1, averaged_metric(J, field(h), -1), J, false,
                        "J is the standard complex structure rotated by 0.3*x3 in the (x1,x2) plane; non-integrable"));
  }

  {
    const Rows R = {{"cos(0.3*x1)", "0", "-sin(0.3*x1)", "0"},
                    {"0", "1", "0", "0"},
                    {"sin(0.3*x1)", "0", "cos(0.3*x1)", "0"},
                    {"0", "0", "0", "1"}};
    const MatrixField J = conjugate(R, kStandardProduct);
    Rows h = kIdentity;
    h[1][1] = "1 + 0.2*x2^2";
    out.push_back(entry("E6", "curved_product", 1, 1, averaged_metric(J, field(h), 1), J, false,
                        "diag(1,1,-1,-1) rotated by 0.3*x1 in the (x1,x3) plane"));
  }

  {
    ExampleEntry e{"E7", "chern_witness", chern_witness_family(kWitnessA, kWitnessB),
                   ExpectedFlags{false, -1, 1,
                                 "Hermitian; well-adapted and Chern connections differ at the witness point "
                                 "(parameters from tools/witness_search)"},
                   unit_box(4), 0, chern_witness_point()};
    out.push_back(std::move(e));
  }
  return out;
}

inline const std::vector<ExampleEntry>& catalog_entries() {
  static const std::vector<ExampleEntry> entries = build_catalog();
  return entries;
}

inline std::vector<std::string> catalog() {
  std::vector<std::string> names;
  for (const auto& e : catalog_entries()) names.push_back(e.name);
  return names;
}

inline const ExampleEntry& load_example(std::string_view name) {
  const auto& entries = catalog_entries();
  auto it = std::find_if(entries.begin(), entries.end(), [&](const ExampleEntry& e) { return e.name == name || e.id == name; });
  if (it == entries.end()) throw Error("unknown example: " + std::string(name));
  return *it;
}

}  // namespace jmetric
