#pragma once

// The jmetric command-line front end. run() is callable in-process for tests.
// Exit codes: 0 all checks pass, 1 a check fails, 2 usage or parse error.

#include <charconv>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "jmetric/catalog.hpp"
#include "jmetric/connection.hpp"
#include "jmetric/lie_algebra.hpp"
#include "jmetric/manifest.hpp"
#include "jmetric/verify.hpp"

namespace jmetric::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

using ojson = nlohmann::ordered_json;

namespace detail {

inline std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << v;
  return s.str();
}

inline ojson point_json(const Point& p) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p(i));
  return a;
}

inline std::string point_text(const Point& p) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    std::ostringstream v;
    v << std::setprecision(6) << p(i);
    s += v.str();
  }
  return s + ")";
}

inline Point parse_point(const std::string& text, std::size_t dim) {
  std::vector<double> coords;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    double v = 0.0;
    const auto* b = item.data();
    const auto* e = item.data() + item.size();
    while (b < e && *b == ' ') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) throw Error("--point: bad coordinate \"" + item + "\" at offset " + std::to_string(start));
    coords.push_back(v);
    start = comma + 1;
  }
  if (coords.size() != dim)
    throw Error("--point needs " + std::to_string(dim) + " coordinates, got " + std::to_string(coords.size()));
  return Eigen::Map<const Eigen::VectorXd>(coords.data(), static_cast<Eigen::Index>(coords.size()));
}

inline ojson tensor_json(const Tensor3& t) {
  ojson out = ojson::array();
  for (Eigen::Index k = 0; k < t.dim(); ++k) {
    ojson mk = ojson::array();
    for (Eigen::Index i = 0; i < t.dim(); ++i) {
      ojson row = ojson::array();
      for (Eigen::Index j = 0; j < t.dim(); ++j) row.push_back(t.at(k, i, j));
      mk.push_back(row);
    }
    out.push_back(mk);
  }
  return out;
}

inline std::string status(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace detail

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool json = false;
};

inline int cmd_validate(Context& ctx, const Manifest& mf, std::size_t points, double tol) {
  const Manifold m = mf.manifold();
  const auto pts = halton_points(mf.sample_box, points, mf.seed);
  const auto r = validate_structure(m, pts, tol);
  if (ctx.json) {
    ojson j;
    j["command"] = "validate";
    j["name"] = mf.name;
    j["points"] = r.points;
    j["tolerance"] = tol;
    j["j_squared"] = r.j_squared;
    j["trace"] = r.trace;
    j["compatibility"] = r.compatibility;
    j["symmetry"] = r.symmetry;
    j["nondegeneracy"] = r.nondegeneracy;
    j["passed"] = r.passed;
    ctx.out << j.dump(2) << "\n";
  } else {
    ctx.out << "validate " << (mf.name.empty() ? "<manifest>" : mf.name) << " on " << r.points << " points\n"
            << "  J^2 - alpha I      " << detail::sci(r.j_squared) << "\n"
            << "  trace J            " << detail::sci(r.trace) << "\n"
            << "  J^t g J - eps g    " << detail::sci(r.compatibility) << "\n"
            << "  g - g^t            " << detail::sci(r.symmetry) << "\n"
            << "  " << (m.epsilon() == 1 ? "min eigenvalue g   " : "min |det g|        ") << detail::sci(r.nondegeneracy)
            << "\n"
            << detail::status(r.passed) << "\n";
  }
  return r.passed ? kExitPass : kExitFail;
}

inline int cmd_connection(Context& ctx, const Manifest& mf, ConnectionKind kind, const std::string& point_text,
                          double tol) {
  const Manifold m = mf.manifold();
  const Point p = detail::parse_point(point_text, m.dim());
  const Jet jet = make_jet(m, p);
  Connection conn;
  std::optional<PotentialSolve> failed;
  try {
    conn = connection(jet, kind);
  } catch (const TheoremViolation& e) {
    failed = e.solve();
    ctx.err << "error: " << e.what() << "\n";
  }
  if (failed) {
    if (ctx.json) {
      ojson j;
      j["command"] = "connection";
      j["kind"] = kind_name(kind);
      j["point"] = detail::point_json(p);
      j["solve"] = {{"residual", failed->residual}, {"nullspace_dim", failed->nullspace_dim}};
      j["passed"] = false;
      ctx.out << j.dump(2) << "\n";
    }
    return kExitFail;
  }
  const auto res = adapted_residuals(jet, conn);
  const bool ok = kind == ConnectionKind::levi_civita ? res.nabla_g < tol : res.max() < tol;
  const Tensor3 T = torsion(conn);
  if (ctx.json) {
    ojson j;
    j["command"] = "connection";
    j["name"] = mf.name;
    j["kind"] = kind_name(kind);
    j["point"] = detail::point_json(p);
    j["gamma"] = detail::tensor_json(conn.gamma);
    j["nabla_J"] = res.nabla_J;
    j["nabla_g"] = res.nabla_g;
    j["torsion"] = T.max_abs();
    if (conn.diagnostics) {
      const auto& d = *conn.diagnostics;
      j["solve"] = {{"unknowns", d.unknowns},         {"rows", d.rows},
                    {"residual", d.residual},         {"c1_residual", d.c1_residual},
                    {"c2_residual", d.c2_residual},   {"c3_residual", d.c3_residual},
                    {"nullspace_dim", d.nullspace_dim}};
    }
    j["passed"] = ok;
    ctx.out << j.dump(2) << "\n";
  } else {
    ctx.out << kind_name(kind) << " connection at " << detail::point_text(p) << "\n";
    bool any = false;
    const auto d = conn.gamma.dim();
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
          const double v = conn.gamma.at(k, i, j);
          if (v == 0.0) continue;
          any = true;
          ctx.out << "  Gamma^" << k + 1 << "_" << i + 1 << j + 1 << " = " << std::setprecision(17) << v << "\n";
        }
    if (!any) ctx.out << "  all coefficients are zero\n";
    ctx.out << "  |nabla J| " << detail::sci(res.nabla_J) << "  |nabla g| " << detail::sci(res.nabla_g) << "  |T| "
            << detail::sci(T.max_abs()) << "\n";
    if (conn.diagnostics)
      ctx.out << "  solve: " << conn.diagnostics->rows << "x" << conn.diagnostics->unknowns << ", residual "
              << detail::sci(conn.diagnostics->residual) << ", nullspace " << conn.diagnostics->nullspace_dim << "\n";
    ctx.out << detail::status(ok) << "\n";
  }
  return ok ? kExitPass : kExitFail;
}

inline ojson report_json(const VerifyReport& r) {
  ojson j;
  j["command"] = "verify";
  j["name"] = r.name;
  j["alpha"] = r.alpha;
  j["epsilon"] = r.epsilon;
  j["seed"] = r.seed;
  j["kaehler_type"] = r.kaehler_type;
  ojson checks = ojson::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"description", c.description},
                      {"value", c.value},
                      {"relation", c.relation},
                      {"threshold", c.threshold},
                      {"passed", c.passed}});
  j["checks"] = checks;
  ojson pts = ojson::array();
  for (const auto& p : r.points) {
    ojson e;
    e["point"] = detail::point_json(p.point);
    if (p.error) e["error"] = *p.error;
    e["axioms"] = p.axioms;
    e["abs_det_g"] = p.abs_det_g;
    e["well_residual"] = p.well_residual;
    e["well_nullspace"] = p.well_nullspace;
    e["well_nabla_J"] = p.well_nabla_J;
    e["well_nabla_g"] = p.well_nabla_g;
    e["torsion_identity"] = p.torsion_identity;
    e["trace_condition"] = p.trace_condition;
    e["levi_nabla_J"] = p.levi_nabla_J;
    e["well_vs_levi"] = p.well_vs_levi;
    e["canonical_nabla_J"] = p.canonical_nabla_J;
    e["canonical_nabla_g"] = p.canonical_nabla_g;
    if (p.chern_residual) e["chern_residual"] = *p.chern_residual;
    if (p.chern_nullspace) e["chern_nullspace"] = *p.chern_nullspace;
    if (p.chern_torsion) e["chern_torsion"] = *p.chern_torsion;
    if (p.mixed_torsion) e["mixed_torsion"] = *p.mixed_torsion;
    if (p.well_vs_chern) e["well_vs_chern"] = *p.well_vs_chern;
    if (p.well_vs_canonical) e["well_vs_canonical"] = *p.well_vs_canonical;
    if (p.chern_probe_nullspace) e["chern_probe_nullspace"] = *p.chern_probe_nullspace;
    if (p.chern_probe_residual) e["chern_probe_residual"] = *p.chern_probe_residual;
    pts.push_back(e);
  }
  j["points"] = pts;
  j["passed"] = r.passed();
  return j;
}

inline void report_table(std::ostream& out, const VerifyReport& r) {
  out << "verify " << (r.name.empty() ? "<manifest>" : r.name) << " (alpha=" << r.alpha << ", eps=" << r.epsilon
      << ", " << r.points.size() << " points, seed " << r.seed << ")\n";
  for (const auto& c : r.checks) {
    out << "  " << std::left << std::setw(30) << c.name << std::right << std::setw(11) << detail::sci(c.value) << "  "
        << std::left << std::setw(3) << c.relation << std::right << std::setw(10) << detail::sci(c.threshold) << "  "
        << detail::status(c.passed) << "\n";
  }
  out << "  observed " << (r.kaehler_type ? "Kaehler type" : "not Kaehler type") << "\n";
  for (std::size_t i = 0; i < r.points.size(); ++i)
    if (r.points[i].error) out << "  point " << i << ": " << *r.points[i].error << "\n";
  out << detail::status(r.passed()) << "\n";
}

inline int cmd_verify(Context& ctx, const Manifest& mf, std::size_t points, unsigned workers) {
  VerifyOptions opt;
  opt.points = points;
  opt.workers = workers;
  const auto r = verify(mf.manifold(), mf.sample_box, mf.seed, opt, mf.name);
  if (ctx.json)
    ctx.out << report_json(r).dump(2) << "\n";
  else
    report_table(ctx.out, r);
  return r.passed() ? kExitPass : kExitFail;
}

inline int cmd_prolongation(Context& ctx, Family family, Eigen::Index n) {
  const AlgebraBasis basis = algebra_basis(family, n);
  const std::size_t prolong = first_prolongation_dim(basis);
  const bool transpose = is_transpose_invariant(basis);
  std::optional<ExistenceCertificate> cert;
  for (int alpha : {-1, 1})
    for (int eps : {1, -1})
      if (structure_family(alpha, eps) == family) cert = existence_certificate(alpha, eps, n);
  const bool ok = prolong == 0 && transpose && (!cert || cert->certified());
  if (ctx.json) {
    ojson j;
    j["command"] = "prolongation";
    j["family"] = family_name(family);
    j["n"] = n;
    j["algebra_dim"] = basis.dim();
    j["prolongation_dim"] = prolong;
    j["transpose_invariant"] = transpose;
    if (cert) {
      j["container"] = family_name(cert->container);
      j["contained"] = cert->contained;
      j["container_prolongation_dim"] = cert->container_prolongation_dim;
    }
    j["passed"] = ok;
    ctx.out << j.dump(2) << "\n";
  } else {
    ctx.out << "family=" << family_name(family) << " n=" << n << "\n"
            << "algebra_dim=" << basis.dim() << "\n"
            << "prolongation_dim=" << prolong << "\n"
            << "transpose_invariant=" << (transpose ? "true" : "false") << "\n";
    if (cert)
      ctx.out << "container=" << family_name(cert->container) << "\n"
              << "contained=" << (cert->contained ? "true" : "false") << "\n"
              << "container_prolongation_dim=" << cert->container_prolongation_dim << "\n";
    ctx.out << detail::status(ok) << "\n";
  }
  return ok ? kExitPass : kExitFail;
}

inline int cmd_examples_list(Context& ctx) {
  if (ctx.json) {
    ojson a = ojson::array();
    for (const auto& e : catalog_entries())
      a.push_back({{"id", e.id},
                   {"name", e.name},
                   {"alpha", e.expected.alpha},
                   {"epsilon", e.expected.epsilon},
                   {"kaehler_type", e.expected.kaehler_type},
                   {"notes", e.expected.notes}});
    ctx.out << a.dump(2) << "\n";
  } else {
    for (const auto& e : catalog_entries())
      ctx.out << e.id << "  " << std::left << std::setw(22) << e.name << std::right << " alpha=" << std::setw(2)
              << e.expected.alpha << " eps=" << std::setw(2) << e.expected.epsilon << "  " << e.expected.notes << "\n";
  }
  return kExitPass;
}

inline int cmd_examples_export(Context& ctx, const std::string& name, const std::string& path) {
  save_manifest(manifest_from(load_example(name)), path);
  if (!ctx.json) ctx.out << "wrote " << path << "\n";
  return kExitPass;
}

/// Runs the CLI. argv[0] is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Connections on (alpha, epsilon)-structures: Levi-Civita, well-adapted, Chern, first canonical", "jmetric"};
  app.require_subcommand(1);
  std::string format = "table";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json"}));

  std::string manifest_path;
  std::size_t points = 10;
  double tol = kDefaultTolerance;
  unsigned workers = 0;

  auto* validate = app.add_subcommand("validate", "Check the structure axioms on sampled points");
  validate->add_option("manifest", manifest_path, "Manifest file")->required();
  validate->add_option("--points", points, "Number of Halton points")->check(CLI::PositiveNumber);
  validate->add_option("--tol", tol, "Residual tolerance")->check(CLI::PositiveNumber);

  std::string kind_text, point_text;
  double conn_tol = kSolveTolerance;
  auto* conn = app.add_subcommand("connection", "Connection coefficients at a point");
  conn->add_option("manifest", manifest_path, "Manifest file")->required();
  conn->add_option("--kind", kind_text, "levi-civita | well-adapted | chern | first-canonical")
      ->required()
      ->check(CLI::IsMember({"levi-civita", "well-adapted", "chern", "first-canonical"}));
  conn->add_option("--point", point_text, "Comma-separated coordinates")->required();
  conn->add_option("--tol", conn_tol, "Residual tolerance")->check(CLI::PositiveNumber);

  auto* ver = app.add_subcommand("verify", "Run the full verification suite on sampled points");
  ver->add_option("manifest", manifest_path, "Manifest file")->required();
  ver->add_option("--points", points, "Number of Halton points")->check(CLI::PositiveNumber);
  ver->add_option("--workers", workers, "Worker threads (0 = all cores)");

  std::string family_text;
  Eigen::Index n = 1;
  auto* prol = app.add_subcommand("prolongation", "First prolongation and transpose invariance of a matrix Lie algebra");
  prol->add_option("--family", family_text, "u | norden | product | para | o2n | onn | glc | glrr")
      ->required()
      ->check(CLI::IsMember({"u", "norden", "product", "para", "o2n", "onn", "glc", "glrr"}));
  prol->add_option("--n", n, "Block size n (matrices are 2n x 2n)")->required()->check(CLI::Range(1, 8));

  auto* ex = app.add_subcommand("examples", "Built-in example catalog");
  ex->require_subcommand(1);
  auto* ex_list = ex->add_subcommand("list", "List catalog entries");
  std::string ex_name, ex_path;
  auto* ex_export = ex->add_subcommand("export", "Write a catalog entry as a manifest");
  ex_export->add_option("name", ex_name, "Example name")->required();
  ex_export->add_option("path", ex_path, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  Context ctx{out, err, format == "json"};
  try {
    if (validate->parsed()) return cmd_validate(ctx, load_manifest(manifest_path), points, tol);
    if (conn->parsed()) return cmd_connection(ctx, load_manifest(manifest_path), *kind_from_name(kind_text), point_text, conn_tol);
    if (ver->parsed()) return cmd_verify(ctx, load_manifest(manifest_path), points, workers);
    if (prol->parsed()) return cmd_prolongation(ctx, *family_from_name(family_text), n);
    if (ex_list->parsed()) return cmd_examples_list(ctx);
    if (ex_export->parsed()) return cmd_examples_export(ctx, ex_name, ex_path);
  } catch (const ParseError& e) {
    err << "error: " << (manifest_path.empty() ? "" : manifest_path + ": ") << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedCase& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace jmetric::cli
