#pragma once

// Full verification suite over seeded sample points. Per-point work runs on a
// thread pool; results are stored by point index so reports are deterministic.

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "jmetric/connection.hpp"
#include "jmetric/sampling.hpp"
#include "jmetric/structure.hpp"

namespace jmetric {

/// Calls f(i) for i in [0, count) on up to `workers` threads (0 = hardware concurrency).
/// The first exception by index is rethrown after all work finishes.
template <class F>
void parallel_for(std::size_t count, F&& f, unsigned workers = 0) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <class T, class F>
std::vector<T> parallel_map(std::size_t count, F&& f, unsigned workers = 0) {
  std::vector<T> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = f(i); }, workers);
  return out;
}

struct PointResult {
  Point point;
  std::optional<std::string> error;  // set when a solve threw

  double axioms = 0.0;  // max of J^2, trace and compatibility residuals here
  double abs_det_g = 0.0;
  double well_residual = 0.0;
  Eigen::Index well_nullspace = 0;
  double well_nabla_J = 0.0;
  double well_nabla_g = 0.0;
  double torsion_identity = 0.0;
  double trace_condition = 0.0;
  double levi_nabla_J = 0.0;
  double well_vs_levi = 0.0;
  double canonical_nabla_J = 0.0;
  double canonical_nabla_g = 0.0;

  // alpha eps = -1
  std::optional<double> chern_residual;
  std::optional<Eigen::Index> chern_nullspace;
  std::optional<double> chern_torsion;
  std::optional<double> mixed_torsion;  // alpha = +1 only
  std::optional<double> well_vs_chern;
  std::optional<double> well_vs_canonical;

  // alpha = eps = +1
  std::optional<Eigen::Index> chern_probe_nullspace;
  std::optional<double> chern_probe_residual;  // nonzero when the condition is also inconsistent
};

inline PointResult verify_point(const Manifold& m, const Point& p) {
  PointResult r;
  r.point = p;
  const Jet jet = make_jet(m, p);
  const auto d = jet.dim();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  r.axioms = std::max({max_abs(jet.J * jet.J - jet.alpha * id), std::abs(jet.J.trace()),
                       max_abs(jet.J.transpose() * jet.g * jet.J - jet.epsilon * jet.g), max_abs(jet.g - jet.g.transpose())});
  r.abs_det_g = std::abs(jet.g.determinant());
  try {
    const Connection lc = levi_civita(jet);
    r.levi_nabla_J = covariant_J(jet, lc).max_abs();

    const PotentialSolve ws = solve_adapted(jet, TorsionCondition::well_adapted);
    r.well_residual = ws.residual;
    r.well_nullspace = ws.nullspace_dim;
    if (!ws.S) throw Error("well-adapted system is inconsistent");
    const Connection w{lc.gamma + *ws.S, ConnectionKind::well_adapted, ws};
    const auto wa = adapted_residuals(jet, w);
    r.well_nabla_J = wa.nabla_J;
    r.well_nabla_g = wa.nabla_g;
    const Tensor3 Tw = torsion(w);
    r.torsion_identity = well_adapted_identity_residual(jet, Tw);
    r.trace_condition = verify_trace_condition(jet, w);
    r.well_vs_levi = (w.gamma - lc.gamma).max_abs();

    const Connection c0 = first_canonical(jet);
    const auto ca = adapted_residuals(jet, c0);
    r.canonical_nabla_J = ca.nabla_J;
    r.canonical_nabla_g = ca.nabla_g;

    if (jet.alpha * jet.epsilon == -1) {
      const PotentialSolve cs = solve_adapted(jet, TorsionCondition::chern);
      r.chern_residual = cs.residual;
      r.chern_nullspace = cs.nullspace_dim;
      if (!cs.S) throw Error("Chern system is inconsistent");
      const Connection c{lc.gamma + *cs.S, ConnectionKind::chern, cs};
      const Tensor3 Tc = torsion(c);
      r.chern_torsion = chern_torsion_residual(jet, Tc);
      if (jet.alpha == 1) r.mixed_torsion = mixed_torsion_residual(jet, Tc);
      r.well_vs_chern = (w.gamma - c.gamma).max_abs();
      r.well_vs_canonical = (w.gamma - c0.gamma).max_abs();
    } else if (jet.alpha == 1 && jet.epsilon == 1) {
      const PotentialSolve probe = solve_adapted(jet, TorsionCondition::chern);
      r.chern_probe_nullspace = probe.nullspace_dim;
      r.chern_probe_residual = probe.residual;
    }
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

struct Check {
  std::string name;
  std::string description;
  double value = 0.0;  // worst observed value
  std::string relation;  // "<", ">", "==" or "iff"
  double threshold = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::string name;
  int alpha = -1;
  int epsilon = 1;
  std::uint64_t seed = 0;
  std::vector<PointResult> points;
  std::vector<Check> checks;
  bool kaehler_type = false;  // observation: nabla^g J ~ 0 at every point

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

struct VerifyOptions {
  std::size_t points = 10;
  double tol = kSolveTolerance;
  unsigned workers = 0;
};

inline VerifyReport verify(const Manifold& m, const Box& box, std::uint64_t seed, const VerifyOptions& opt = {},
                           std::string name = {}) {
  if (opt.points == 0) throw Error("verify needs at least one point");
  VerifyReport rep;
  rep.name = std::move(name);
  rep.alpha = m.alpha();
  rep.epsilon = m.epsilon();
  rep.seed = seed;
  const auto pts = halton_points(box, opt.points, seed);
  rep.points = parallel_map<PointResult>(pts.size(), [&](std::size_t i) { return verify_point(m, pts[i]); }, opt.workers);

  const double tol = opt.tol;
  auto worst = [&](auto get) {
    double v = 0.0;
    for (const auto& p : rep.points) v = std::max(v, static_cast<double>(get(p)));
    return v;
  };
  auto below = [&](std::string n, std::string desc, double v, double thr = -1.0) {
    if (thr < 0) thr = tol;
    rep.checks.push_back({std::move(n), std::move(desc), v, "<", thr, v < thr});
  };

  const std::size_t failures =
      static_cast<std::size_t>(std::count_if(rep.points.begin(), rep.points.end(), [](const PointResult& p) { return p.error.has_value(); }));
  rep.checks.push_back({"solves", "every pointwise solve completed", static_cast<double>(failures), "==", 0.0, failures == 0});

  below("structure", "J^2 = alpha I, trace J = 0, J^t g J = eps g, g symmetric", worst([](auto& p) { return p.axioms; }),
        kDefaultTolerance);
  {
    double least = std::numeric_limits<double>::infinity();
    for (const auto& p : rep.points) least = std::min(least, p.abs_det_g);
    rep.checks.push_back({"nondegenerate", "|det g| stays above the degeneracy threshold", least, ">",
                          kDegeneracyThreshold, least > kDegeneracyThreshold});
  }
  below("well_adapted.residual", "least-squares residual of the adapted and torsion constraints",
        worst([](auto& p) { return p.well_residual; }));
  rep.checks.push_back({"well_adapted.nullspace", "well-adapted connection is unique",
                        worst([](auto& p) { return p.well_nullspace; }), "==", 0.0,
                        worst([](auto& p) { return p.well_nullspace; }) == 0.0});
  below("well_adapted.parallel", "nabla^w J = 0 and nabla^w g = 0",
        worst([](auto& p) { return std::max(p.well_nabla_J, p.well_nabla_g); }));
  below("well_adapted.torsion_identity", "well-adapted torsion identity evaluated directly",
        worst([](auto& p) { return p.torsion_identity; }));
  below("well_adapted.trace", "trace(S o i_Y o T^w) = 0 over the adjoint basis", worst([](auto& p) { return p.trace_condition; }));
  below("first_canonical.parallel", "nabla^0 J = 0 and nabla^0 g = 0",
        worst([](auto& p) { return std::max(p.canonical_nabla_J, p.canonical_nabla_g); }));

  bool kaehler_iff = true;
  rep.kaehler_type = true;
  for (const auto& p : rep.points) {
    if (p.error) continue;
    if ((p.levi_nabla_J <= tol) != (p.well_vs_levi <= tol)) kaehler_iff = false;
    if (p.levi_nabla_J > tol) rep.kaehler_type = false;
  }
  rep.checks.push_back({"kaehler.coincidence", "nabla^g J = 0 iff well-adapted equals Levi-Civita, pointwise",
                        worst([](auto& p) { return p.well_vs_levi; }), "iff", tol, kaehler_iff});

  if (m.alpha() * m.epsilon() == -1) {
    below("chern.residual", "least-squares residual of the Chern system",
          worst([](auto& p) { return p.chern_residual.value_or(0.0); }));
    const double cn = worst([](auto& p) { return static_cast<double>(p.chern_nullspace.value_or(0)); });
    rep.checks.push_back({"chern.nullspace", "Chern connection is unique", cn, "==", 0.0, cn == 0.0});
    below("chern.torsion", "T^c(JX, JY) = alpha T^c(X, Y)", worst([](auto& p) { return p.chern_torsion.value_or(0.0); }));
    if (m.alpha() == 1)
      below("chern.mixed_torsion", "T^c vanishes on (T+, T-) pairs", worst([](auto& p) { return p.mixed_torsion.value_or(0.0); }));
    bool iff = true;
    for (const auto& p : rep.points)
      if (!p.error && ((*p.well_vs_chern <= tol) != (*p.well_vs_canonical <= tol))) iff = false;
    rep.checks.push_back({"chern.coincidence", "well-adapted equals Chern iff it equals first canonical, pointwise",
                          worst([](auto& p) { return p.well_vs_chern.value_or(0.0); }), "iff", tol, iff});
  } else if (m.alpha() == 1 && m.epsilon() == 1) {
    double least = std::numeric_limits<double>::infinity();
    for (const auto& p : rep.points)
      least = std::min(least, static_cast<double>(p.chern_probe_nullspace.value_or(0)));
    rep.checks.push_back({"chern_probe.nullspace", "the Chern-type torsion condition leaves adapted connections non-unique",
                          least, ">", 0.0, least > 0.0});
  }
  return rep;
}

}  // namespace jmetric
