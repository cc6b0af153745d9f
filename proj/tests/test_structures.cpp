#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "jmetric/catalog.hpp"
#include "jmetric/frame.hpp"
#include "jmetric/lie_algebra.hpp"
#include "jmetric/sampling.hpp"
#include "jmetric/structure.hpp"
#include "support.hpp"

using namespace jmetric;

namespace {

Point zero4() { return Point::Zero(4); }

Eigen::MatrixXd standard_complex(Eigen::Index n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.bottomLeftCorner(n, n).setIdentity();
  J.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return J;
}

}  // namespace

TEST_CASE("flat catalog entries validate exactly", "[structures]") {
  const auto pts = halton_points(unit_box(4), 10);
  const auto r1 = validate_structure(load_example("flat_hermitian").manifold, pts);
  CHECK(r1.passed);
  CHECK(r1.j_squared == 0.0);
  CHECK(r1.compatibility == 0.0);
  const auto r2 = validate_structure(load_example("flat_norden").manifold, pts);
  CHECK(r2.passed);
  CHECK(r2.nondegeneracy == Catch::Approx(1.0));
  CHECK_THROWS_AS(validate_structure(load_example("flat_norden").manifold, {}), Error);
}

TEST_CASE("curved hermitian validates to rounding level", "[structures]") {
  std::mt19937_64 rng(3);
  std::vector<Point> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(testing_support::random_point(rng, 4));
  const auto r = validate_structure(load_example("curved_hermitian").manifold, pts);
  CHECK(r.passed);
  CHECK(r.compatibility < 1e-12);
  CHECK(r.j_squared < 1e-12);
}

TEST_CASE("validation rejects broken structures", "[structures]") {
  const auto& e1 = load_example("flat_hermitian").manifold;
  const auto pts = halton_points(unit_box(4), 3);
  // J = I: J^2 = I but alpha = -1 and trace 4.
  const Manifold bad(4, -1, 1, e1.g(), MatrixField::constant(Eigen::MatrixXd::Identity(4, 4)));
  const auto r = validate_structure(bad, pts);
  CHECK_FALSE(r.passed);
  CHECK(r.j_squared == 2.0);
  CHECK(r.trace == 4.0);
  // Indefinite metric with eps = +1 fails positivity.
  const Manifold indefinite(4, -1, 1, load_example("flat_norden").manifold.g(), e1.J());
  CHECK_FALSE(validate_structure(indefinite, pts).passed);
}

TEST_CASE("averaged metric", "[structures]") {
  const Eigen::MatrixXd J0 = standard_complex(2);
  const MatrixField J = MatrixField::constant(J0);
  const MatrixField I = MatrixField::constant(Eigen::MatrixXd::Identity(4, 4));
  CHECK(eval_matrix(averaged_metric(J, I, 1), zero4()) == Eigen::MatrixXd::Identity(4, 4));

  // Paracomplex J with eps = -1 kills the diagonal blocks: g = 1/2 (I - J I J) = 0 here.
  const Eigen::MatrixXd Jp = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
  const MatrixField JP = MatrixField::constant(Jp);
  const MatrixField g0 = averaged_metric(JP, I, -1);
  CHECK(eval_matrix(g0, zero4()).isZero(0.0));
  const Manifold degenerate(4, 1, -1, g0, JP);
  const auto r = validate_structure(degenerate, halton_points(unit_box(4), 5));
  CHECK_FALSE(r.passed);
  CHECK(r.nondegeneracy <= kDegeneracyThreshold);

  // A single mixed entry gives a rank-deficient off-diagonal block: still degenerate.
  MatrixField h = I;
  h(0, 2) = h(2, 0) = parse_expression("1 + 0.1*x1", 4);
  const MatrixField g1 = averaged_metric(JP, h, -1);
  const Eigen::MatrixXd v = eval_matrix(g1, (Point(4) << 0.5, 0, 0, 0).finished());
  CHECK(v.topLeftCorner(2, 2).isZero(0.0));
  CHECK(v.bottomRightCorner(2, 2).isZero(0.0));
  CHECK(v(0, 2) == Catch::Approx(1.05));
  CHECK_FALSE(validate_structure(Manifold(4, 1, -1, g1, JP), halton_points(unit_box(4), 5)).passed);
}

TEST_CASE("averaged metric is compatible wherever J^2 = alpha I", "[structures][property]") {
  std::mt19937_64 rng(11);
  for (const auto& e : catalog_entries()) {
    const auto& m = e.manifold;
    // Random symmetric polynomial seed metric.
    MatrixField h(4);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = i; j < 4; ++j) h(i, j) = h(j, i) = testing_support::random_expr(rng, 4, 2);
    const MatrixField g = averaged_metric(m.J(), h, m.epsilon());
    for (int k = 0; k < 5; ++k) {
      const Point p = testing_support::random_point(rng, 4);
      const Eigen::MatrixXd J = eval_matrix(m.J(), p);
      const Eigen::MatrixXd G = eval_matrix(g, p);
      const double scale = 1.0 + max_abs(G);
      CHECK(max_abs(J.transpose() * G * J - m.epsilon() * G) < 1e-12 * scale);
    }
  }
}

TEST_CASE("twin metric", "[structures]") {
  const auto& e2 = load_example("flat_norden").manifold;
  const auto t2 = twin_metric(e2, zero4());
  CHECK(t2.symmetry_residual == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t2.metric);
  const auto ev = es.eigenvalues();
  CHECK((ev.array() > 0).count() == 2);
  CHECK((ev.array() < 0).count() == 2);

  const auto t1 = twin_metric(load_example("flat_hermitian").manifold, zero4());
  CHECK(max_abs(t1.metric + t1.metric.transpose()) == 0.0);
  CHECK(t1.symmetry_residual == 2.0 * max_abs(t1.metric));

  const auto& e6 = load_example("curved_product");
  const auto t6 = twin_metric(e6.manifold, halton_points(e6.sample_box, 1, 4)[0]);
  CHECK(t6.symmetry_residual < 1e-12);
}

TEST_CASE("eigenprojectors", "[structures]") {
  const Eigen::MatrixXd Jp = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
  const auto P = eigenprojectors(Jp, 1);
  CHECK(P.plus == Eigen::MatrixXd(Eigen::Vector4d(1, 1, 0, 0).asDiagonal()));
  CHECK(P.minus == Eigen::MatrixXd(Eigen::Vector4d(0, 0, 1, 1).asDiagonal()));
  CHECK_THROWS_AS(eigenprojectors(standard_complex(2), -1), UnsupportedCase);
  CHECK_THROWS_AS(eigenprojectors(load_example("flat_hermitian").manifold, zero4()), UnsupportedCase);

  for (const char* name : {"curved_para_hermitian", "curved_product"}) {
    const auto& e = load_example(name);
    for (const auto& p : halton_points(e.sample_box, 5)) {
      const auto Q = eigenprojectors(e.manifold, p);
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
      CHECK(max_abs(Q.plus + Q.minus - I) < 1e-15);
      CHECK(max_abs(Q.plus * Q.minus) < 1e-12);
      CHECK(max_abs(Q.plus * Q.plus - Q.plus) < 1e-12);
      CHECK(rank_info(Q.plus).rank == 2);
      CHECK(rank_info(Q.minus).rank == 2);
    }
  }
}

TEST_CASE("adapted frames of the flat examples", "[structures]") {
  const auto& e1 = load_example("flat_hermitian").manifold;
  const Frame f1 = adapted_frame(e1, zero4());
  CHECK(f1.columns == Eigen::MatrixXd::Identity(4, 4));
  const Coframe c1 = dual_frame(e1, f1);
  CHECK(c1.rows == Eigen::MatrixXd::Identity(4, 4));

  const auto& e2 = load_example("flat_norden").manifold;
  const Frame f2 = adapted_frame(e2, zero4());
  const Eigen::MatrixXd g = eval_matrix(e2.g(), zero4());
  const Eigen::MatrixXd J = eval_matrix(e2.J(), zero4());
  const Eigen::MatrixXd X = f2.columns.leftCols(2), Y = f2.columns.rightCols(2);
  CHECK(max_abs(X.transpose() * g * X) < 1e-9);
  CHECK(max_abs(Y.transpose() * g * Y) < 1e-9);
  CHECK(max_abs(X.transpose() * g * Y - Eigen::MatrixXd::Identity(2, 2)) < 1e-9);
  CHECK(max_abs(J * X - Y) < 1e-9);

  const auto& e3 = load_example("curved_para_hermitian").manifold;
  const Frame f3 = adapted_frame(e3, zero4());
  CHECK(eval_matrix(e3.g(), zero4()) == normal_form(2, -1));
  CHECK(max_abs(f3.columns - Eigen::MatrixXd::Identity(4, 4)) < 1e-12);
}

TEST_CASE("adapted frames realise the normal form everywhere", "[structures][property]") {
  for (const auto& e : catalog_entries()) {
    const auto& m = e.manifold;
    for (const auto& p : halton_points(e.sample_box, 12, 3)) {
      const Frame f = adapted_frame(m, p);
      const Eigen::MatrixXd g = eval_matrix(m.g(), p);
      const Eigen::MatrixXd J = eval_matrix(m.J(), p);
      INFO(e.name);
      CHECK(frame_residual(g, J, m.alpha(), m.epsilon(), f) < 1e-9);
      const Coframe c = dual_frame(m, f);
      CHECK(c.duality_residual < 1e-10);
      CHECK(c.inverse_residual < 1e-10);
    }
  }
}

TEST_CASE("dual frame of a non-adapted frame reports the violation", "[structures]") {
  const auto& e2 = load_example("flat_norden").manifold;
  Frame f;
  f.point = zero4();
  f.columns = Eigen::MatrixXd::Identity(4, 4);  // not adapted: g(X_i, Y_j) = 0
  const Coframe c = dual_frame(e2, f);
  CHECK(c.duality_residual > 1e-9);
  f.columns.col(0).setZero();
  CHECK_THROWS_AS(dual_frame(e2, f), SingularError);
}

TEST_CASE("frame construction reports breakdown", "[structures]") {
  const Eigen::MatrixXd J = standard_complex(2);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
  CHECK_THROWS_AS(adapted_frame(g, J, -1, 1, zero4()), FrameError);
  CHECK_THROWS_AS(adapted_frame(g, J, -1, -1, zero4()), FrameError);
}

TEST_CASE("adjoint basis", "[structures][property]") {
  const std::map<std::pair<int, int>, std::size_t> expected = {{{-1, 1}, 4}, {{-1, -1}, 2}, {{1, 1}, 2}, {{1, -1}, 4}};
  for (const auto& e : catalog_entries()) {
    const auto& m = e.manifold;
    for (const auto& p : halton_points(e.sample_box, 5, 17)) {
      const Frame f = adapted_frame(m, p);
      const auto basis = adjoint_basis(m, f);
      INFO(e.name);
      REQUIRE(basis.size() == expected.at({m.alpha(), m.epsilon()}));
      const Eigen::MatrixXd g = eval_matrix(m.g(), p);
      const Eigen::MatrixXd J = eval_matrix(m.J(), p);
      for (const auto& S : basis) CHECK(is_adjoint_section(g, J, S, 1e-9));
      CHECK(rank_info(vectorize(basis)).rank == static_cast<Eigen::Index>(basis.size()));
      // In frame coordinates each element lies in the structure algebra.
      const Eigen::MatrixXd F = f.columns;
      for (const auto& S : basis)
        CHECK(membership_residual(F.inverse() * S * F, structure_family(m.alpha(), m.epsilon()), Level::algebra) < 1e-9);
    }
  }
}

TEST_CASE("adjoint section predicate", "[structures]") {
  const auto& e1 = load_example("flat_hermitian").manifold;
  const Eigen::MatrixXd J = eval_matrix(e1.J(), zero4());
  CHECK(is_adjoint_section(e1, zero4(), J));
  CHECK_FALSE(is_adjoint_section(e1, zero4(), Eigen::MatrixXd::Identity(4, 4)));
  const auto& e4 = load_example("curved_hermitian");
  const Point p = halton_points(e4.sample_box, 1, 5)[0];
  for (const auto& S : adjoint_basis(e4.manifold, adapted_frame(e4.manifold, p)))
    CHECK(is_adjoint_section(e4.manifold, p, S));
}
