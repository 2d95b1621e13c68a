#include <doctest.h>

#include <thread>

#include <Eigen/LU>

#include "hodlr/dense_oracle.hpp"
#include "hodlr/factorization.hpp"
#include "hodlr/generators.hpp"
#include "test_helpers.hpp"

using namespace hodlr;
using test::random_vector;
using test::rel_inf;
using test::unit;

namespace {

template <typename Visit>
void for_each_node(const HMatrix<double>& A, const FactorNode<double>& F,
                   Visit&& visit) {
  if (A.is_leaf()) return;
  visit(A.as_node(), F.node());
  for_each_node(*A.as_node().child1, *F.child1, visit);
  for_each_node(*A.as_node().child2, *F.child2, visit);
}

// [[I, e1 e1^T], [e1 e1^T, I]]: rows 1 and 3 coincide, delta = 1 exactly.
HMatrix<double> capacitance_singular_node(Index k) {
  MatrixXd e = MatrixXd::Zero(2, k);
  e(0, 0) = 1;
  return make_node(make_leaf(MatrixXd::Identity(2, 2)),
                   make_leaf(MatrixXd::Identity(2, 2)), e, e, e, e);
}

}  // namespace

TEST_CASE("setup of the identity produces zero auxiliaries") {
  for (int l : {1, 2, 4}) {
    const auto F = setup(test::identity(2, l, 2));
    int nodes = 0;
    for_each_node(F.matrix(), F.root(), [&](const auto&, const auto& f) {
      ++nodes;
      CHECK(f.C.isZero(0));
      CHECK(f.D.isZero(0));
      CHECK(f.Gamma.isZero(0));
      CHECK(f.Delta.isZero(0));
    });
    CHECK(nodes == (1 << l) - 1);
  }
}

TEST_CASE("setup of the 4x4 tridiagonal") {
  // Oracle: A1 = A2 = [[4,1],[1,4]] inverted densely.
  DenseMatrixXd blk(2, 2);
  blk << 4, 1, 1, 4;
  const auto lu = oracle::dense_lu(blk);
  const VectorXd e1 = unit(2, 0), e2 = unit(2, 1);
  const VectorXd c_ref = oracle::dense_solve_adjoint(lu, e2);
  const VectorXd d_ref = oracle::dense_solve(lu, e1);
  const double gamma_ref = c_ref.dot(e2);
  const double delta_ref = gamma_ref * e1.dot(d_ref);

  // Hand values from the explicit inverse (1/15) [[4,-1],[-1,4]].
  CHECK(c_ref(0) == doctest::Approx(-1.0 / 15).epsilon(1e-15));
  CHECK(c_ref(1) == doctest::Approx(4.0 / 15).epsilon(1e-15));
  CHECK(d_ref(0) == doctest::Approx(4.0 / 15).epsilon(1e-15));
  CHECK(d_ref(1) == doctest::Approx(-1.0 / 15).epsilon(1e-15));
  CHECK(gamma_ref == doctest::Approx(4.0 / 15).epsilon(1e-15));
  CHECK(delta_ref == doctest::Approx(16.0 / 225).epsilon(1e-15));

  const auto F = setup(test::tridiag4());
  const auto& f = F.root().node();
  CHECK((f.C.col(0) - c_ref).cwiseAbs().maxCoeff() <= 1e-16);
  CHECK((f.D.col(0) - d_ref).cwiseAbs().maxCoeff() <= 1e-16);
  CHECK(f.Gamma(0, 0) == doctest::Approx(gamma_ref).epsilon(1e-15));
  CHECK(f.Delta(0, 0) == doctest::Approx(delta_ref).epsilon(1e-15));
  CHECK_FALSE(f.capacitance);
}

TEST_CASE("hierarchical singularity reports the subtree path") {
  SUBCASE("singular leaf under child1") {
    MatrixXd bad(2, 2);
    bad << 1, 1, 1, 1;
    const auto A = make_node(make_leaf(bad), make_leaf(MatrixXd::Identity(2, 2)),
                             unit(2, 0), unit(2, 0), unit(2, 0), unit(2, 0));
    try {
      setup(A);
      FAIL("expected HierarchicalSingularity");
    } catch (const HierarchicalSingularity& e) {
      CHECK(e.path() == "0");
    }
  }
  SUBCASE("near-singular capacitance, rank 1 and rank 2") {
    for (Index k : {1, 2}) {
      const auto good = test::identity(2, 2, k);
      const auto A = make_node(good, make_node(test::identity(2, 1, k),
                                               capacitance_singular_node(k),
                                               MatrixXd::Zero(4, k), MatrixXd::Zero(4, k),
                                               MatrixXd::Zero(4, k), MatrixXd::Zero(4, k)),
                               MatrixXd::Zero(8, k), MatrixXd::Zero(8, k),
                               MatrixXd::Zero(8, k), MatrixXd::Zero(8, k));
      CAPTURE(k);
      try {
        setup(A);
        FAIL("expected HierarchicalSingularity");
      } catch (const HierarchicalSingularity& e) {
        CHECK(e.path() == "11");
      }
    }
  }
  SUBCASE("root") {
    try {
      setup(capacitance_singular_node(1));
      FAIL("expected HierarchicalSingularity");
    } catch (const HierarchicalSingularity& e) {
      CHECK(e.path().empty());
    }
  }
}

TEST_CASE("solve examples") {
  const VectorXd z = (VectorXd(4) << 1, 2, 3, 4).finished();
  const auto I = setup(test::identity(2, 1));
  CHECK(solve(I, z) == z);
  CHECK(solve_adjoint(I, z) == z);

  MatrixXd b(2, 2);
  b << 4, 1, 1, 4;
  const auto L = setup(make_leaf(b));
  const VectorXd x = solve(L, VectorXd::Constant(2, 5.0));
  CHECK(rel_inf(x, VectorXd::Ones(2)) <= 1e-15);

  const auto T = setup(test::tridiag4());
  const auto lu = oracle::dense_lu(to_dense(test::tridiag4()));
  const VectorXd e1 = unit(4, 0);
  CHECK(rel_inf(solve(T, e1), oracle::dense_solve(lu, e1)) <= 1e-13);
  const VectorXd rows = (VectorXd(4) << 5, 6, 6, 5).finished();
  CHECK(rel_inf(solve(T, rows), VectorXd::Ones(4)) <= 1e-15);

  VectorXd short_rhs(3);
  CHECK_THROWS_AS(solve_in_place(T, short_rhs), StructuralError);
  CHECK_THROWS_AS(solve_adjoint_in_place(T, short_rhs), StructuralError);
}

TEST_CASE("solve_adjoint") {
  SUBCASE("symmetric model: adjoint equals forward solve") {
    const auto F = setup(tridiagonal_model(2, 5, 3));
    Xorshift64Star rng(1);
    const VectorXd z = random_vector(rng, F.dim());
    CHECK(rel_inf(solve_adjoint(F, z), solve(F, z)) <= 1e-13);
  }
  SUBCASE("nonsymmetric level-3 instances against the dense transpose solve") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto A = random_regular<double>(2 + Index(seed % 3), 3, 1, seed);
      const auto lu = oracle::dense_lu(to_dense(A));
      const auto F = setup(A);
      Xorshift64Star rng(seed);
      const VectorXd z = random_vector(rng, F.dim());
      CAPTURE(seed);
      CHECK(rel_inf(solve_adjoint(F, z), oracle::dense_solve_adjoint(lu, z)) <= 1e-11);
    }
  }
}

TEST_CASE("property: exactness and oracle equivalence") {
  int cases = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Index n0 = 1 + Index(seed % 4);
    const Index k = Index{1} << (seed / 4 % 3);
    const int l = int(seed % 9);
    const auto A = random_regular<double>(n0, l, k, seed);
    if (A.dim() > 1024) continue;
    ++cases;
    const auto lu = oracle::dense_lu(to_dense(A));
    const auto F = setup(A);
    Xorshift64Star rng(seed + 100);
    const VectorXd z = random_vector(rng, A.dim());
    const VectorXd w = random_vector(rng, A.dim());
    const VectorXd x = solve(F, z);
    const VectorXd y = solve_adjoint(F, w);
    CAPTURE(seed);
    CHECK((matvec(A, x) - z).lpNorm<Eigen::Infinity>() / z.lpNorm<Eigen::Infinity>() <= 1e-11);
    CHECK(rel_inf(x, oracle::dense_solve(lu, z)) <= 1e-9);
    CHECK(rel_inf(y, oracle::dense_solve_adjoint(lu, w)) <= 1e-9);
    CHECK(std::abs(x.dot(w) - z.dot(y)) <= 1e-10 * x.norm() * w.norm());
    // matvec followed by solve recovers the input
    CHECK(rel_inf(solve(F, matvec(A, w)), w) <= 1e-10);
  }
  CHECK(cases >= 40);
}

TEST_CASE("exactness on dims up to 4096") {
  for (int l : {10, 11}) {
    const auto A = tridiagonal_model(2, l, 9);
    const auto F = setup(A);
    Xorshift64Star rng(4);
    const VectorXd z = random_vector(rng, A.dim());
    const VectorXd x = solve(F, z);
    CHECK((matvec(A, x) - z).lpNorm<Eigen::Infinity>() / z.lpNorm<Eigen::Infinity>() <= 1e-11);
  }
  const auto A = random_regular<double>(4, 10, 2, 3);
  const auto F = setup(A);
  Xorshift64Star rng(5);
  const VectorXd z = random_vector(rng, A.dim());
  const VectorXd x = solve(F, z);
  CHECK((matvec(A, x) - z).lpNorm<Eigen::Infinity>() / z.lpNorm<Eigen::Infinity>() <= 1e-11);
}

TEST_CASE("Woodbury correction against the dense Schur complement") {
  // A1 = I, a1 = g e1, a2 = e1 makes Gamma = g, so the lower half of a solve
  // with right-hand side (0, v) is (A2 - g b2 b1^T)^{-1} v.
  Xorshift64Star rng(77);
  int used = 0;
  for (int i = 0; i < 120; ++i) {
    const Index m = 1 + Index(rng() % 64);
    MatrixXd A2(m, m);
    for (Index j = 0; j < A2.size(); ++j) A2.data()[j] = rng.uniform(-1, 1);
    A2.diagonal().array() += A2.cwiseAbs().rowwise().sum().array();
    const VectorXd b1 = random_vector(rng, m), b2 = random_vector(rng, m);
    const VectorXd v = random_vector(rng, m);
    const double g = rng.uniform(-1, 1);
    const auto A2lu = oracle::dense_lu(DenseMatrixXd(A2));
    const double delta = g * b1.dot(oracle::dense_solve(A2lu, b2));
    if (std::abs(1 - delta) < 1e-8) continue;
    ++used;
    const VectorXd ref = oracle::dense_solve(
        oracle::dense_lu(DenseMatrixXd(A2 - g * b2 * b1.transpose())), v);

    const auto F = setup(make_node(make_leaf(MatrixXd::Identity(m, m)),
                                   make_leaf(A2), MatrixXd(g * unit(m, 0)),
                                   MatrixXd(b1), unit(m, 0), MatrixXd(b2)));
    CHECK(F.root().node().Gamma(0, 0) == g);
    VectorXd rhs = VectorXd::Zero(2 * m);
    rhs.tail(m) = v;
    solve_in_place(F, rhs);
    CAPTURE(m);
    CHECK(rel_inf(rhs.tail(m), ref) <= 1e-12);
  }
  CHECK(used >= 100);
}

TEST_CASE("rank-k Woodbury ordering") {
  // (A2 - b2 G b1^T) [A2^{-1} + D G (I - M G)^{-1} b1^T A2^{-1}] = I, M = b1^T D
  Xorshift64Star rng(31);
  for (Index k : {2, 3, 4}) {
    const Index m = 12;
    MatrixXd A2(m, m), b1(m, k), b2(m, k), G(k, k);
    for (auto* X : {&A2, &b1, &b2, &G})
      for (Index j = 0; j < X->size(); ++j) X->data()[j] = rng.uniform(-1, 1);
    A2.diagonal().array() += double(m);
    const MatrixXd A2inv = A2.inverse();
    const MatrixXd D = A2inv * b2;
    const MatrixXd M = b1.transpose() * D;
    const MatrixXd inv = A2inv + D * G * (MatrixXd::Identity(k, k) - M * G).inverse() *
                                     b1.transpose() * A2inv;
    const MatrixXd prod = (A2 - b2 * G * b1.transpose()) * inv;
    CHECK((prod - MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("op counts") {
  SUBCASE("level 0 setup costs one leaf factorization") {
    for (Index n0 : {1, 2, 5}) {
      const auto F = setup(tridiagonal_model(std::max<Index>(n0, 2), 0, 1));
      const Index n = F.dim();
      CHECK(F.setup_ops().total() == PivotedLU<double>::factor_cost(n));
      CHECK(solve_ops(F).total() == 2 * n * n - n);
    }
  }
  SUBCASE("rank-one solve recurrence S_l = 2 S_{l-1} + 12 n_{l-1}") {
    for (Index n0 : {2, 3}) {
      std::int64_t prev = 0, S0 = 0;
      for (int l = 0; l <= 10; ++l) {
        const auto F = setup(tridiagonal_model(n0, l, 2));
        const std::int64_t S = solve_ops(F).total();
        const std::int64_t n = F.dim();
        if (l == 0) S0 = S;
        else CHECK(S == 2 * prev + 12 * (n / 2));
        CHECK(solve_adjoint_ops(F).total() == S);
        // (C0 n0 + 6 l) n with C0 = S0 / n0^2 holds with equality
        CHECK(S * n0 == (S0 + 6 * l * n0) * n);
        prev = S;
      }
    }
  }
  SUBCASE("setup recurrence P_l = 2 P_{l-1} + 2 S_{l-1} + 4 n_{l-1} - 1") {
    std::int64_t P_prev = 0, S_prev = 0;
    for (int l = 0; l <= 10; ++l) {
      const auto F = setup(tridiagonal_model(2, l, 2));
      const std::int64_t P = F.setup_ops().total();
      if (l > 0) CHECK(P == 2 * P_prev + 2 * S_prev + 4 * (F.dim() / 2) - 1);
      P_prev = P;
      S_prev = solve_ops(F).total();
    }
  }
  SUBCASE("counts do not depend on values") {
    const auto F1 = setup(random_regular<double>(3, 4, 2, 1));
    const auto F2 = setup(random_regular<double>(3, 4, 2, 2));
    CHECK(F1.setup_ops() == F2.setup_ops());
    CHECK(solve_ops(F1) == solve_ops(F2));
  }
  SUBCASE("setup storage tally") {
    const auto F = setup(random_regular<double>(2, 3, 2, 1));
    // leaves: 8 blocks of 4; nodes: C and D (m x 2) plus two 2x2 matrices,
    // and a 2x2 capacitance LU per node.
    std::int64_t expect = 8 * 4;
    for (int l = 1; l <= 3; ++l) {
      const std::int64_t nodes = 8 >> l, m = Index{2} << (l - 1);
      expect += nodes * (2 * m * 2 + 3 * 4);
    }
    CHECK(F.setup_ops().storage == expect);
  }
}

TEST_CASE("parallel setup matches serial setup") {
  const auto A = random_regular<double>(3, 6, 2, 5);
  const auto F1 = setup(A);
  const auto F4 = setup(A, SetupOptions{4});
  CHECK(F1.setup_ops() == F4.setup_ops());
  Xorshift64Star rng(2);
  const VectorXd z = random_vector(rng, A.dim());
  CHECK(solve(F1, z) == solve(F4, z));

  MatrixXd bad(3, 3);
  bad.setOnes();
  const auto S = make_node(make_leaf(MatrixXd::Identity(3, 3)), make_leaf(bad),
                           MatrixXd::Zero(3, 1), MatrixXd::Zero(3, 1),
                           MatrixXd::Zero(3, 1), MatrixXd::Zero(3, 1));
  try {
    setup(S, SetupOptions{2});
    FAIL("expected HierarchicalSingularity");
  } catch (const HierarchicalSingularity& e) {
    CHECK(e.path() == "1");
  }
}

TEST_CASE("concurrent solves on one factorization") {
  const auto F = setup(tridiagonal_model(2, 10, 6));
  Xorshift64Star rng(8);
  std::vector<VectorXd> rhs, ref;
  for (int t = 0; t < 4; ++t) {
    rhs.push_back(random_vector(rng, F.dim()));
    ref.push_back(solve(F, rhs.back()));
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&, t] {
      solve_in_place(F, rhs[std::size_t(t)]);
      solve_adjoint_in_place(F, rhs[std::size_t(t)]);
    });
  for (auto& th : pool) th.join();
  for (int t = 0; t < 4; ++t)
    CHECK(rhs[std::size_t(t)] == solve_adjoint(F, ref[std::size_t(t)]));
}

TEST_CASE("float instantiation") {
  const auto A = tridiagonal_model<float>(2, 4, 1);
  const auto F = setup(A);
  const Eigen::VectorXf z = Eigen::VectorXf::Ones(A.dim());
  const Eigen::VectorXf x = solve(F, z);
  CHECK((matvec(A, x) - z).lpNorm<Eigen::Infinity>() <= 1e-5f);
}
