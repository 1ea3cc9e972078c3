#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "formation/dynamics.hpp"
#include "formation/errors.hpp"
#include "formation/spectral.hpp"

using namespace formation;

TEST_CASE("signature_of") {
  Eigen::MatrixXd H = Eigen::VectorXd::Zero(5).asDiagonal();
  H(0, 0) = 2.0;
  H(1, 1) = -1.0;
  const auto sig = signature_of(H);
  CHECK(sig == Signature{1, 1, 3});

  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(3, 3);
  asym(0, 1) = 1.0;
  try {
    signature_of(asym);
    FAIL("expected not_symmetric");
  } catch (const Error& e) {
    CHECK(e.code() == errc::not_symmetric);
  }
}

TEST_CASE("signatures at the canonical K3 configurations") {
  const auto sys = fixtures::unit_system(fixtures::k3());

  SUBCASE("unit equilateral target: (3,0,3)") {
    const auto sig = signature_of(hessian(sys, fixtures::unit_equilateral()));
    CHECK(sig == Signature{3, 0, 3});
  }

  SUBCASE("line equilibrium: (2,1,3) from blocks {0,6,9} and {0,0,-3}") {
    const auto sig = signature_of(hessian(sys, fixtures::k3_line_equilibrium()));
    CHECK(sig == Signature{2, 1, 3});
  }
}

TEST_CASE("mbif signature decomposition") {
  SUBCASE("strongly rigid equilibrium: every part (1,0,3), total (2n-3,0,3)") {
    const auto sys = fixtures::unit_system(fixtures::k3());
    const auto res = mbif_signature(sys, fixtures::unit_equilateral());
    CHECK(res.per_part.size() == 3);
    for (const auto& s : res.per_part) CHECK(s == Signature{1, 0, 3});
    CHECK(res.total == Signature{3, 0, 3});
  }

  SUBCASE("full line: single part, trivially the direct signature") {
    const auto sys = fixtures::unit_system(fixtures::k3());
    const auto p = fixtures::k3_line_equilibrium();
    const auto res = mbif_signature(sys, p);
    CHECK(res.per_part.size() == 1);
    const auto direct = signature_of(hessian(sys, p));
    CHECK(res.total == direct);
  }

  SUBCASE("crossed-lines equilibrium: matches the 10x10 eigendecomposition") {
    const auto sys = fixtures::unit_system(fixtures::five_vertex());
    const auto p = fixtures::five_vertex_crossed_lines_equilibrium();
    REQUIRE(gradient(sys, p).norm() <= 1e-13);  // exact analytic equilibrium
    const auto res = mbif_signature(sys, p);
    const auto direct = signature_of(hessian(sys, p));
    CHECK(res.total.n_plus == direct.n_plus);
    CHECK(res.total.n_minus == direct.n_minus);
    CHECK(direct == Signature{5, 2, 3});
    CHECK(res.per_part.size() == 3);
  }
}

TEST_CASE("congruence construction") {
  SUBCASE("K3 target: Lambda = diag(0,0,0,4,4,4)") {
    const auto sys = fixtures::unit_system(fixtures::k3());
    const auto p = fixtures::unit_equilateral();
    const auto part = independent_partition(sys.graph, p);
    const auto con = congruence_matrices(sys, p, part);
    std::vector<double> diag(con.lambda.data(), con.lambda.data() + 6);
    std::sort(diag.begin(), diag.end());
    for (int i = 0; i < 3; ++i) CHECK(std::abs(diag[static_cast<std::size_t>(i)]) <= 1e-12);
    for (int i = 3; i < 6; ++i)
      CHECK(diag[static_cast<std::size_t>(i)] == doctest::Approx(4.0).epsilon(1e-10));
  }

  SUBCASE("congruence identity and Sylvester consistency at equilibria") {
    for (const auto& [sys, p] :
         {std::pair{fixtures::unit_system(fixtures::k3()), fixtures::unit_equilateral()},
          std::pair{fixtures::unit_system(fixtures::k3()), fixtures::k3_line_equilibrium()},
          std::pair{fixtures::unit_system(fixtures::five_vertex()),
                    fixtures::five_vertex_crossed_lines_equilibrium()}}) {
      const auto part = independent_partition(sys.graph, p);
      const auto con = congruence_matrices(sys, p, part);
      const auto H = hessian(sys, p);
      const Eigen::MatrixXd lhs = con.W.transpose() * H * con.W;
      const Eigen::MatrixXd Lambda = con.lambda.asDiagonal();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
      const double hnorm = es.eigenvalues().cwiseAbs().maxCoeff();
      CHECK((lhs - Lambda).cwiseAbs().maxCoeff() <= 1e-6 * hnorm);

      // First three diagonal entries are the orbit zeros.
      for (int i = 0; i < 3; ++i) CHECK(std::abs(con.lambda[i]) <= 1e-12);

      const auto sig_lambda = signature_of(Lambda);
      const auto sig_direct = signature_of(H);
      CHECK(sig_lambda == sig_direct);
    }
  }

  SUBCASE("rejects non-equilibrated parts") {
    const auto sys = fixtures::unit_system(fixtures::k3());
    const Configuration p{{{0.0, 0.0}, {1.7, 0.0}, {0.4, 1.2}}};
    const auto part = independent_partition(sys.graph, p);
    try {
      congruence_matrices(sys, p, part);
      FAIL("expected sub_equilibrium_violated");
    } catch (const Error& e) {
      CHECK(e.code() == errc::sub_equilibrium_violated);
    }
  }
}

TEST_CASE("line matrices") {
  const auto sys = fixtures::unit_system(fixtures::k3());

  SUBCASE("values and spectra at the line fixture") {
    const auto lm = line_matrices(sys, fixtures::k3_line_equilibrium());

    Eigen::Matrix3d expected_F;
    expected_F << -2.0, 1.0, 1.0, 1.0, -0.5, -0.5, 1.0, -0.5, -0.5;
    CHECK((lm.F - expected_F).cwiseAbs().maxCoeff() <= 1e-12);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ef(lm.F);
    CHECK(ef.eigenvalues()[0] == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(std::abs(ef.eigenvalues()[1]) <= 1e-12);
    CHECK(std::abs(ef.eigenvalues()[2]) <= 1e-12);

    CHECK(lm.D(0, 0) == doctest::Approx(6.0));
    CHECK(lm.D(1, 1) == doctest::Approx(4.5));
    CHECK(lm.D(2, 2) == doctest::Approx(4.5));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(lm.D);
    CHECK(std::abs(ed.eigenvalues()[0]) <= 1e-12);
    CHECK(ed.eigenvalues()[1] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(ed.eigenvalues()[2] == doctest::Approx(9.0).epsilon(1e-12));
  }

  SUBCASE("zero row sums at machine precision, D has no negative eigenvalues") {
    std::mt19937_64 rng(71);
    const auto g5 = fixtures::five_vertex();
    const auto sys5 = fixtures::unit_system(g5);
    for (int rep = 0; rep < 10; ++rep) {
      Configuration p;
      const double angle = oracles::uniform(rng, 0, 2 * M_PI);
      const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
      const Eigen::Vector2d off(oracles::uniform(rng, -1, 1),
                                oracles::uniform(rng, -1, 1));
      for (int i = 0; i < 5; ++i)
        p.points.push_back(off + (0.4 * (i + 1) + 0.05 * (i % 2)) * dir);
      const auto lm = line_matrices(sys5, p);
      const double scale_d = std::max(1.0, lm.D.cwiseAbs().maxCoeff());
      const double scale_f = std::max(1.0, lm.F.cwiseAbs().maxCoeff());
      CHECK((lm.D * Eigen::VectorXd::Ones(5)).cwiseAbs().maxCoeff() <=
            1e-14 * scale_d);
      CHECK((lm.F * Eigen::VectorXd::Ones(5)).cwiseAbs().maxCoeff() <=
            1e-14 * scale_f);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(lm.D);
      CHECK(ed.eigenvalues()[0] >= -1e-12);
    }
  }

  SUBCASE("the rotation is performed internally") {
    const auto rotated_fixture = apply_motion(
        RigidMotion::from_angle(0.77, {0.3, -0.4}), fixtures::k3_line_equilibrium());
    const auto lm = line_matrices(sys, rotated_fixture);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ef(lm.F);
    CHECK(ef.eigenvalues()[0] == doctest::Approx(-3.0).epsilon(1e-10));
    // Rotated output really lies on the first coordinate.
    double spread = 0.0;
    for (const auto& x : lm.rotated.points)
      spread = std::max(spread, std::abs(x.y() - lm.rotated.points[0].y()));
    CHECK(spread <= 1e-9);
  }

  SUBCASE("rejects non-line input") {
    CHECK_THROWS_AS(line_matrices(sys, fixtures::unit_equilateral()), Error);
  }
}

TEST_CASE("every line equilibrium has a descent direction in F") {
  // Flow collinear seeds to line equilibria for several sizes and check
  // N_-(F) >= 1 each time.
  std::mt19937_64 rng(77);
  for (int n : {3, 4, 5}) {
    const auto sys = fixtures::unit_system(fixtures::strip(n));
    for (int rep = 0; rep < 3; ++rep) {
      Configuration seed;
      std::vector<double> ts;
      for (int i = 0; i < n; ++i)
        ts.push_back(-1.5 + 3.0 * (i + 0.3 * oracles::uniform(rng, 0, 1)) / n);
      for (double t : ts) seed.points.emplace_back(t, 0.0);
      const auto eq = find_equilibrium(sys, seed);
      REQUIRE(collinear(eq.points));
      const auto lm = line_matrices(sys, eq);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ef(lm.F);
      CHECK(ef.eigenvalues()[0] < -1e-8);
    }
  }
}

TEST_CASE("system reduction") {
  const auto sys = fixtures::unit_system(fixtures::k3());
  const auto p = fixtures::k3_line_equilibrium();

  SUBCASE("removing the outer agent of the line fixture") {
    const auto red = reduce_system(sys, p, 3);
    CHECK(red.vertex_map == std::vector<int>{1, 2});
    CHECK(red.anchor_edge == Edge{1, 2});
    // Required gain value 1 at d = 1/sqrt(2) forces kappa = -1.
    CHECK(red.kappa == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_FALSE(red.gain_monotone);
    // p* is an equilibrium of the reduced system, matching Lemma-style
    // equivalence with the full equilibrium.
    CHECK(gradient(red.system, red.p_star).norm() <= 1e-12);
  }

  SUBCASE("zero required gain leaves the law untouched") {
    // Collinear placement with both removed-vertex edges at target length.
    const Configuration q{{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}};
    const auto red = reduce_system(sys, q, 2);
    CHECK(red.kappa == doctest::Approx(0.0));
    CHECK(red.gain_monotone);
    // Neither q nor q* is an equilibrium; the biconditional holds with both
    // sides false.
    CHECK(gradient(sys, q).norm() > 1e-3);
    CHECK(gradient(red.system, red.p_star).norm() > 1e-3);
  }

  SUBCASE("non-aligned triple is rejected") {
    try {
      reduce_system(sys, fixtures::unit_equilateral(), 3);
      FAIL("expected precondition_not_aligned");
    } catch (const Error& e) {
      CHECK(e.code() == errc::precondition_not_aligned);
    }
  }

  SUBCASE("non-equilibrated vertex is rejected") {
    const Configuration q{{{0.0, 0.0}, {1.0, 0.0}, {2.5, 0.0}}};
    try {
      reduce_system(sys, q, 2);
      FAIL("expected precondition_not_equilibrated_vertex");
    } catch (const Error& e) {
      CHECK(e.code() == errc::precondition_not_equilibrated_vertex);
    }
  }

  SUBCASE("gain undefined when the anchor sits at its target") {
    // Bespoke targets put the anchor edge (2,3) exactly at its target length
    // while the removed middle vertex still requires a nonzero gain value.
    const double s = 1.0 / std::sqrt(2.0);
    const auto bespoke = build_system(fixtures::k3(), {1.0, 1.0, 2 * s});
    const Configuration q{{{0.0, 0.0}, {-s, 0.0}, {s, 0.0}}};
    try {
      reduce_system(bespoke, q, 1);
      FAIL("expected gain_undefined");
    } catch (const Error& e) {
      CHECK(e.code() == errc::gain_undefined);
    }
  }

  SUBCASE("crossed-lines equilibrium: reduction in both directions") {
    const auto sys5 = fixtures::unit_system(fixtures::five_vertex());
    const auto p5 = fixtures::five_vertex_crossed_lines_equilibrium();
    const auto red = reduce_system(sys5, p5, 1);
    CHECK(gradient(red.system, red.p_star).norm() <= 1e-10);

    // Perturb part {3,4,5} away from equilibrium while vertex 1 stays
    // equilibrated: the reduced system must mirror the non-equilibrium.
    Configuration q5 = p5;
    q5.points[4] += 0.07 * (q5.points[4] - q5.points[2]);
    REQUIRE(gradient(sys5, q5).norm() > 1e-3);
    const auto red2 = reduce_system(sys5, q5, 1);
    CHECK(gradient(red2.system, red2.p_star).norm() > 1e-3);
  }
}

TEST_CASE("orbit classification") {
  const auto sys = fixtures::unit_system(fixtures::k3());

  SUBCASE("target configurations are exponentially stable") {
    for (const auto& p : enumerate_target_orbits(sys)) {
      const auto cls = classify_orbit(sys, p);
      CHECK(cls.stability == StabilityClass::exponentially_stable);
      CHECK(cls.signature == Signature{3, 0, 3});
      CHECK(cls.predicates.strongly_rigid);
    }
  }

  SUBCASE("line equilibrium is unstable with one negative direction") {
    const auto cls = classify_orbit(sys, fixtures::k3_line_equilibrium());
    CHECK(cls.stability == StabilityClass::unstable);
    CHECK(cls.signature.n_minus == 1);
    CHECK_FALSE(cls.predicates.strongly_rigid);
  }

  SUBCASE("non-equilibria are rejected") {
    const Configuration q{{{0.0, 0.0}, {1.4, 0.0}, {0.4, 0.9}}};
    try {
      classify_orbit(sys, q);
      FAIL("expected not_an_equilibrium");
    } catch (const Error& e) {
      CHECK(e.code() == errc::not_an_equilibrium);
    }
  }
}

TEST_CASE("target orbit enumeration") {
  SUBCASE("K3: the two mirror placements of vertex 3") {
    const auto sys = fixtures::unit_system(fixtures::k3());
    const auto orbits = enumerate_target_orbits(sys);
    REQUIRE(orbits.size() == 2);
    CHECK((orbits[0].points[2] - Eigen::Vector2d(0.5, std::sqrt(3.0) / 2)).norm() <=
          1e-14);
    CHECK((orbits[1].points[2] - Eigen::Vector2d(0.5, -std::sqrt(3.0) / 2)).norm() <=
          1e-14);
    CHECK_FALSE(same_orbit(orbits[0], orbits[1], 1e-6));
  }

  SUBCASE("five-vertex system: 8 pairwise non-congruent stable targets") {
    const auto sys = fixtures::unit_system(fixtures::five_vertex());
    const auto orbits = enumerate_target_orbits(sys);
    REQUIRE(orbits.size() == 8);
    for (std::size_t a = 0; a < orbits.size(); ++a) {
      const auto lengths = edge_lengths(sys.graph, orbits[a]);
      for (int e = 0; e < lengths.size(); ++e)
        CHECK(std::abs(lengths[e] - 1.0) <= 1e-12);
      for (std::size_t b = a + 1; b < orbits.size(); ++b)
        CHECK_FALSE(same_orbit(orbits[a], orbits[b], 1e-6));
      CHECK(classify_orbit(sys, orbits[a]).stability ==
            StabilityClass::exponentially_stable);
    }
  }
}

TEST_CASE("subsystem equilibrium check") {
  SUBCASE("strongly rigid target") {
    const auto sys = fixtures::unit_system(fixtures::k3());
    const auto part = independent_partition(sys.graph, fixtures::unit_equilateral());
    CHECK(subsystem_equilibrium_check(sys, fixtures::unit_equilateral(), part));
  }

  SUBCASE("line equilibrium: the single part is the whole system") {
    const auto sys = fixtures::unit_system(fixtures::k3());
    const auto p = fixtures::k3_line_equilibrium();
    const auto part = independent_partition(sys.graph, p);
    REQUIRE(part.size() == 1);
    CHECK(subsystem_equilibrium_check(sys, p, part));
  }

  SUBCASE("crossed-lines equilibrium: all three parts equilibrated") {
    const auto sys = fixtures::unit_system(fixtures::five_vertex());
    const auto p = fixtures::five_vertex_crossed_lines_equilibrium();
    const auto part = independent_partition(sys.graph, p);
    REQUIRE(part.size() == 3);
    CHECK(subsystem_equilibrium_check(sys, p, part));
  }

  SUBCASE("rejects non-equilibria") {
    const auto sys = fixtures::unit_system(fixtures::k3());
    const Configuration q{{{0.0, 0.0}, {1.9, 0.0}, {0.3, 1.1}}};
    const auto part = independent_partition(sys.graph, q);
    CHECK_THROWS_AS(subsystem_equilibrium_check(sys, q, part), Error);
  }
}
