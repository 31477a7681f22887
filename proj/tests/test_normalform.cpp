#include "symhorn/normalform.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace symhorn;
using testutil::torus_form;

namespace {

Matrix normal_form_matrix(const std::vector<double>& lam) { return torus_form(lam); }

double residual_against(const NormalFormResult& nf, const Matrix& H) {
  const int n = nf.S.n();
  const auto lam = nf.frequencies.lambdas();
  Matrix D = Matrix::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) D(j, j) = D(n + j, n + j) = lam[j];
  return (nf.S.matrix().transpose() * H * nf.S.matrix() - D).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("williamson closed forms") {
  SUBCASE("identity: unit frequencies, orthogonal symplectic diagonalizer") {
    const auto nf = williamson(QuadraticHamiltonian(Matrix::Identity(6, 6)));
    for (double l : nf.frequencies.lambdas()) CHECK(l == doctest::Approx(1.0));
    const Matrix& S = nf.S.matrix();
    CHECK((S.transpose() * S - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(nf.residual < 1e-10);
  }

  SUBCASE("n=1 diag(a,b): lambda = sqrt(ab)") {
    Matrix H(2, 2);
    H << 3, 0, 0, 12;
    const auto nf = williamson(QuadraticHamiltonian(H));
    CHECK(nf.frequencies.lambdas()[0] == doctest::Approx(6.0));
    CHECK(nf.residual < 1e-10);
  }

  SUBCASE("round trip: conjugated lambda=(1,2) recovered") {
    const Matrix D = normal_form_matrix({1, 2});
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      Rng rng(seed);
      const auto S = random_symplectic(2, 0.6, rng);
      const Matrix H = S.matrix().transpose() * D * S.matrix();
      const auto nf = williamson(QuadraticHamiltonian(H));
      const auto lam = nf.frequencies.lambdas();
      CHECK(lam[0] == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(lam[1] == doctest::Approx(2.0).epsilon(1e-8));
      CHECK(residual_against(nf, H) <= 1e-8 * H.cwiseAbs().maxCoeff());
    }
  }

  SUBCASE("rejects indefinite input") {
    Matrix H(2, 2);
    H << 1, 0, 0, -1;
    CHECK_THROWS_AS(williamson(QuadraticHamiltonian(H)), PreconditionError);
  }
}

TEST_CASE("frequency map properties") {
  SUBCASE("F(I) = (1,...,1)") {
    const auto f = frequency_map_F(QuadraticHamiltonian(Matrix::Identity(8, 8)));
    for (int i = 0; i < f.size(); ++i) CHECK(f(i) == doctest::Approx(1.0));
  }

  SUBCASE("F(cH) = c F(H)") {
    Rng rng(5);
    const Matrix H = testutil::random_pd(3, rng);
    const auto f1 = frequency_map_F(QuadraticHamiltonian(H));
    const auto f2 = frequency_map_F(QuadraticHamiltonian(Matrix(2.5 * H)));
    for (int i = 0; i < f1.size(); ++i)
      CHECK(f2(i) == doctest::Approx(2.5 * f1(i)).epsilon(1e-10));
  }

  SUBCASE("symplectic invariance over 100 random conjugations") {
    Rng rng(9);
    const Matrix H = testutil::random_pd(2, rng);
    const auto f0 = frequency_map_F(QuadraticHamiltonian(H));
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      Rng r(seed);
      const auto S = random_symplectic(2, 0.4, r);
      const auto f = frequency_map_F(
          QuadraticHamiltonian(S.matrix().transpose() * H * S.matrix()));
      for (int i = 0; i < f.size(); ++i)
        CHECK(f(i) == doctest::Approx(f0(i)).epsilon(1e-8));
    }
  }

  SUBCASE("F equals sorted |Im| of the spectrum for positive definite H") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Rng rng(seed);
      const int n = 1 + int(seed % 3);
      const QuadraticHamiltonian H(testutil::random_pd(n, rng));
      const auto f = frequency_map_F(H);
      auto z = spectrum(H);
      std::vector<double> ims;
      for (const auto& v : z)
        if (v.imag() > 0) ims.push_back(v.imag());
      std::sort(ims.begin(), ims.end());
      REQUIRE(int(ims.size()) == n);
      for (int i = 0; i < n; ++i) CHECK(f(i) == doctest::Approx(ims[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("normal_form: signed cases") {
  SUBCASE("negative definite torus form is already normal") {
    const auto nf = normal_form(QuadraticHamiltonian(normal_form_matrix({-2, -1})));
    const auto lam = nf.frequencies.lambdas();
    CHECK(lam[0] == doctest::Approx(-2.0));
    CHECK(lam[1] == doctest::Approx(-1.0));
    for (const auto& e : nf.frequencies.entries) CHECK(e.krein_sign == -1);
  }

  SUBCASE("mixed-sign round trip, lambda=(-1,2)") {
    const Matrix D = normal_form_matrix({-1, 2});
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      Rng rng(seed);
      const auto S = random_symplectic(2, 0.5, rng);
      const Matrix H = S.matrix().transpose() * D * S.matrix();
      const auto nf = normal_form(QuadraticHamiltonian(H));
      const auto lam = nf.frequencies.lambdas();
      CHECK(lam[0] == doctest::Approx(-1.0).epsilon(1e-7));
      CHECK(lam[1] == doctest::Approx(2.0).epsilon(1e-7));
      CHECK(residual_against(nf, H) <= 1e-7 * H.cwiseAbs().maxCoeff());
      // the diagonalizer reconstructs H
      const Matrix Sinv = nf.S.inverse();
      const auto lam_d = nf.frequencies.lambdas();
      Matrix Dn = Matrix::Zero(4, 4);
      for (int j = 0; j < 2; ++j) Dn(j, j) = Dn(2 + j, 2 + j) = lam_d[j];
      const Matrix Hrec = Sinv.transpose() * Dn * Sinv;
      CHECK((Hrec - H).cwiseAbs().maxCoeff() < 1e-7 * H.cwiseAbs().maxCoeff());
    }
  }

  SUBCASE("resonant mixed signs rejected with the violated condition named") {
    try {
      normal_form(QuadraticHamiltonian(normal_form_matrix({1, -1})));
      FAIL("expected PreconditionError");
    } catch (const PreconditionError& e) {
      CHECK(std::string(e.what()).find("not strongly stable") != std::string::npos);
    }
  }

  SUBCASE("repeated frequencies: reported quantities stay well defined") {
    const Matrix D = normal_form_matrix({2, 2, 5});
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng rng(seed);
      const auto S = random_symplectic(3, 0.4, rng);
      const Matrix H = S.matrix().transpose() * D * S.matrix();
      const auto nf = normal_form(QuadraticHamiltonian(H));
      const auto lam = nf.frequencies.lambdas();
      CHECK(lam[0] == doctest::Approx(2.0).epsilon(1e-7));
      CHECK(lam[1] == doctest::Approx(2.0).epsilon(1e-7));
      CHECK(lam[2] == doctest::Approx(5.0).epsilon(1e-7));
    }
  }
}

TEST_CASE("invariant complex structure") {
  const Matrix J2 = standard_J(2);

  SUBCASE("H = I fixes the standard structure") {
    const auto cc = invariant_complex_structure(QuadraticHamiltonian(Matrix::Identity(4, 4)));
    CHECK((cc.J0 - J2).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("torus elements fix the standard structure") {
    for (const auto& lam : std::vector<std::vector<double>>{{1, 2}, {-3, -1}, {-1, 2}}) {
      const QuadraticHamiltonian H(normal_form_matrix(lam));
      // block computation oracle: A commutes with J_std for torus elements
      const Matrix A = H.generator();
      REQUIRE((A * J2 - J2 * A).cwiseAbs().maxCoeff() < 1e-14);
      const auto cc = invariant_complex_structure(H);
      CHECK((cc.J0 - J2).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  SUBCASE("invariants: square, metric, commutation") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      Rng rng(seed);
      const auto S = random_symplectic(2, 0.5, rng);
      const Matrix H = S.matrix().transpose() * normal_form_matrix({-1, 3}) * S.matrix();
      const auto cc = invariant_complex_structure(QuadraticHamiltonian(H));
      CHECK(cc.square_residual < 1e-8);
      CHECK(cc.commute_residual < 1e-8);
      CHECK(cc.metric_min_eig > 0);
    }
  }

  SUBCASE("uniqueness: independent randomized runs agree") {
    Rng rng(3);
    const auto S = random_symplectic(2, 0.5, rng);
    const Matrix H = S.matrix().transpose() * normal_form_matrix({1, 2}) * S.matrix();
    const QuadraticHamiltonian qh(H);
    const auto a = invariant_complex_structure(qh, 101);
    const auto b = invariant_complex_structure(qh, 202);
    CHECK((a.J0 - b.J0).cwiseAbs().maxCoeff() < 1e-7);
  }

  SUBCASE("equivariance: J0(S^T H S) = S^-1 J0(H) S") {
    const QuadraticHamiltonian H(normal_form_matrix({1, 3}));
    const auto base = invariant_complex_structure(H);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Rng rng(seed);
      const auto S = random_symplectic(2, 0.5, rng);
      const auto conj = invariant_complex_structure(conjugate(H, S));
      const Matrix expected = S.inverse() * base.J0 * S.matrix();
      CHECK((conj.J0 - expected).cwiseAbs().maxCoeff() < 1e-7);
    }
  }

  SUBCASE("H positive definite iff all Krein signs +1") {
    Rng rng(12);
    const auto S = random_symplectic(2, 0.5, rng);
    const Matrix Hp = S.matrix().transpose() * normal_form_matrix({1, 2}) * S.matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> se(Hp, Eigen::EigenvaluesOnly);
    CHECK(se.eigenvalues()(0) > 0);
    const Matrix Hm = S.matrix().transpose() * normal_form_matrix({-1, 2}) * S.matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> sm(Hm, Eigen::EigenvaluesOnly);
    CHECK(sm.eigenvalues()(0) < 0);
    const auto nfm = normal_form(QuadraticHamiltonian(Hm));
    bool all_plus = true;
    for (const auto& e : nfm.frequencies.entries) all_plus &= e.krein_sign == 1;
    CHECK(!all_plus);
  }
}
