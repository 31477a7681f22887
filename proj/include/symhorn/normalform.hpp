#pragma once

// Symplectic normal forms. A strongly stable H is symplectically congruent
// to sum_j (lambda_j/2)(q_j^2 + p_j^2) with signed coefficients lambda_j;
// for positive-definite H this is the Williamson form and the sorted tuple
// (lambda_1 <= ... <= lambda_n) is the frequency map F. The diagonalizer
// also yields the unique invariant compatible complex structure J0.

#include "symhorn/core.hpp"
#include "symhorn/stability.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace symhorn {

struct NormalFormResult {
  SymplecticTransform S;       // S^T H S = diag(lambda, lambda) in block order
  SignedSpectrum frequencies;  // signed coefficients, nondecreasing
  double residual = 0.0;       // ||S^T H S - normal form||_inf
};

namespace detail {

// Orthogonal reduction of a nonsingular skew-symmetric K to
// Q^T K Q = [[0, D], [-D, 0]] (block order, D positive diagonal).
// Returns Q and the diagonal of D, unsorted.
inline std::pair<Matrix, Vector> skew_block_form(const Matrix& K) {
  const int dim = int(K.rows());
  const int m = dim / 2;
  Eigen::RealSchur<Matrix> schur(K);
  if (schur.info() != Eigen::Success)
    throw NumericalError("skew_block_form: Schur iteration failed");
  Matrix Q = schur.matrixU();
  const Matrix& T = schur.matrixT();
  const double scale = std::max(K.cwiseAbs().maxCoeff(), 1e-300);

  Vector d(m);
  Matrix Qb(dim, dim);
  for (int i = 0; i < m; ++i) {
    double c = T(2 * i, 2 * i + 1);
    if (std::abs(T(2 * i, 2 * i)) > 1e-7 * scale || std::abs(c) < 1e-14 * scale)
      throw NumericalError("skew_block_form: input not reducible to 2x2 blocks "
                           "(singular or non-skew input?)");
    Eigen::VectorXd cq = Q.col(2 * i), cp = Q.col(2 * i + 1);
    if (c < 0) { std::swap(cq, cp); c = -c; }
    d(i) = c;
    Qb.col(i) = cq;
    Qb.col(m + i) = cp;
  }
  return {Qb, d};
}

// Williamson step for positive-definite H against the standard form:
// returns symplectic S with S^T H S = diag(lambda, lambda), lambda ascending.
inline std::pair<Matrix, Vector> williamson_core(const Matrix& H) {
  const int dim = int(H.rows());
  const int n = dim / 2;
  Eigen::SelfAdjointEigenSolver<Matrix> se(H);
  if (se.info() != Eigen::Success)
    throw NumericalError("williamson: eigensolver failed");
  if (se.eigenvalues()(0) <= 0)
    throw PreconditionError("williamson: H is not positive definite");
  const Vector sqrt_ev = se.eigenvalues().cwiseSqrt();
  const Matrix Hs = se.eigenvectors() * sqrt_ev.asDiagonal() * se.eigenvectors().transpose();
  const Matrix Hsi = se.eigenvectors() * sqrt_ev.cwiseInverse().asDiagonal() *
                     se.eigenvectors().transpose();

  const Matrix J = standard_J(n);
  auto [Q, d] = skew_block_form(Hs * J * Hs);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return d(a) < d(b); });

  Matrix S(dim, dim);
  Vector lam(n);
  for (int j = 0; j < n; ++j) {
    const int i = order[j];
    lam(j) = d(i);
    const double r = std::sqrt(d(i));
    S.col(j) = Hsi * Q.col(i) * r;
    S.col(n + j) = Hsi * Q.col(n + i) * r;
  }
  return {S, lam};
}

inline SignedSpectrum spectrum_from_lambdas(const Vector& lam, double max_re = 0.0) {
  SignedSpectrum sp;
  sp.residual_real_part = max_re;
  for (int i = 0; i < lam.size(); ++i) {
    const int sign = lam(i) > 0 ? +1 : (lam(i) < 0 ? -1 : 0);
    if (!sp.entries.empty() && sp.entries.back().lambda == lam(i))
      sp.entries.back().multiplicity += 1;
    else
      sp.entries.push_back({lam(i), sign, 1});
  }
  return sp;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Williamson normal form (positive definite case)
// ---------------------------------------------------------------------------

inline NormalFormResult williamson(const QuadraticHamiltonian& H) {
  Eigen::LLT<Matrix> llt(H.matrix());
  if (llt.info() != Eigen::Success)
    throw PreconditionError("williamson: Cholesky failed, H not positive definite");
  auto [S, lam] = detail::williamson_core(H.matrix());

  const int n = H.n();
  Matrix D = Matrix::Zero(2 * n, 2 * n);
  D.topLeftCorner(n, n) = lam.asDiagonal();
  D.bottomRightCorner(n, n) = lam.asDiagonal();
  const double res = (S.transpose() * H.matrix() * S - D).cwiseAbs().maxCoeff();

  return {SymplecticTransform(std::move(S)), detail::spectrum_from_lambdas(lam), res};
}

// The frequency map: F(H) = (lambda_1 <= ... <= lambda_n) for positive
// definite H; invariant under symplectic congruence.
inline Vector frequency_map_F(const QuadraticHamiltonian& H) {
  auto nf = williamson(H);
  const auto v = nf.frequencies.lambdas();
  return Eigen::Map<const Vector>(v.data(), long(v.size()));
}

// ---------------------------------------------------------------------------
// Signed normal form (general strongly stable case)
// ---------------------------------------------------------------------------

inline NormalFormResult normal_form(const QuadraticHamiltonian& H,
                                    const TolProfile& tol = TolProfile::defaults()) {
  // positive definite inputs take the direct Williamson route
  {
    Eigen::LLT<Matrix> llt(H.matrix());
    if (llt.info() == Eigen::Success) return williamson(H);
  }

  const auto rep = classify(H, tol);
  if (rep.cls != StabilityClass::StronglyStable)
    throw PreconditionError(
        std::string("normal_form: H is not strongly stable (") + to_string(rep.cls) +
        ", min noncompact root " + std::to_string(rep.min_noncompact_root) + ")");

  const int n = H.n();
  const Matrix J = standard_J(n);
  const auto cs = detail::analyze_clusters(H, tol);

  struct Mode {
    double lambda;
    Vector q, p;
  };
  std::vector<Mode> modes;
  modes.reserve(n);

  for (const auto& c : cs.clusters) {
    const int m = c.multiplicity;
    const Matrix& B = c.basis;  // 2n x 2m, spans the invariant subspace

    // normalize the restricted symplectic form to the standard one
    auto [Qb, d] = detail::skew_block_form(B.transpose() * J * B);
    Matrix scale = Matrix::Zero(2 * m, 2 * m);
    for (int i = 0; i < m; ++i) {
      const double r = 1.0 / std::sqrt(d(i));
      scale(i, i) = r;
      scale(m + i, m + i) = r;
    }
    const Matrix B2 = B * Qb * scale;  // B2^T J B2 = J_2m

    Matrix G = B2.transpose() * H.matrix() * B2;
    G = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> se(G, Eigen::EigenvaluesOnly);
    const double lo = se.eigenvalues()(0), hi = se.eigenvalues()(se.eigenvalues().size() - 1);
    int sign;
    if (lo > 0) sign = +1;
    else if (hi < 0) sign = -1;
    else
      throw NumericalError("normal_form: indefinite Krein block escaped classification");

    auto [Ts, lam] = detail::williamson_core(double(sign) * G);
    const Matrix C = B2 * Ts;
    for (int j = 0; j < m; ++j)
      modes.push_back({sign * lam(j), C.col(j), C.col(m + j)});
  }

  if (int(modes.size()) != n)
    throw NumericalError("normal_form: mode count mismatch");

  std::sort(modes.begin(), modes.end(),
            [](const Mode& a, const Mode& b) { return a.lambda < b.lambda; });

  Matrix S(2 * n, 2 * n);
  Vector lam(n);
  for (int j = 0; j < n; ++j) {
    lam(j) = modes[j].lambda;
    S.col(j) = modes[j].q;
    S.col(n + j) = modes[j].p;
  }

  Matrix D = Matrix::Zero(2 * n, 2 * n);
  D.topLeftCorner(n, n) = lam.asDiagonal();
  D.bottomRightCorner(n, n) = lam.asDiagonal();
  const double res = (S.transpose() * H.matrix() * S - D).cwiseAbs().maxCoeff();

  return {SymplecticTransform(std::move(S)),
          detail::spectrum_from_lambdas(lam, rep.max_re), res};
}

// ---------------------------------------------------------------------------
// Invariant compatible complex structure
// ---------------------------------------------------------------------------

struct CompatibleComplexStructure {
  Matrix J0;
  double square_residual = 0.0;   // ||J0^2 + I||_inf
  double commute_residual = 0.0;  // ||J0 A - A J0||_inf / ||A||
  double metric_min_eig = 0.0;    // smallest eigenvalue of J^T J0 (must be > 0)
};

// The unique J-compatible complex structure preserved by the flow of H.
// Computed as J0 = S J S^{-1} from a normal-form diagonalizer; `seed`
// selects a random symplectic change of coordinates before diagonalizing,
// so distinct seeds give independent routes to the same J0.
inline CompatibleComplexStructure invariant_complex_structure(
    const QuadraticHamiltonian& H, std::uint64_t seed = 0,
    const TolProfile& tol = TolProfile::defaults()) {
  const int n = H.n();
  const Matrix J = standard_J(n);

  Matrix S;
  if (seed == 0) {
    S = normal_form(H, tol).S.matrix();
  } else {
    Rng rng(seed);
    const SymplecticTransform R = random_symplectic(n, 0.3, rng);
    const auto nf = normal_form(conjugate(H, R), tol);
    S = R.matrix() * nf.S.matrix();
  }

  const Matrix Sinv = -J * S.transpose() * J;  // symplectic inverse
  CompatibleComplexStructure out;
  out.J0 = S * J * Sinv;

  out.square_residual =
      (out.J0 * out.J0 + Matrix::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff();
  const Matrix A = H.generator();
  const double sa = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
  out.commute_residual = (out.J0 * A - A * out.J0).cwiseAbs().maxCoeff() / sa;
  Matrix G0 = J.transpose() * out.J0;
  G0 = 0.5 * (G0 + G0.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> se(G0, Eigen::EigenvaluesOnly);
  out.metric_min_eig = se.eigenvalues()(0);
  if (out.metric_min_eig <= 0)
    throw NumericalError("invariant_complex_structure: metric J^T J0 not positive");
  return out;
}

}  // namespace symhorn
