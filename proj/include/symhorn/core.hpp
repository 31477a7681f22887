#pragma once

// Symplectic linear algebra substrate: the standard form J, symplecticity
// checks, sp(2n) generators, Cartan splitting k (+) s, random group elements,
// and congruence of quadratic Hamiltonians.
//
// Conventions: coordinate order (q_1..q_n, p_1..p_n), so the form matrix is
// the block matrix J = [[0, I], [-I, 0]] and omega(x, y) = x^T J y.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace symhorn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Raised when inputs fail validation (shape, symmetry, parse errors).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when an operation's mathematical precondition does not hold
// (e.g. normal_form on a Hamiltonian that is not strongly stable).
struct PreconditionError : ValidationError {
  using ValidationError::ValidationError;
};

// Raised when a numerical routine cannot produce a usable result.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic RNG. splitmix64-based: output depends only on (seed, call
// index), so substreams derived from (seed, stream_index) are reproducible
// across platforms and worker counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed);
    // decorrelate the substream index through one scramble round
    r.state_ ^= 0x9e3779b97f4a7c15ULL * (index + 1);
    r.next_u64();
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct SymplecticForm {
  int n = 0;
  Matrix J;  // [[0, I], [-I, 0]], integer entries
};

inline Matrix standard_J(int n) {
  if (n < 1) throw ValidationError("standard_form: n must be >= 1");
  Matrix J = Matrix::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Matrix::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return J;
}

inline SymplecticForm standard_form(int n) { return {n, standard_J(n)}; }

inline void require_even_square(const Matrix& M, const char* who) {
  if (M.rows() != M.cols() || M.rows() < 2 || M.rows() % 2 != 0)
    throw ValidationError(std::string(who) + ": matrix must be 2n x 2n, n >= 1");
}

// Quadratic Hamiltonian H(x) = x^T H x / 2; symmetrized on construction.
class QuadraticHamiltonian {
 public:
  explicit QuadraticHamiltonian(Matrix h, double symmetry_tol = 1e-9) {
    require_even_square(h, "QuadraticHamiltonian");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
    if (asym > symmetry_tol * scale)
      throw ValidationError("QuadraticHamiltonian: matrix not symmetric (residual " +
                            std::to_string(asym) + ")");
    h_ = 0.5 * (h + h.transpose());
    n_ = int(h_.rows()) / 2;
  }

  int n() const { return n_; }
  const Matrix& matrix() const { return h_; }

  // A = J H, the generator of the linear flow x' = A x
  Matrix generator() const { return standard_J(n_) * h_; }

 private:
  int n_;
  Matrix h_;
};

// Element of sp(2n): A with A^T J + J A = 0, equivalently J A symmetric.
struct HamiltonianGenerator {
  int n = 0;
  Matrix A;
};

inline double sp_residual(const Matrix& A) {
  const int n = int(A.rows()) / 2;
  const Matrix J = standard_J(n);
  const Matrix M = A.transpose() * J + J * A;
  return M.cwiseAbs().maxCoeff();
}

inline HamiltonianGenerator make_generator(const Matrix& A, double tol = 1e-8) {
  require_even_square(A, "HamiltonianGenerator");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double r = sp_residual(A);
  if (r > tol * scale)
    throw ValidationError("HamiltonianGenerator: not in sp(2n), residual " +
                          std::to_string(r));
  return {int(A.rows()) / 2, A};
}

struct SymplecticCheck {
  bool ok = false;
  double residual = 0.0;  // ||S^T J S - J||_inf, always reported
};

inline SymplecticCheck is_symplectic(const Matrix& S, double tol) {
  require_even_square(S, "is_symplectic");
  const int n = int(S.rows()) / 2;
  const Matrix J = standard_J(n);
  const double r = (S.transpose() * J * S - J).cwiseAbs().maxCoeff();
  return {r <= tol, r};
}

inline double default_symplectic_tol(const Matrix& S) {
  const double ns = S.cwiseAbs().maxCoeff();
  return 1e-9 * std::max(1.0, ns * ns);
}

class SymplecticTransform {
 public:
  explicit SymplecticTransform(Matrix s, double tol = -1.0) {
    require_even_square(s, "SymplecticTransform");
    if (tol < 0) tol = default_symplectic_tol(s);
    const auto chk = is_symplectic(s, tol);
    if (!chk.ok)
      throw ValidationError("SymplecticTransform: S^T J S != J, residual " +
                            std::to_string(chk.residual));
    s_ = std::move(s);
    n_ = int(s_.rows()) / 2;
  }

  int n() const { return n_; }
  const Matrix& matrix() const { return s_; }

  // S^{-1} = -J S^T J, exact for symplectic S; cheaper and better
  // conditioned than a general inverse
  Matrix inverse() const {
    const Matrix J = standard_J(n_);
    return -J * s_.transpose() * J;
  }

 private:
  int n_;
  Matrix s_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Random symmetric matrix with entries uniform(-spread, spread).
inline Matrix random_symmetric(int dim, double spread, Rng& rng) {
  Matrix M(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) M(i, j) = rng.uniform(-spread, spread);
  return 0.5 * (M + M.transpose());
}

// S = exp(A), A = J * (random symmetric with entries ~ U(-spread, spread)).
// Deterministic in (n, spread, rng state); spread -> 0 gives the identity.
inline SymplecticTransform random_symplectic(int n, double spread, Rng& rng) {
  if (n < 1) throw ValidationError("random_symplectic: n must be >= 1");
  if (spread < 0) throw ValidationError("random_symplectic: spread must be >= 0");
  const Matrix H = random_symmetric(2 * n, spread, rng);
  const Matrix A = standard_J(n) * H;
  Matrix S = A.exp();  // scaling-and-squaring Pade
  return SymplecticTransform(std::move(S));
}

inline SymplecticTransform random_symplectic(int n, double spread, std::uint64_t seed) {
  Rng rng(seed);
  return random_symplectic(n, spread, rng);
}

// g = k (+) s for sp(2n): k the J-commuting (u(n)) part, s the
// J-anticommuting part; k = (A - J A J)/2, s = (A + J A J)/2.
struct CartanSplit {
  Matrix k_part;
  Matrix s_part;
};

inline CartanSplit cartan_split(const Matrix& A, double tol = 1e-8) {
  make_generator(A, tol);  // validates membership in sp(2n)
  const int n = int(A.rows()) / 2;
  const Matrix J = standard_J(n);
  const Matrix JAJ = J * A * J;
  return {0.5 * (A - JAJ), 0.5 * (A + JAJ)};
}

// Congruence H -> S^T H S (generators transform by similarity A -> S^{-1} A S).
inline QuadraticHamiltonian conjugate(const QuadraticHamiltonian& H,
                                      const SymplecticTransform& S) {
  if (H.n() != S.n()) throw ValidationError("conjugate: dimension mismatch");
  return QuadraticHamiltonian(S.matrix().transpose() * H.matrix() * S.matrix());
}

}  // namespace symhorn
