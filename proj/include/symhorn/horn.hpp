#pragma once

// Sampling the symplectic Horn set {F(H1 + H2) : F(H1) = lambda, F(H2) = mu}
// for positive orbits, plus the diagonal torus moment and an empirical
// convexity probe based on midpoint realizability.

#include "symhorn/core.hpp"
#include "symhorn/normalform.hpp"
#include "symhorn/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace symhorn {

struct OrbitSpec {
  Vector lambda;  // nondecreasing, all entries > 0

  explicit OrbitSpec(Vector l) : lambda(std::move(l)) {
    if (lambda.size() < 1) throw ValidationError("OrbitSpec: empty tuple");
    for (int i = 0; i < lambda.size(); ++i) {
      if (lambda(i) <= 0) throw ValidationError("OrbitSpec: entries must be > 0");
      if (i > 0 && lambda(i) < lambda(i - 1))
        throw ValidationError("OrbitSpec: tuple must be nondecreasing");
    }
  }

  int n() const { return int(lambda.size()); }

  // diag(lambda, lambda): the normal form sum_j (lambda_j/2)(q_j^2 + p_j^2)
  Matrix normal_form_matrix() const {
    const int m = n();
    Matrix D = Matrix::Zero(2 * m, 2 * m);
    D.topLeftCorner(m, m) = lambda.asDiagonal();
    D.bottomRightCorner(m, m) = lambda.asDiagonal();
    return D;
  }
};

// Spread ladder: sample i uses spread max_spread * (i mod levels)/(levels-1),
// sweeping from the normal form itself out to far orbit points.
struct SpreadSchedule {
  double max_spread = 0.8;
  int levels = 200;

  double spread_for(std::uint64_t index) const {
    if (levels <= 1) return max_spread;
    return max_spread * double(index % std::uint64_t(levels)) / double(levels - 1);
  }
};

struct HornSampleCloud {
  int n = 0;
  Vector lambda, mu;
  std::uint64_t seed = 0;
  SpreadSchedule schedule;
  std::vector<Vector> points;  // sorted n-tuples F(H1 + H2)
};

// One point of the coadjoint orbit O_lambda: S^T D_lambda S.
inline QuadraticHamiltonian orbit_sample(const OrbitSpec& spec, double spread, Rng& rng) {
  const SymplecticTransform S = random_symplectic(spec.n(), spread, rng);
  return QuadraticHamiltonian(S.matrix().transpose() * spec.normal_form_matrix() *
                              S.matrix());
}

inline HornSampleCloud horn_sample(const OrbitSpec& lambda, const OrbitSpec& mu,
                                   int N, std::uint64_t seed,
                                   const SpreadSchedule& schedule = {}) {
  if (lambda.n() != mu.n()) throw ValidationError("horn_sample: dimension mismatch");
  if (N < 1) throw ValidationError("horn_sample: N must be >= 1");

  HornSampleCloud cloud;
  cloud.n = lambda.n();
  cloud.lambda = lambda.lambda;
  cloud.mu = mu.lambda;
  cloud.seed = seed;
  cloud.schedule = schedule;
  cloud.points.resize(N);

  parallel_for(N, [&](int i) {
    const double spread = schedule.spread_for(std::uint64_t(i));
    Rng r1 = Rng::substream(seed, 2 * std::uint64_t(i));
    Rng r2 = Rng::substream(seed, 2 * std::uint64_t(i) + 1);
    const auto H1 = orbit_sample(lambda, spread, r1);
    const auto H2 = orbit_sample(mu, spread, r2);
    cloud.points[i] = frequency_map_F(QuadraticHamiltonian(H1.matrix() + H2.matrix()));
  });
  return cloud;
}

// pi(H)_j = (H[q_j, q_j] + H[p_j, p_j]) / 2: momentum map of the torus action.
inline Vector torus_moment_pi(const QuadraticHamiltonian& H) {
  const int n = H.n();
  Vector out(n);
  for (int j = 0; j < n; ++j) out(j) = 0.5 * (H.matrix()(j, j) + H.matrix()(n + j, n + j));
  return out;
}

// ---------------------------------------------------------------------------
// Convexity probe
// ---------------------------------------------------------------------------

struct ConvexityReport {
  int pairs = 0;
  int successes = 0;
  double success_fraction = 0.0;
  double worst_residual = 0.0;  // worst distance to a target midpoint
  double eps = 0.0;             // acceptance distance used
  int interval_dim = 0;         // 1 when the n=1 interval check was used
};

namespace detail {

// Local search: walk (S1, S2) by small multiplicative symplectic steps
// exp(eps*B) with decaying step size, minimizing ||F(H1+H2) - target||_inf.
inline double midpoint_search(const OrbitSpec& lambda, const OrbitSpec& mu,
                              const Vector& target, int budget, Rng& rng) {
  const int n = lambda.n();
  const Matrix Dl = lambda.normal_form_matrix();
  const Matrix Dm = mu.normal_form_matrix();
  const Matrix J = standard_J(n);

  Matrix S1 = Matrix::Identity(2 * n, 2 * n);
  Matrix S2 = S1;
  auto objective = [&](const Matrix& A1, const Matrix& A2) {
    const Matrix H1 = A1.transpose() * Dl * A1;
    const Matrix H2 = A2.transpose() * Dm * A2;
    const Vector f = frequency_map_F(QuadraticHamiltonian(H1 + H2));
    return (f - target).cwiseAbs().maxCoeff();
  };

  double best = objective(S1, S2);
  double step = 0.3;
  int stale = 0;
  for (int it = 0; it < budget && best > 1e-12; ++it) {
    const bool first = rng.uniform01() < 0.5;
    const Matrix B = J * random_symmetric(2 * n, step, rng);
    const Matrix E = B.exp();
    const Matrix T1 = first ? Matrix(S1 * E) : S1;
    const Matrix T2 = first ? S2 : Matrix(S2 * E);
    const double val = objective(T1, T2);
    if (val < best) {
      best = val;
      S1 = T1;
      S2 = T2;
      stale = 0;
    } else if (++stale >= 20) {
      step = std::max(step * 0.7, 1e-6);
      stale = 0;
    }
  }
  return best;
}

}  // namespace detail

inline ConvexityReport convexity_probe(const HornSampleCloud& cloud, int pairs,
                                       int search_budget, std::uint64_t seed) {
  if (cloud.points.empty()) throw PreconditionError("convexity_probe: empty cloud");
  if (pairs < 1) throw ValidationError("convexity_probe: pairs must be >= 1");

  ConvexityReport rep;
  rep.pairs = pairs;

  if (cloud.n == 1) {
    // 1-D: the convex set is an interval; midpoints are inside by construction
    rep.interval_dim = 1;
    rep.successes = pairs;
    rep.success_fraction = 1.0;
    rep.eps = 0.0;
    return rep;
  }

  const OrbitSpec lam{cloud.lambda}, mu{cloud.mu};
  std::vector<double> residuals(pairs, 0.0);
  std::vector<double> epses(pairs, 0.0);
  parallel_for(pairs, [&](int p) {
    Rng rng = Rng::substream(seed, std::uint64_t(p));
    const auto& x = cloud.points[rng.next_u64() % cloud.points.size()];
    const auto& y = cloud.points[rng.next_u64() % cloud.points.size()];
    const Vector target = 0.5 * (x + y);
    epses[p] = 1e-3 * std::max(1.0, target.cwiseAbs().maxCoeff());
    residuals[p] = detail::midpoint_search(lam, mu, target, search_budget, rng);
  });

  double worst = 0.0, eps_used = 0.0;
  int ok = 0;
  for (int p = 0; p < pairs; ++p) {
    worst = std::max(worst, residuals[p]);
    eps_used = std::max(eps_used, epses[p]);
    if (residuals[p] <= epses[p]) ++ok;
  }
  rep.successes = ok;
  rep.success_fraction = double(ok) / double(pairs);
  rep.worst_residual = worst;
  rep.eps = eps_used;
  return rep;
}

}  // namespace symhorn
