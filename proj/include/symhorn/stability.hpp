#pragma once

// Stability classification of quadratic Hamiltonians.
//
// A Hamiltonian H is stable when A = J H has purely imaginary semisimple
// spectrum, and strongly stable when in addition every resonant frequency
// cluster carries a definite Krein signature and no frequency vanishes
// (equivalently: no noncompact root value lambda_j + lambda_k is zero).
// Margins that fall inside the tolerance band yield Indeterminate instead
// of a guess.

#include "symhorn/core.hpp"
#include "symhorn/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace symhorn {

enum class StabilityClass { Unstable, StableNotStrong, StronglyStable, Indeterminate };

inline const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Unstable: return "Unstable";
    case StabilityClass::StableNotStrong: return "StableNotStrong";
    case StabilityClass::StronglyStable: return "StronglyStable";
    default: return "Indeterminate";
  }
}

struct TolProfile {
  double re_tol = 1e-8;       // |Re eigenvalue| threshold, relative to ||A||
  double cluster_tol = 1e-6;  // frequency clustering width, relative to ||A||
  double def_tol = 1e-9;      // Krein definiteness threshold, relative to ||H||
  double rank_tol = 1e-8;     // eigenbasis rank threshold (defectiveness)
  double band = 10.0;         // indeterminacy band factor

  static TolProfile defaults() { return {}; }
  static TolProfile strict() {
    TolProfile t;
    t.re_tol = 1e-10;
    t.cluster_tol = 1e-8;
    t.def_tol = 1e-11;
    t.rank_tol = 1e-10;
    return t;
  }
};

// One normal-mode entry: lambda is the signed normal-form coefficient,
// |lambda| the frequency, sign(lambda) the Krein sign (0 for zero modes).
struct SignedMode {
  double lambda = 0.0;
  int krein_sign = 0;
  int multiplicity = 1;
};

struct SignedSpectrum {
  std::vector<SignedMode> entries;  // sorted nondecreasing by lambda
  double residual_real_part = 0.0;  // max |Re| over eigenvalues of A

  // signed coefficients flattened with multiplicity, nondecreasing
  std::vector<double> lambdas() const {
    std::vector<double> out;
    for (const auto& e : entries)
      for (int k = 0; k < e.multiplicity; ++k) out.push_back(e.lambda);
    std::sort(out.begin(), out.end());
    return out;
  }
};

struct StabilityReport {
  StabilityClass cls = StabilityClass::Indeterminate;
  SignedSpectrum spectrum;
  double max_re = 0.0;                // max |Re eigenvalue| of A
  double min_noncompact_root = 0.0;   // min |lambda_j + lambda_k|, j <= k (stable only)
  double min_krein_eig = 0.0;         // min |eig| of H on any frequency cluster
  bool defective = false;
  TolProfile tols;
};

// ---------------------------------------------------------------------------
// Spectrum and frequency clusters
// ---------------------------------------------------------------------------

// Eigenvalues of A = J H, symmetrized so the multiset is closed under
// negation (conjugation closure is automatic for a real matrix).
inline std::vector<std::complex<double>> spectrum(const QuadraticHamiltonian& H) {
  Eigen::EigenSolver<Matrix> es(H.generator());
  if (es.info() != Eigen::Success) throw NumericalError("spectrum: eigensolver failed");
  const int m = int(es.eigenvalues().size());
  std::vector<std::complex<double>> z(m);
  for (int i = 0; i < m; ++i) z[i] = es.eigenvalues()[i];

  // pair each eigenvalue with the nearest candidate for -conj(z) and average
  std::vector<bool> used(m, false);
  for (int i = 0; i < m; ++i) {
    if (used[i]) continue;
    const std::complex<double> target = -std::conj(z[i]);
    int best = -1;
    double bestd = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      if (used[j] && j != i) continue;
      const double d = std::abs(z[j] - target);
      if (d < bestd) { bestd = d; best = j; }
    }
    if (best == i) {
      z[i] = {0.0, z[i].imag()};  // self-paired: purely imaginary
      used[i] = true;
    } else {
      const std::complex<double> v = 0.5 * (z[i] - std::conj(z[best]));
      z[i] = v;
      z[best] = -std::conj(v);
      used[i] = used[best] = true;
    }
  }
  std::sort(z.begin(), z.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return z;
}

namespace detail {

struct FrequencyCluster {
  double omega = 0.0;        // representative frequency (>= 0)
  int multiplicity = 0;      // number of modes m (subspace dimension 2m)
  Matrix basis;              // 2n x 2m orthonormal basis of the invariant subspace
  double rank_gap = 0.0;     // sigma_min/sigma_max of the raw eigenvector span
  int sig_pos = 0;           // signature of H on the subspace, in mode units
  int sig_neg = 0;
  double krein_margin = 0.0; // min |eig| of restricted H, relative to ||H||
  bool odd_signature = false;
};

struct ClusterAnalysis {
  double scale_a = 1.0;      // ||A||_inf proxy
  double scale_h = 1.0;
  double max_re = 0.0;
  bool zero_present = false;
  bool zero_pair_mismatch = false;
  FrequencyCluster zero_cluster;          // modes at omega ~ 0, if any
  std::vector<FrequencyCluster> clusters; // omega > 0, ascending
  int total_modes = 0;                    // sum of multiplicities incl. zero modes
};

// Orthonormal basis + signature of H restricted to the span of the given
// (complex) eigenvectors' real and imaginary parts.
inline void restrict_and_sign(const Matrix& H, const Eigen::MatrixXcd& vecs,
                              const TolProfile& tol, double scale_h,
                              FrequencyCluster& out) {
  const int m = int(vecs.cols());
  Matrix B(H.rows(), 2 * m);
  for (int k = 0; k < m; ++k) {
    B.col(2 * k) = vecs.col(k).real();
    B.col(2 * k + 1) = vecs.col(k).imag();
  }
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  out.rank_gap = sv(sv.size() - 1) / std::max(sv(0), 1e-300);
  out.basis = svd.matrixU();
  const Matrix W = out.basis.transpose() * H * out.basis;
  Eigen::SelfAdjointEigenSolver<Matrix> se(W);
  int pos = 0, neg = 0;
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < se.eigenvalues().size(); ++i) {
    const double w = se.eigenvalues()(i);
    margin = std::min(margin, std::abs(w) / scale_h);
    if (w > 0) ++pos; else ++neg;
  }
  out.krein_margin = margin;
  out.odd_signature = (pos % 2 != 0) || (neg % 2 != 0);
  out.sig_pos = pos / 2;
  out.sig_neg = neg / 2;
  (void)tol;
}

inline ClusterAnalysis analyze_clusters(const QuadraticHamiltonian& H,
                                        const TolProfile& tol) {
  ClusterAnalysis out;
  const Matrix A = H.generator();
  out.scale_a = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
  out.scale_h = std::max(H.matrix().cwiseAbs().maxCoeff(), 1e-300);

  Eigen::EigenSolver<Matrix> es(A);
  if (es.info() != Eigen::Success) throw NumericalError("classify: eigensolver failed");
  const auto& ev = es.eigenvalues();
  const auto& V = es.eigenvectors();
  const int dim = int(ev.size());

  for (int i = 0; i < dim; ++i)
    out.max_re = std::max(out.max_re, std::abs(ev(i).real()));

  const double ctol = tol.cluster_tol * out.scale_a;

  // indices of modes: Im > ctol (one representative per +/- pair), plus zeros
  std::vector<int> zero_idx;
  std::vector<int> pos_idx;
  for (int i = 0; i < dim; ++i) {
    if (ev(i).imag() > ctol) pos_idx.push_back(i);
    else if (std::abs(ev(i).imag()) <= ctol) zero_idx.push_back(i);
  }
  std::sort(pos_idx.begin(), pos_idx.end(),
            [&](int a, int b) { return ev(a).imag() < ev(b).imag(); });

  // group by gaps in Im
  std::vector<std::vector<int>> groups;
  for (int idx : pos_idx) {
    if (!groups.empty() && ev(idx).imag() - ev(groups.back().back()).imag() <= ctol)
      groups.back().push_back(idx);
    else
      groups.push_back({idx});
  }

  for (const auto& g : groups) {
    FrequencyCluster c;
    double s = 0;
    for (int idx : g) s += ev(idx).imag();
    c.omega = s / double(g.size());
    c.multiplicity = int(g.size());
    Eigen::MatrixXcd vecs(dim, int(g.size()));
    for (size_t k = 0; k < g.size(); ++k) vecs.col(int(k)) = V.col(g[k]);
    restrict_and_sign(H.matrix(), vecs, tol, out.scale_h, c);
    out.clusters.push_back(std::move(c));
    out.total_modes += int(g.size());
  }

  if (!zero_idx.empty()) {
    out.zero_present = true;
    out.zero_pair_mismatch = zero_idx.size() % 2 != 0;
    FrequencyCluster c;
    c.omega = 0.0;
    c.multiplicity = int(zero_idx.size()) / 2;
    Matrix B(dim, int(zero_idx.size()));
    for (size_t k = 0; k < zero_idx.size(); ++k) B.col(int(k)) = V.col(zero_idx[k]).real();
    Eigen::JacobiSVD<Matrix> svd(B);
    const auto& sv = svd.singularValues();
    c.rank_gap = sv(sv.size() - 1) / std::max(sv(0), 1e-300);
    out.zero_cluster = std::move(c);
    out.total_modes += int(zero_idx.size()) / 2;
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Krein signature
// ---------------------------------------------------------------------------

struct KreinSignature {
  int positive = 0;
  int negative = 0;
};

// Signature of H restricted to the real invariant subspace of the frequency
// cluster {+-i omega}, counted in mode units (positive + negative = cluster
// multiplicity).
inline KreinSignature krein_signature(const QuadraticHamiltonian& H, double omega,
                                      double cluster_tol_rel = 1e-6) {
  if (omega <= 0) throw PreconditionError("krein_signature: omega must be > 0");
  TolProfile tol;
  tol.cluster_tol = cluster_tol_rel;
  const auto cs = detail::analyze_clusters(H, tol);
  if (cs.max_re > tol.re_tol * tol.band * cs.scale_a)
    throw PreconditionError("krein_signature: spectrum not purely imaginary");
  for (const auto& c : cs.clusters) {
    if (std::abs(c.omega - omega) <=
        std::max(cluster_tol_rel * cs.scale_a, 1e-8 * omega)) {
      if (c.rank_gap < tol.rank_tol)
        throw NumericalError("krein_signature: defective frequency cluster");
      if (c.odd_signature)
        throw NumericalError("krein_signature: signature not resolved in mode pairs");
      return {c.sig_pos, c.sig_neg};
    }
  }
  throw PreconditionError("krein_signature: frequency not in spectrum");
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

inline StabilityReport classify(const QuadraticHamiltonian& H,
                                const TolProfile& tol = TolProfile::defaults()) {
  StabilityReport rep;
  rep.tols = tol;
  const auto cs = detail::analyze_clusters(H, tol);
  rep.max_re = cs.max_re;
  rep.spectrum.residual_real_part = cs.max_re;

  const double re_lo = tol.re_tol * cs.scale_a;
  const double re_hi = tol.band * re_lo;
  if (cs.max_re > re_hi) {
    rep.cls = StabilityClass::Unstable;
    return rep;
  }
  bool marginal = cs.max_re > re_lo;

  // defectiveness (nonsemisimple spectrum => unstable)
  bool defective = false;
  for (const auto& c : cs.clusters) {
    if (c.rank_gap < tol.rank_tol) defective = true;
    else if (c.rank_gap < tol.band * tol.rank_tol) marginal = true;
  }
  if (cs.zero_present) {
    if (cs.zero_cluster.rank_gap < tol.rank_tol) defective = true;
    else if (cs.zero_cluster.rank_gap < tol.band * tol.rank_tol) marginal = true;
    if (cs.zero_pair_mismatch) marginal = true;
  }
  rep.defective = defective;
  if (defective) {
    rep.cls = StabilityClass::Unstable;
    return rep;
  }
  if (cs.total_modes != H.n()) {
    rep.cls = StabilityClass::Indeterminate;
    return rep;
  }

  // assemble signed spectrum and decide definiteness
  bool indefinite = false;
  double min_krein = std::numeric_limits<double>::infinity();
  std::vector<SignedMode> modes;
  for (const auto& c : cs.clusters) {
    min_krein = std::min(min_krein, c.krein_margin);
    if (c.odd_signature || c.krein_margin < tol.band * tol.def_tol) marginal = true;
    if (c.sig_pos > 0 && c.sig_neg > 0) indefinite = true;
    if (c.sig_pos > 0) modes.push_back({c.omega, +1, c.sig_pos});
    if (c.sig_neg > 0) modes.push_back({-c.omega, -1, c.sig_neg});
  }
  if (cs.zero_present && cs.zero_cluster.multiplicity > 0)
    modes.push_back({0.0, 0, cs.zero_cluster.multiplicity});
  std::sort(modes.begin(), modes.end(),
            [](const SignedMode& a, const SignedMode& b) { return a.lambda < b.lambda; });
  rep.spectrum.entries = modes;
  rep.min_krein_eig = std::isfinite(min_krein) ? min_krein : 0.0;

  const auto lam = rep.spectrum.lambdas();
  double min_ncr = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < lam.size(); ++j)
    for (size_t k = j; k < lam.size(); ++k)
      min_ncr = std::min(min_ncr, std::abs(lam[j] + lam[k]));
  rep.min_noncompact_root = std::isfinite(min_ncr) ? min_ncr : 0.0;

  // zero frequencies only matter through the noncompact roots; a cluster
  // whose omega sits inside the clustering band is a marginal call
  if (marginal) {
    rep.cls = StabilityClass::Indeterminate;
  } else if (cs.zero_present || indefinite) {
    rep.cls = StabilityClass::StableNotStrong;
  } else {
    rep.cls = StabilityClass::StronglyStable;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Root values
// ---------------------------------------------------------------------------

struct RootValues {
  std::vector<double> compact;     // lambda_j - lambda_k, j < k
  std::vector<double> noncompact;  // lambda_j + lambda_k, j <= k
};

inline RootValues root_values(const SignedSpectrum& spectrum) {
  const auto lam = spectrum.lambdas();
  if (lam.empty())
    throw PreconditionError("root_values: empty spectrum (unstable input?)");
  RootValues out;
  for (size_t j = 0; j < lam.size(); ++j) {
    for (size_t k = j; k < lam.size(); ++k) {
      if (j < k) out.compact.push_back(lam[j] - lam[k]);
      out.noncompact.push_back(lam[j] + lam[k]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Membership in F, E, D
// ---------------------------------------------------------------------------

struct Membership {
  bool in_D = false;  // strongly stable
  bool in_E = false;  // in_D and A commutes with J (H in the u(n) embedding)
  bool in_F = false;  // in_E and A block-diagonal in the (q_j, p_j) planes
  double s_part_norm = 0.0;     // ||s_part||_inf, margin for E
  double off_torus_norm = 0.0;  // max off-pattern entry of A, margin for F
  StabilityReport report;
};

inline Membership membership(const QuadraticHamiltonian& H,
                             const TolProfile& tol = TolProfile::defaults()) {
  Membership m;
  m.report = classify(H, tol);
  m.in_D = m.report.cls == StabilityClass::StronglyStable;

  const Matrix A = H.generator();
  const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
  const auto split = cartan_split(A);
  m.s_part_norm = split.s_part.cwiseAbs().maxCoeff();
  m.in_E = m.in_D && m.s_part_norm <= 1e-8 * scale;

  const int n = H.n();
  double off = 0.0;
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = 0; j < 2 * n; ++j) {
      const bool same_plane = (i % n) == (j % n);
      if (!same_plane) off = std::max(off, std::abs(A(i, j)));
    }
  }
  m.off_torus_norm = off;
  m.in_F = m.in_E && off <= 1e-8 * scale;
  return m;
}

// ---------------------------------------------------------------------------
// Perturbation probe (openness of D)
// ---------------------------------------------------------------------------

struct PerturbationReport {
  double margin = 0.0;  // heuristic stability margin in ||dH||_2 units
  std::vector<double> fractions;
  std::vector<double> survival;  // fraction of trials still strongly stable
  int trials = 0;
};

// For each radius fraction f, perturbs H by `trials` random symmetric
// matrices of spectral norm f * margin and reports how many stay strongly
// stable. The margin is min |lambda_j + lambda_k| deflated by the squared
// conditioning of the eigenbasis; heuristic, calibrated by the trials.
inline PerturbationReport perturbation_probe(const QuadraticHamiltonian& H, int trials,
                                             std::vector<double> radius_fractions,
                                             std::uint64_t seed,
                                             const TolProfile& tol = TolProfile::defaults()) {
  const auto rep = classify(H, tol);
  if (rep.cls != StabilityClass::StronglyStable)
    throw PreconditionError(
        std::string("perturbation_probe: input not strongly stable (") +
        to_string(rep.cls) + ")");
  if (trials < 1) throw ValidationError("perturbation_probe: trials must be >= 1");

  Eigen::EigenSolver<Matrix> es(H.generator());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / std::max(sv(sv.size() - 1), 1e-300);

  PerturbationReport out;
  out.margin = rep.min_noncompact_root / (2.0 * cond * cond);
  out.trials = trials;
  std::sort(radius_fractions.begin(), radius_fractions.end());
  const int dim = 2 * H.n();

  for (size_t fi = 0; fi < radius_fractions.size(); ++fi) {
    const double radius = radius_fractions[fi] * out.margin;
    std::vector<int> ok(trials, 0);
    parallel_for(trials, [&](int t) {
      Rng rng = Rng::substream(seed, fi * 1000003ULL + std::uint64_t(t));
      Matrix dH = random_symmetric(dim, 1.0, rng);
      Eigen::SelfAdjointEigenSolver<Matrix> se(dH, Eigen::EigenvaluesOnly);
      const double nrm = se.eigenvalues().cwiseAbs().maxCoeff();
      dH *= radius / std::max(nrm, 1e-300);
      const auto r = classify(QuadraticHamiltonian(H.matrix() + dH), tol);
      ok[t] = r.cls == StabilityClass::StronglyStable ? 1 : 0;
    });
    int survivors = 0;
    for (int v : ok) survivors += v;
    out.fractions.push_back(radius_fractions[fi]);
    out.survival.push_back(double(survivors) / double(trials));
  }
  return out;
}

}  // namespace symhorn
