#pragma once

// Convex hull diagnostic for sample clouds in dimension <= 4.
// Coordinates are rationalized onto a fixed integer grid and all orientation
// tests use exact integer arithmetic, so the combinatorics are deterministic.
// Lower-dimensional clouds are reported as degenerate, not as errors.

#include "symhorn/core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <vector>

namespace symhorn {

struct HullSummary {
  int dim = 0;
  int affine_rank = 0;       // affine dimension of the point set
  bool degenerate = false;   // affine_rank < dim
  std::vector<Vector> vertices;
  std::vector<Vector> facet_normals;      // outward unit normals (full-rank case)
  std::vector<int> dihedral_histogram;    // ridge angles, 18 bins of 10 degrees
  double min_coord = 0.0, max_coord = 0.0;  // interval endpoints when dim == 1
};

namespace hulldetail {

using Int = boost::multiprecision::cpp_int;
using IPoint = std::array<Int, 4>;

inline Int det(std::vector<std::array<Int, 4>> rows, int d) {
  // fraction-free elimination would also work; plain expansion is fine for d <= 4
  if (d == 1) return rows[0][0];
  Int sum = 0;
  for (int c = 0; c < d; ++c) {
    std::vector<std::array<Int, 4>> minor;
    for (int r = 1; r < d; ++r) {
      std::array<Int, 4> row{};
      int k = 0;
      for (int cc = 0; cc < d; ++cc)
        if (cc != c) row[k++] = rows[r][cc];
      minor.push_back(row);
    }
    const Int term = rows[0][c] * det(minor, d - 1);
    sum += (c % 2 == 0) ? term : -term;
  }
  return sum;
}

// sign of det [p_1 - p_0; ...; p_{d-1} - p_0; q - p_0]
inline int orient(const std::vector<IPoint>& pts, const std::array<int, 4>& face,
                  int d, const IPoint& q) {
  std::vector<std::array<Int, 4>> rows;
  for (int r = 1; r < d; ++r) {
    std::array<Int, 4> row{};
    for (int c = 0; c < d; ++c) row[c] = pts[face[r]][c] - pts[face[0]][c];
    rows.push_back(row);
  }
  std::array<Int, 4> last{};
  for (int c = 0; c < d; ++c) last[c] = q[c] - pts[face[0]][c];
  rows.push_back(last);
  const Int v = det(rows, d);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

struct Facet {
  std::array<int, 4> v{};  // vertex indices, first d entries used
};

inline std::vector<int> sorted_key(const std::array<int, 4>& v, int count) {
  std::vector<int> key(v.begin(), v.begin() + count);
  std::sort(key.begin(), key.end());
  return key;
}

// exact affine rank of the integer point set
inline int affine_rank(const std::vector<IPoint>& pts, int d) {
  if (pts.size() < 2) return 0;
  std::vector<std::array<Int, 4>> rows;
  for (size_t i = 1; i < pts.size() && int(rows.size()) < d; ++i) {
    std::array<Int, 4> cand{};
    for (int c = 0; c < d; ++c) cand[c] = pts[i][c] - pts[0][c];
    // eliminate against accepted rows
    for (auto& r : rows) {
      int piv = 0;
      while (piv < d && r[piv] == 0) ++piv;
      if (piv == d || cand[piv] == 0) continue;
      const Int a = r[piv], b = cand[piv];
      for (int c = 0; c < d; ++c) cand[c] = cand[c] * a - r[c] * b;
    }
    bool nonzero = false;
    for (int c = 0; c < d; ++c) nonzero = nonzero || cand[c] != 0;
    if (nonzero) rows.push_back(cand);
  }
  return int(rows.size());
}

}  // namespace hulldetail

inline HullSummary hull_summary(const std::vector<Vector>& points) {
  if (points.empty()) throw ValidationError("hull_summary: empty cloud");
  const int d = int(points[0].size());
  if (d < 1 || d > 4) throw ValidationError("hull_summary: dimension must be 1..4");
  for (const auto& p : points)
    if (int(p.size()) != d) throw ValidationError("hull_summary: ragged cloud");

  HullSummary out;
  out.dim = d;

  // rationalize onto an integer grid
  double absmax = 0.0;
  for (const auto& p : points) absmax = std::max(absmax, p.cwiseAbs().maxCoeff());
  const double scale = absmax > 0 ? double(1 << 24) / absmax : 1.0;

  using namespace hulldetail;
  std::vector<IPoint> pts;
  std::set<std::array<long long, 4>> seen;
  std::vector<Vector> originals;
  for (const auto& p : points) {
    std::array<long long, 4> key{};
    for (int c = 0; c < d; ++c) key[c] = llround(p(c) * scale);
    if (!seen.insert(key).second) continue;
    IPoint ip{};
    for (int c = 0; c < d; ++c) ip[c] = key[c];
    pts.push_back(ip);
    originals.push_back(p);
  }

  // affine rank from the original coordinates (grid rounding would break
  // exact degeneracy, so this check is tolerance-based)
  {
    Matrix C(long(originals.size()), d);
    for (size_t i = 0; i < originals.size(); ++i) C.row(long(i)) = originals[i] - originals[0];
    Eigen::JacobiSVD<Matrix> svd(C);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-9 * std::max(sv(0), 1e-300)) ++rank;
    out.affine_rank = rank;
  }
  out.degenerate = out.affine_rank < d;

  if (d == 1) {
    double lo = points[0](0), hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, p(0));
      hi = std::max(hi, p(0));
    }
    out.min_coord = lo;
    out.max_coord = hi;
    Vector a(1), b(1);
    a << lo;
    b << hi;
    out.vertices = {a, b};
    return out;
  }
  if (out.degenerate || pts.size() < size_t(d + 1)) return out;

  // initial simplex: greedily extend to d+1 affinely independent points
  std::vector<int> simplex = {0};
  for (size_t i = 1; i < pts.size() && int(simplex.size()) < d + 1; ++i) {
    std::vector<IPoint> trial;
    for (int s : simplex) trial.push_back(pts[s]);
    trial.push_back(pts[i]);
    if (affine_rank(trial, d) == int(trial.size()) - 1) simplex.push_back(int(i));
  }
  if (int(simplex.size()) < d + 1) {
    out.degenerate = true;  // grid rounding collapsed the rank
    return out;
  }

  // interior reference: (d+1) * centroid of the simplex (stays integral)
  IPoint interior{};
  for (int s : simplex)
    for (int c = 0; c < d; ++c) interior[c] += pts[s][c];
  auto orient_interior = [&](const Facet& f) {
    // compare against (d+1)*w_0-shifted interior: affine, scale-consistent
    IPoint q{};
    for (int c = 0; c < d; ++c) q[c] = interior[c] - Int(d) * pts[f.v[0]][c];
    // q = interior - (d+1)w_0 + w_0; orient() subtracts one more w_0
    return orient(pts, f.v, d, q);
  };

  std::vector<Facet> facets;
  for (int skip = 0; skip <= d; ++skip) {
    Facet f;
    int k = 0;
    for (int j = 0; j <= d; ++j)
      if (j != skip) f.v[k++] = simplex[j];
    if (orient_interior(f) > 0) std::swap(f.v[0], f.v[1]);  // interior side negative
    facets.push_back(f);
  }

  std::set<int> in_simplex(simplex.begin(), simplex.end());
  for (int i = 0; i < int(pts.size()); ++i) {
    if (in_simplex.count(i)) continue;
    std::vector<int> visible;
    for (int fi = 0; fi < int(facets.size()); ++fi)
      if (orient(pts, facets[fi].v, d, pts[i]) > 0) visible.push_back(fi);
    if (visible.empty()) continue;

    // horizon = ridges appearing exactly once among visible facets
    std::map<std::vector<int>, int> ridge_count;
    for (int fi : visible) {
      for (int skip = 0; skip < d; ++skip) {
        std::array<int, 4> r{};
        int k = 0;
        for (int j = 0; j < d; ++j)
          if (j != skip) r[k++] = facets[fi].v[j];
        ridge_count[sorted_key(r, d - 1)] += 1;
      }
    }
    std::vector<Facet> next;
    std::set<int> vis(visible.begin(), visible.end());
    for (int fi = 0; fi < int(facets.size()); ++fi)
      if (!vis.count(fi)) next.push_back(facets[fi]);
    for (const auto& [ridge, cnt] : ridge_count) {
      if (cnt != 1) continue;
      Facet f;
      for (int j = 0; j < d - 1; ++j) f.v[j] = ridge[j];
      f.v[d - 1] = i;
      const int side = orient_interior(f);
      if (side == 0) continue;  // ridge and point affinely dependent
      if (side > 0) std::swap(f.v[0], f.v[1]);
      next.push_back(f);
    }
    facets = std::move(next);
  }

  // collect vertices, outward normals, dihedral angles
  std::set<int> vset;
  for (const auto& f : facets)
    for (int j = 0; j < d; ++j) vset.insert(f.v[j]);
  for (int i : vset) out.vertices.push_back(originals[i]);

  std::vector<Vector> normals;
  for (const auto& f : facets) {
    // generalized cross product of the d-1 edge vectors via cofactors
    Eigen::MatrixXd E(d - 1, d);
    for (int r = 1; r < d; ++r)
      for (int c = 0; c < d; ++c)
        E(r - 1, c) = double(pts[f.v[r]][c] - pts[f.v[0]][c]);
    Vector nrm(d);
    for (int c = 0; c < d; ++c) {
      Eigen::MatrixXd minor(d - 1, d - 1);
      int k = 0;
      for (int cc = 0; cc < d; ++cc) {
        if (cc == c) continue;
        minor.col(k++) = E.col(cc);
      }
      nrm(c) = (c % 2 == 0 ? 1.0 : -1.0) * minor.determinant();
    }
    // outward: interior must be on the negative side
    Vector w0(d), ctr(d);
    for (int c = 0; c < d; ++c) {
      w0(c) = double(pts[f.v[0]][c]);
      ctr(c) = double(interior[c]) / double(d + 1);
    }
    if (nrm.dot(ctr - w0) > 0) nrm = -nrm;
    const double len = nrm.norm();
    normals.push_back(len > 0 ? Vector(nrm / len) : Vector(Vector::Zero(d)));
  }
  out.facet_normals = normals;

  out.dihedral_histogram.assign(18, 0);
  std::map<std::vector<int>, std::vector<int>> ridge_to_facets;
  for (int fi = 0; fi < int(facets.size()); ++fi)
    for (int skip = 0; skip < d; ++skip) {
      std::array<int, 4> r{};
      int k = 0;
      for (int j = 0; j < d; ++j)
        if (j != skip) r[k++] = facets[fi].v[j];
      ridge_to_facets[sorted_key(r, d - 1)].push_back(fi);
    }
  for (const auto& [ridge, fs] : ridge_to_facets) {
    if (fs.size() != 2) continue;
    const double c = std::clamp(normals[fs[0]].dot(normals[fs[1]]), -1.0, 1.0);
    const double deg = std::acos(c) * 180.0 / M_PI;
    const int bin = std::min(17, int(deg / 10.0));
    out.dihedral_histogram[bin] += 1;
  }
  return out;
}

}  // namespace symhorn
