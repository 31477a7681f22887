#pragma once

// File formats:
//  - matrices: JSON {"n": int, "order": "block"|"interleaved", "h": [[...]]},
//    symmetrized and validated on read; interleaved (q1,p1,q2,p2,...) input
//    is permuted to the block convention (q1..qn, p1..pn)
//  - sample clouds: CSV, one sorted n-tuple per row, header carrying
//    lambda, mu, seed, and the spread schedule
// All numeric output uses %.17g so identical configs give identical bytes.

#include "symhorn/core.hpp"
#include "symhorn/horn.hpp"
#include "symhorn/hull.hpp"
#include "symhorn/normalform.hpp"
#include "symhorn/stability.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace symhorn {

using json = nlohmann::json;

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Matrix JSON
// ---------------------------------------------------------------------------

// block index of interleaved coordinate i: q_j -> j, p_j -> n + j
inline Matrix interleaved_to_block(const Matrix& M) {
  const int n = int(M.rows()) / 2;
  Eigen::VectorXi perm(2 * n);
  for (int j = 0; j < n; ++j) {
    perm(2 * j) = j;
    perm(2 * j + 1) = n + j;
  }
  Matrix out(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) out(perm(i), perm(j)) = M(i, j);
  return out;
}

inline QuadraticHamiltonian hamiltonian_from_json(const json& j) {
  if (!j.contains("n") || !j.contains("h"))
    throw ValidationError("matrix json: fields 'n' and 'h' are required");
  const int n = j.at("n").get<int>();
  if (n < 1) throw ValidationError("matrix json: n must be >= 1");
  const auto& rows = j.at("h");
  if (!rows.is_array() || int(rows.size()) != 2 * n)
    throw ValidationError("matrix json: 'h' must be a 2n x 2n array");
  Matrix H(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r) {
    if (!rows[r].is_array() || int(rows[r].size()) != 2 * n)
      throw ValidationError("matrix json: row " + std::to_string(r) + " has wrong length");
    for (int c = 0; c < 2 * n; ++c) H(r, c) = rows[r][c].get<double>();
  }
  const std::string order = j.value("order", "block");
  if (order == "interleaved") H = interleaved_to_block(H);
  else if (order != "block")
    throw ValidationError("matrix json: order must be 'block' or 'interleaved'");
  return QuadraticHamiltonian(H);
}

inline QuadraticHamiltonian read_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
  return hamiltonian_from_json(j);
}

inline json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Report JSON
// ---------------------------------------------------------------------------

inline json to_json(const SignedSpectrum& sp) {
  json entries = json::array();
  for (const auto& e : sp.entries)
    entries.push_back({{"lambda", e.lambda},
                       {"krein_sign", e.krein_sign},
                       {"multiplicity", e.multiplicity}});
  return {{"entries", entries}, {"residual_real_part", sp.residual_real_part}};
}

inline json to_json(const TolProfile& t) {
  return {{"re_tol", t.re_tol},
          {"cluster_tol", t.cluster_tol},
          {"def_tol", t.def_tol},
          {"rank_tol", t.rank_tol},
          {"band", t.band}};
}

inline json to_json(const StabilityReport& r) {
  return {{"class", to_string(r.cls)},
          {"spectrum", to_json(r.spectrum)},
          {"certificate",
           {{"max_re_eigenvalue", r.max_re},
            {"min_noncompact_root", r.min_noncompact_root},
            {"min_krein_eigenvalue", r.min_krein_eig},
            {"defective", r.defective}}},
          {"tolerances", to_json(r.tols)}};
}

inline json to_json(const NormalFormResult& nf, bool emit_s) {
  json out = {{"frequencies", nf.frequencies.lambdas()},
              {"krein_signs", json::array()},
              {"residual", nf.residual}};
  for (const auto& e : nf.frequencies.entries)
    for (int k = 0; k < e.multiplicity; ++k) out["krein_signs"].push_back(e.krein_sign);
  if (emit_s) out["diagonalizer"] = matrix_to_json(nf.S.matrix());
  return out;
}

inline json to_json(const PerturbationReport& r) {
  return {{"margin", r.margin},
          {"trials", r.trials},
          {"fractions", r.fractions},
          {"survival", r.survival}};
}

inline json to_json(const ConvexityReport& r) {
  return {{"pairs", r.pairs},
          {"successes", r.successes},
          {"success_fraction", r.success_fraction},
          {"worst_residual", r.worst_residual},
          {"eps", r.eps},
          {"interval_check", r.interval_dim == 1}};
}

inline json to_json(const HullSummary& h) {
  json out = {{"dim", h.dim},
              {"affine_rank", h.affine_rank},
              {"degenerate", h.degenerate}};
  if (h.dim == 1) {
    out["interval"] = {h.min_coord, h.max_coord};
    return out;
  }
  json verts = json::array(), norms = json::array();
  for (const auto& v : h.vertices) {
    json t = json::array();
    for (int c = 0; c < v.size(); ++c) t.push_back(v(c));
    verts.push_back(t);
  }
  for (const auto& nv : h.facet_normals) {
    json t = json::array();
    for (int c = 0; c < nv.size(); ++c) t.push_back(nv(c));
    norms.push_back(t);
  }
  out["vertices"] = verts;
  out["facet_normals"] = norms;
  out["dihedral_histogram_deg10"] = h.dihedral_histogram;
  return out;
}

// ---------------------------------------------------------------------------
// Cloud CSV
// ---------------------------------------------------------------------------

inline std::string tuple_csv(const Vector& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ";";
    s += fmt_double(v(i));
  }
  return s;
}

inline Vector tuple_from_csv(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) vals.push_back(std::stod(item));
  return Eigen::Map<Vector>(vals.data(), long(vals.size()));
}

inline void write_cloud_csv(const HornSampleCloud& cloud, std::ostream& out) {
  out << "# lambda=" << tuple_csv(cloud.lambda) << " mu=" << tuple_csv(cloud.mu)
      << " seed=" << cloud.seed << " max_spread=" << fmt_double(cloud.schedule.max_spread)
      << " levels=" << cloud.schedule.levels << "\n";
  for (int j = 0; j < cloud.n; ++j) out << (j ? "," : "") << "x" << (j + 1);
  out << "\n";
  for (const auto& p : cloud.points) {
    for (int j = 0; j < p.size(); ++j) out << (j ? "," : "") << fmt_double(p(j));
    out << "\n";
  }
}

inline void write_cloud_csv(const HornSampleCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  write_cloud_csv(cloud, out);
}

inline HornSampleCloud read_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  HornSampleCloud cloud;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw ValidationError("cloud csv: missing header line in " + path);
  std::stringstream hs(line.substr(2));
  std::string token;
  while (hs >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq), val = token.substr(eq + 1);
    if (key == "lambda") cloud.lambda = tuple_from_csv(val);
    else if (key == "mu") cloud.mu = tuple_from_csv(val);
    else if (key == "seed") cloud.seed = std::stoull(val);
    else if (key == "max_spread") cloud.schedule.max_spread = std::stod(val);
    else if (key == "levels") cloud.schedule.levels = std::stoi(val);
  }
  if (cloud.lambda.size() == 0 || cloud.lambda.size() != cloud.mu.size())
    throw ValidationError("cloud csv: bad lambda/mu header in " + path);
  cloud.n = int(cloud.lambda.size());
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    if (int(vals.size()) != cloud.n)
      throw ValidationError("cloud csv: row with wrong arity in " + path);
    cloud.points.push_back(Eigen::Map<Vector>(vals.data(), cloud.n));
  }
  return cloud;
}

}  // namespace symhorn
