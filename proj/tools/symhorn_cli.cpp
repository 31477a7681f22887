// symhorn command-line front end.
//
// Exit codes: 0 = computed (including mathematically negative results such
// as an Unstable classification), 1 = validation or precondition failure,
// 2 = numerical failure. Diagnostics go to stderr as JSON.

#include "symhorn/io.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr const char* kVersion = "0.1.0";

symhorn::json base_output(const std::string& command, const symhorn::json& config) {
  return {{"tool", "symhorn"}, {"version", kVersion}, {"command", command},
          {"config", config}};
}

void emit(const symhorn::json& j, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw symhorn::ValidationError("cannot open " + out_path + " for writing");
    out << j.dump(2) << "\n";
  }
}

symhorn::Vector parse_tuple(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  if (vals.empty()) throw symhorn::ValidationError("empty tuple: " + s);
  return Eigen::Map<symhorn::Vector>(vals.data(), long(vals.size()));
}

std::vector<double> parse_fractions(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  return vals;
}

symhorn::TolProfile profile_by_name(const std::string& name) {
  if (name == "strict") return symhorn::TolProfile::strict();
  if (name == "default") return symhorn::TolProfile::defaults();
  throw symhorn::ValidationError("unknown tolerance profile: " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symhorn: stability, symplectic normal forms, and Horn sampling "
               "for quadratic Hamiltonians"};
  app.require_subcommand(1);

  std::string matrix_path, out_path, tol_name = "default";
  std::string lambda_str, mu_str, in_path, fractions_str = "0.05,0.1";
  std::uint64_t seed = 1;
  int num_samples = 10000, pairs = 200, budget = 2000, trials = 500, levels = 200;
  double max_spread = 0.8;
  bool emit_s = false;

  auto* analyze = app.add_subcommand("analyze", "classify a Hamiltonian");
  analyze->add_option("matrix", matrix_path)->required();
  analyze->add_option("--tol-profile", tol_name)->check(CLI::IsMember({"strict", "default"}));
  analyze->add_option("-o,--out", out_path);

  auto* normal = app.add_subcommand("normal-form", "signed symplectic normal form");
  normal->add_option("matrix", matrix_path)->required();
  normal->add_flag("--emit-s", emit_s, "include the diagonalizer S");
  normal->add_option("--tol-profile", tol_name)->check(CLI::IsMember({"strict", "default"}));
  normal->add_option("-o,--out", out_path);

  auto* horn = app.add_subcommand("horn-sample", "sample F(H1+H2) over two orbits");
  horn->add_option("--lambda", lambda_str)->required();
  horn->add_option("--mu", mu_str)->required();
  horn->add_option("-N,--samples", num_samples);
  horn->add_option("--seed", seed);
  horn->add_option("--max-spread", max_spread);
  horn->add_option("--levels", levels);
  horn->add_option("--out", out_path)->required();

  auto* hull = app.add_subcommand("hull", "convex hull summary of a cloud");
  hull->add_option("--in", in_path)->required();
  hull->add_option("-o,--out", out_path);

  auto* conv = app.add_subcommand("convexity", "midpoint realizability probe");
  conv->add_option("--in", in_path)->required();
  conv->add_option("--pairs", pairs);
  conv->add_option("--budget", budget);
  conv->add_option("--seed", seed);
  conv->add_option("-o,--out", out_path);

  auto* pert = app.add_subcommand("perturb", "openness probe around a strongly stable H");
  pert->add_option("matrix", matrix_path)->required();
  pert->add_option("--trials", trials);
  pert->add_option("--fractions", fractions_str);
  pert->add_option("--seed", seed);
  pert->add_option("--tol-profile", tol_name)->check(CLI::IsMember({"strict", "default"}));
  pert->add_option("-o,--out", out_path);

  CLI11_PARSE(app, argc, argv);

  using namespace symhorn;
  try {
    if (analyze->parsed()) {
      const auto H = read_hamiltonian(matrix_path);
      const auto rep = classify(H, profile_by_name(tol_name));
      json out = base_output("analyze", {{"matrix", matrix_path}, {"tol_profile", tol_name}});
      out["report"] = to_json(rep);
      emit(out, out_path);
    } else if (normal->parsed()) {
      const auto H = read_hamiltonian(matrix_path);
      const auto nf = normal_form(H, profile_by_name(tol_name));
      json out = base_output("normal-form",
                             {{"matrix", matrix_path}, {"tol_profile", tol_name},
                              {"emit_s", emit_s}});
      out["result"] = to_json(nf, emit_s);
      out["result"]["residual_tolerance"] =
          1e-8 * H.matrix().cwiseAbs().maxCoeff();
      emit(out, out_path);
    } else if (horn->parsed()) {
      const OrbitSpec lam{parse_tuple(lambda_str)}, mu{parse_tuple(mu_str)};
      SpreadSchedule sched{max_spread, levels};
      const auto cloud = horn_sample(lam, mu, num_samples, seed, sched);
      write_cloud_csv(cloud, out_path);
    } else if (hull->parsed()) {
      const auto cloud = read_cloud_csv(in_path);
      const auto summary = hull_summary(cloud.points);
      json out = base_output("hull", {{"in", in_path}});
      out["hull"] = to_json(summary);
      emit(out, out_path);
    } else if (conv->parsed()) {
      const auto cloud = read_cloud_csv(in_path);
      const auto rep = convexity_probe(cloud, pairs, budget, seed);
      json out = base_output("convexity", {{"in", in_path}, {"pairs", pairs},
                                           {"budget", budget}, {"seed", seed}});
      out["report"] = to_json(rep);
      emit(out, out_path);
    } else if (pert->parsed()) {
      const auto H = read_hamiltonian(matrix_path);
      const auto rep = perturbation_probe(H, trials, parse_fractions(fractions_str),
                                          seed, profile_by_name(tol_name));
      json out = base_output("perturb", {{"matrix", matrix_path}, {"trials", trials},
                                         {"fractions", fractions_str}, {"seed", seed},
                                         {"tol_profile", tol_name}});
      out["report"] = to_json(rep);
      emit(out, out_path);
    }
  } catch (const ValidationError& e) {
    std::cerr << json{{"error", "validation"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << json{{"error", "numerical"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  return 0;
}
