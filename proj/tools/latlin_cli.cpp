// latlin command-line tool. Every command prints a JSON result on stdout.
// Exit status: 0 when every assertion passes, 1 when one fails, 2 on error.

#include "latlin/latlin.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return json::parse(in, nullptr, true, true);
}

json model_request(const std::string& name, const std::vector<std::string>& params) {
  json p = json::object();
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--param expects name=value, got '" + kv + "'");
    p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return {{"name", name}, {"params", p}};
}

int run(const std::string& command, const json& request, const std::string& save) {
  char* out = nullptr;
  const latlin_status st = latlin_run(command.c_str(), request.dump().c_str(), &out);
  if (st != LATLIN_OK) {
    std::cerr << "latlin " << command << ": " << latlin_status_string(st) << ": " << latlin_last_error() << '\n';
    return 2;
  }
  const json result = json::parse(out);
  latlin_string_free(out);
  std::cout << result.dump(2) << '\n';
  if (!save.empty()) {
    std::ofstream f(save);
    f << result.dump(2) << '\n';
  }
  return result.value("passed", false) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Atomistic lattice dynamics, linear elastodynamic limit, and convergence harness"};
  app.require_subcommand(1);
  std::string result_path;
  app.add_option("--result", result_path, "Also write the JSON result to this file");

  std::string config;
  std::string out_dir;
  std::string model;
  std::vector<std::string> params;
  int dim = 0;
  int trials = 200;
  int skew = 100;
  std::uint64_t seed = 1;
  std::string traj;
  double tol = 1e-6;

  auto* sim = app.add_subcommand("simulate", "Run one lattice trajectory with its energy audit");
  sim->add_option("--config", config, "Simulation config (JSON)")->required()->check(CLI::ExistingFile);

  auto* conv = app.add_subcommand("converge", "Run an eps-sweep against the continuum reference");
  conv->add_option("--config", config, "Sweep config (JSON)")->required()->check(CLI::ExistingFile);
  conv->add_option("--out", out_dir, "Output directory for CSV and JSON reports")->required();

  auto* ten = app.add_subcommand("tensor", "Print the elasticity tensor and its symmetry report");
  ten->add_option("--model", model, "harmonic_chain | cauchy_born_split | quartic_probe")->required();
  ten->add_option("--param", params, "Model parameter name=value (repeatable)");
  ten->add_option("--dim", dim, "Dimension (default 1, or 2 for cauchy_born_split)")->check(CLI::Range(1, 3));
  ten->add_option("--skew-samples", skew, "Random skew matrices tested")->check(CLI::PositiveNumber);
  ten->add_option("--seed", seed, "Random seed");

  auto* aud = app.add_subcommand("audit", "Re-run the energy audit on a saved trajectory");
  aud->add_option("--traj", traj, "Binary trajectory file")->required()->check(CLI::ExistingFile);
  aud->add_option("--tol", tol, "Relative EDIE tolerance");

  auto* rec = app.add_subcommand("recover", "Recovery-sequence check for smooth fields");
  rec->add_option("--config", config, "Recovery config (JSON)")->required()->check(CLI::ExistingFile);

  auto* chk = app.add_subcommand("check-model", "Sampled checks of the cell energy assumptions");
  chk->add_option("--model", model, "harmonic_chain | cauchy_born_split | quartic_probe")->required();
  chk->add_option("--param", params, "Model parameter name=value (repeatable)");
  chk->add_option("--dim", dim, "Dimension (default 1, or 2 for cauchy_born_split)")->check(CLI::Range(1, 3));
  chk->add_option("--trials", trials, "Random trials per check")->check(CLI::PositiveNumber);
  chk->add_option("--seed", seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    auto with_lattice = [&](json req) {
      if (dim > 0) req["lattice"] = {{"dim", dim}};
      return req;
    };
    if (*sim) return run("simulate", read_file(config), result_path);
    if (*conv) return run("converge", {{"config", read_file(config)}, {"out", out_dir}}, result_path);
    if (*ten) {
      return run("tensor", with_lattice({{"model", model_request(model, params)}, {"skew_samples", skew}, {"seed", seed}}),
                 result_path);
    }
    if (*aud) return run("audit", {{"trajectory", traj}, {"edie_tolerance", tol}}, result_path);
    if (*rec) return run("recover", read_file(config), result_path);
    if (*chk) {
      return run("check-model", with_lattice({{"model", model_request(model, params)}, {"trials", trials}, {"seed", seed}}),
                 result_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "latlin: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
