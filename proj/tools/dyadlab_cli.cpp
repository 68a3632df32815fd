#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "dyadlab/error.hpp"
#include "dyadlab/experiments.hpp"
#include "dyadlab/grid_function.hpp"
#include "dyadlab/sparse_family.hpp"
#include "dyadlab/weights.hpp"

using namespace dyadlab;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cmd_apchar(const std::string& weight_arg, double p, int M, int J, bool triples) {
  json out;
  out["p"] = p;
  if (weight_arg.rfind("power:", 0) == 0) {
    const double eps = std::stod(weight_arg.substr(6));
    const Weight w = Weight::power(eps);
    const Domain d(M, J);
    const ApCharacteristic a = ap_characteristic(w, p, d, {triples});
    out["weight"] = {{"kind", "power"}, {"epsilon", eps}};
    out["closed_form"] = power_weight_ap(eps, p);
    out["value"] = a.value;
    out["witness"] = {{"level", a.witness.level}, {"index", a.witness.index}, {"triple", a.witness_is_triple}};
    out["domain"] = {{"M", M}, {"J", J}};
  } else {
    const Weight w = Weight::from_json(read_file(weight_arg));
    if (!w.as_step()) throw FormatError("weight file must describe a step weight");
    const Domain d = w.as_step()->domain;
    const ApCharacteristic a = ap_characteristic(w, p, d, {triples});
    out["weight"] = {{"kind", "step"}, {"id", w.id()}};
    out["value"] = a.value;
    out["witness"] = {{"level", a.witness.level}, {"index", a.witness.index}, {"triple", a.witness_is_triple}};
    out["domain"] = {{"M", d.top_level}, {"J", d.resolution}};
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_dual_test(double alpha, double p, const std::vector<double>& eps) {
  const ExampleResult r = example_dual_testing(p, alpha, eps);
  std::cout << records_csv(r.records);
  if (r.fit) {
    std::cerr << "slope " << r.fit->slope << " r2 " << r.fit->r2 << " (expected " << 1.0 - alpha << ")\n";
    const double tol = default_slope_tolerance(*r.fit);
    return std::abs(r.fit->slope - (1.0 - alpha)) <= tol ? 0 : 1;
  }
  return 0;
}

int cmd_verify(const std::string& suite) {
  const VerifyReport r = verify(suite);
  for (const auto& e : r.entries) {
    std::cerr << (e.pass ? "PASS " : "FAIL ") << e.suite << '/' << e.name << ": " << e.detail << '\n';
  }
  std::cout << r.to_json() << '\n';
  return r.passed() ? 0 : 1;
}

int cmd_dominate(const std::string& input) {
  std::ifstream in(input);
  if (!in) throw FormatError("cannot open " + input);
  const GridFunction f = GridFunction::read_csv(in);
  const SparseFamily fam = dominating_family(f, DyadicInterval::whole(f.domain()));
  fam.write(std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadic weighted square-function lab"};
  app.require_subcommand(1);

  std::string weight_arg;
  double p = 2.0;
  int M = 4;
  int J = 10;
  bool triples = false;
  auto* ap = app.add_subcommand("apchar", "dyadic A_p characteristic of a weight");
  ap->add_option("--weight", weight_arg, "power:EPS or a weight JSON file")->required();
  ap->add_option("--p", p, "exponent")->required();
  ap->add_option("--M", M, "top level for power weights");
  ap->add_option("--J", J, "resolution for power weights");
  ap->add_flag("--triples", triples, "also scan adjacent triples");

  std::string config;
  auto* sw = app.add_subcommand("sweep", "run a parameter sweep");
  sw->add_option("--config", config, "flat JSON config")->required()->check(CLI::ExistingFile);

  double alpha = 0.75;
  std::vector<double> eps_list;
  auto* dt = app.add_subcommand("dual-test", "dual testing ratio for power weights");
  dt->add_option("--alpha", alpha, "testing sequence exponent")->required();
  dt->add_option("--p", p, "exponent")->required();
  dt->add_option("--eps-list", eps_list, "epsilons")->required();

  std::string suite = "all";
  auto* vf = app.add_subcommand("verify", "run a verification suite");
  vf->add_option("--suite", suite, "core, proof, examples or all");

  std::string input;
  auto* dom = app.add_subcommand("dominate", "sparse family dominating a grid function");
  dom->add_option("--input", input, "CSV with header x,value")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ap) return cmd_apchar(weight_arg, p, M, J, triples);
    if (*sw) return sweep(SweepConfig::load(config));
    if (*dt) return cmd_dual_test(alpha, p, eps_list);
    if (*vf) return cmd_verify(suite);
    if (*dom) return cmd_dominate(input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
