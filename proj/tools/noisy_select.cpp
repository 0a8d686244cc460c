#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "noisy_select/noisy_select.hpp"

namespace ns = noisy_select;

namespace {

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw ns::ParameterError("cannot write " + path);
  return file;
}

struct RunArgs {
  std::map<std::string, std::string> cell;
  std::string out;
  bool timing = false;
};

void add_cell_options(CLI::App& app, RunArgs& a) {
  auto opt = [&](const char* flag, const char* key, const char* help) {
    return app.add_option_function<std::string>(flag, [&a, key](const std::string& v) { a.cell[key] = v; }, help);
  };
  opt("--alg", "alg", "algorithm name")->required();
  opt("--n", "n", "number of elements")->required();
  opt("--k", "k", "output size");
  opt("--v", "v", "threshold value");
  opt("--delta", "delta", "error probability");
  opt("--r", "r", "round budget");
  opt("--gamma", "gamma", "approximation slack");
  opt("--lambda", "lambda", "values above v_k (profiled instances)");
  opt("--kappa", "kappa", "values equal to v_k (profiled instances)");
  opt("--instance", "instance", "distinct | bounded | profiled | threshold");
  opt("--levels", "levels", "distinct values (bounded, threshold)");
  opt("--epsilon", "epsilon", "bounded instances: levels <= ceil(n^(1-epsilon))");
  opt("--kv", "kv", "threshold instances: elements >= v");
  opt("--tail", "tail", "profiled instances: distinct | tied");
  opt("--instance-seed", "instance_seed", "instance generator seed");
  opt("--adversary", "adversary", "truthful | uniform | sticky | rank1 | bucket");
  opt("--bucket-size", "bucket_size", "bucket adversary: bucket size");
  opt("--trials", "trials", "Monte Carlo trials (default 300)");
  opt("--seed", "seed", "master seed");
}

void print_report(const ns::FitReport& rep, std::ostream& out) {
  out << "formula " << ns::formula_name(rep.formula) << '\n';
  if (rep.degenerate) {
    out << "degenerate fit: " << rep.note << '\n';
    return;
  }
  out << std::setprecision(6);
  out << "constant " << rep.constant << '\n' << "max_residual_ratio " << rep.max_residual_ratio << '\n';
  out << "term,mean_queries,ratio\n";
  for (const auto& p : rep.points) out << p.term << ',' << p.queries << ',' << p.ratio << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy-oracle selection experiments"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run one Monte Carlo cell and write a CSV row");
  add_cell_options(*run_cmd, run);
  run_cmd->add_option("--out", run.out, "output CSV (default stdout)");
  run_cmd->add_flag("--timing", run.timing, "append a wall_seconds column");

  std::string grid_path;
  std::string sweep_out;
  bool sweep_timing = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "run every cell of a key=value grid");
  sweep_cmd->add_option("--grid", grid_path, "grid file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", sweep_out, "output CSV (default stdout)");
  sweep_cmd->add_flag("--timing", sweep_timing, "append a wall_seconds column");

  std::string report_in;
  std::string formula;
  auto* report_cmd = app.add_subcommand("report", "fit mean queries against a budget formula");
  report_cmd->add_option("--in", report_in, "CSV from run or sweep")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--formula", formula,
                         "n | n_log_n | n_log_b_delta | n_log_kb_delta | n_log_k2 | n_plus_k_log_n")
      ->required();

  RunArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "write an instance file");
  auto gen_opt = [&](const char* flag, const char* key) {
    return gen_cmd->add_option_function<std::string>(flag, [&gen, key](const std::string& v) { gen.cell[key] = v; });
  };
  gen_opt("--instance", "instance")->required();
  gen_opt("--n", "n")->required();
  gen_opt("--k", "k");
  gen_opt("--lambda", "lambda");
  gen_opt("--kappa", "kappa");
  gen_opt("--levels", "levels");
  gen_opt("--epsilon", "epsilon");
  gen_opt("--v", "v");
  gen_opt("--kv", "kv");
  gen_opt("--tail", "tail");
  gen_opt("--seed", "instance_seed");
  gen_cmd->add_option("--out", gen.out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto constants = ns::Constants::from_environment();
    if (*run_cmd) {
      const auto cell = ns::cell_from(run.cell, constants);
      const auto rec = ns::run_cell(cell);
      std::ofstream file;
      ns::write_csv(open_out(run.out, file), {rec}, run.timing);
    } else if (*sweep_cmd) {
      std::ifstream in(grid_path);
      const auto grid = ns::Grid::parse(in);
      std::ofstream file;
      ns::sweep(grid, open_out(sweep_out, file), constants, sweep_timing);
    } else if (*report_cmd) {
      std::ifstream in(report_in);
      print_report(ns::scaling_report(ns::read_csv(in), ns::parse_formula(formula)), std::cout);
    } else if (*gen_cmd) {
      const auto spec = ns::cell_from(gen.cell, constants).instance;
      std::ofstream file;
      ns::write_instance(open_out(gen.out, file), ns::generate(spec));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
