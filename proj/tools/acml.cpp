// acml - almost contact metric lab
//
// run        execute a scenario file and print/emit the report
// fixtures   list the bundled scenarios
// parse-expr parse one expression and dump its tree

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "acml/scenario.hpp"

namespace {

int cmd_run(const std::string& file, int points, long long seed, double tol,
            bool fd_check, const std::string& json_path, bool quiet, int threads) {
  acml::Scenario sc;
  try {
    sc = acml::load_scenario_file(file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << file << ": " << e.what() << "\n";
    return 2;
  }
  acml::RunOptions opts;
  opts.threads = threads;
  opts.fd_check = fd_check;
  if (points > 0) opts.points_override = points;
  if (seed >= 0) opts.seed_override = static_cast<uint64_t>(seed);
  if (tol > 0) opts.tol_override = tol;

  const acml::Report rep = acml::run_scenario(sc, opts);
  if (!quiet) std::cout << acml::report_summary(rep);
  if (!json_path.empty()) {
    const std::string bytes = acml::report_to_json(rep);
    if (json_path == "-") {
      std::cout << bytes;
    } else {
      std::ofstream out(json_path, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot write " << json_path << "\n";
        return 2;
      }
      out << bytes;
    }
  }
  return rep.any_fail() ? 1 : 0;
}

int cmd_fixtures(const std::string& print_name) {
  const auto& bundle = acml::bundled_scenarios();
  if (!print_name.empty()) {
    auto it = bundle.find(print_name);
    if (it == bundle.end()) it = bundle.find(print_name + ".scn");
    if (it == bundle.end()) {
      std::cerr << "error: no bundled scenario named '" << print_name << "'\n";
      return 2;
    }
    std::cout << it->second;
    return 0;
  }
  for (const auto& [name, text] : bundle) {
    std::string title;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto pos = line.find("name =");
      if (pos != std::string::npos) {
        title = line.substr(pos + 6);
        break;
      }
    }
    std::printf("%-20s %s\n", name.c_str(), title.c_str());
  }
  std::cout << "run one with: acml run <name>   (a matching file on disk wins)\n";
  return 0;
}

int cmd_parse_expr(const std::string& source, int dim) {
  try {
    const acml::Expr e = acml::Expr::parse(source, dim);
    std::cout << "input:   " << source << "\n";
    std::cout << "ast:     " << e.sexpr() << "\n";
    std::cout << "printed: " << e.print() << "\n";
    return 0;
  } catch (const acml::ParseError& err) {
    std::cerr << "parse error at offset " << err.offset() << ": " << err.what()
              << "\n";
    std::cerr << "  " << source << "\n";
    std::cerr << "  " << std::string(err.offset(), ' ') << "^\n";
    if (!err.expected().empty()) {
      std::cerr << "  expected:";
      for (const auto& t : err.expected()) std::cerr << ' ' << t;
      std::cerr << "\n";
    }
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"almost contact metric lab"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario file");
  std::string file;
  int points = 0;
  long long seed = -1;
  double tol = 0.0;
  bool fd_check = false;
  std::string json_path;
  bool quiet = false;
  int threads = 1;
  run->add_option("scenario", file, "scenario file (or bundled fixture name)")
      ->required();
  run->add_option("--points", points, "override the sample point count");
  run->add_option("--seed", seed, "override the sample seed");
  run->add_option("--tol", tol, "override the tolerance");
  run->add_flag("--fd-check", fd_check,
                "cross-check jet derivatives against finite differences");
  run->add_option("--json", json_path, "write the JSON report here ('-' = stdout)");
  run->add_flag("--quiet", quiet, "suppress the human summary");
  run->add_option("--threads", threads, "worker threads for point sweeps");

  auto* fixtures = app.add_subcommand("fixtures", "list bundled scenarios");
  std::string print_name;
  fixtures->add_option("--print", print_name, "print one bundled scenario");

  auto* parse = app.add_subcommand("parse-expr", "parse an expression");
  std::string source;
  int dim = 3;
  parse->add_option("expr", source, "expression source")->required();
  parse->add_option("--dim", dim, "chart dimension (coordinates x1..xdim)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(file, points, seed, tol, fd_check, json_path, quiet, threads);
  if (fixtures->parsed()) return cmd_fixtures(print_name);
  if (parse->parsed()) return cmd_parse_expr(source, dim);
  return 2;
}
