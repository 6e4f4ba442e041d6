// Command-line front end: unify the equations of a problem file and print
// the most general unifier (or report that none exists).
//
// Exit codes: 0 unifier found, 1 no unifier, 2 bad input, 3 internal error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ratpat/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Saturation-based unification for rational pattern terms"};

  std::string file;
  std::string mode = "auto";
  bool trace = false;
  bool json = false;
  int check_depth = 0;
  long max_steps = 100000;

  app.add_option("file", file, "problem file ('-' or empty reads stdin)");
  app.add_option("--mode", mode, "term language: auto, fo or ho")
      ->check(CLI::IsMember({"auto", "fo", "ho"}));
  app.add_flag("--trace", trace, "print the saturation steps");
  app.add_flag("--json", json, "machine-readable output");
  app.add_option("--check-depth", check_depth,
                 "verify the unifier by expansion up to this depth");
  app.add_option("--max-steps", max_steps, "saturation step budget");

  CLI11_PARSE(app, argc, argv);

  std::string text;
  if (file.empty() || file == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream in(file);
    if (!in) {
      std::cerr << "error: cannot open '" << file << "'\n";
      return 2;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }

  ratpat::RunConfig cfg;
  cfg.mode = mode == "fo"   ? ratpat::ModeOpt::FirstOrder
             : mode == "ho" ? ratpat::ModeOpt::HigherOrder
                            : ratpat::ModeOpt::Auto;
  cfg.trace = trace;
  cfg.json = json;
  cfg.check_depth = check_depth;
  cfg.max_steps = max_steps;

  ratpat::RunResult res = ratpat::run(text, cfg);
  std::cout << res.out;
  std::cerr << res.err;
  return res.code;
}
