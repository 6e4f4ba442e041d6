#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ratpat/elab.hpp"
#include "ratpat/flatten.hpp"
#include "ratpat/surface.hpp"

namespace testing {

inline std::string load_fixture(const std::string& name) {
  std::string path = std::string(RATPAT_FIXTURES) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing fixture " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Pipeline {
  ratpat::NameSupply names;
  ratpat::Problem problem;
  ratpat::ConcreteContext concrete;
  ratpat::UnifContext flat;
};

inline Pipeline pipeline(const std::string& text) {
  Pipeline p;
  p.problem = ratpat::parse_problem(text);
  p.concrete = ratpat::elaborate(p.problem, p.names);
  p.flat = ratpat::flatten(p.concrete, p.names);
  return p;
}

inline Pipeline pipeline_fixture(const std::string& name) {
  return pipeline(load_fixture(name));
}

}  // namespace testing
