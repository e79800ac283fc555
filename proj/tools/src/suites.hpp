#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <torsion_forge/pipeline.hpp>

namespace tf_cli {

struct Check {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string detail;
};

struct LensArgs {
  int p = 5, q = 1, k = 1;
  std::uint64_t seed = 1;
};

std::vector<Check> verify_pachner(const LensArgs& a, const std::vector<torsion_forge::MoveKind>& kinds,
                                  int sequences, int length);
std::vector<Check> verify_schlaefli(int trials, std::uint64_t seed);
std::vector<Check> verify_modified(int p, int q);
std::vector<Check> verify_symmetry(const LensArgs& a);
std::vector<Check> verify_acyclicity(const LensArgs& a);
std::vector<Check> verify_placement(const LensArgs& a, int seeds);

}  // namespace tf_cli
