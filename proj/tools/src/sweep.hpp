#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tf_cli {

struct SweepRow {
  int p = 0, q = 0, k = 0;
  double pipeline = 0.0;
  double closed_form = 0.0;
  double rel_error = 0.0;
  std::string error;  // set when the pipeline failed
};

/// hardware_concurrency, capped by TORSION_FORGE_THREADS when set.
int thread_budget();

/// All coprime (p, q) with p_min <= p <= p_max and 1 <= k < p, sorted by tuple.
std::vector<SweepRow> run_sweep(int p_min, int p_max, std::uint64_t seed, int threads);

std::string format_sweep(const std::vector<SweepRow>& rows, const std::string& format);

}  // namespace tf_cli
