#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <torsion_forge/error.hpp>
#include <torsion_forge/lens.hpp>

namespace tf_cli {

int thread_budget() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("TORSION_FORGE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

std::vector<SweepRow> run_sweep(int p_min, int p_max, std::uint64_t seed, int threads) {
  std::vector<SweepRow> rows;
  for (int p = p_min; p <= p_max; ++p)
    for (int q = 1; q < p; ++q)
      if (std::gcd(p, q) == 1)
        for (int k = 1; k < p; ++k) rows.push_back({p, q, k, 0.0, 0.0, 0.0, {}});

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& r = rows[i];
      r.closed_form = torsion_forge::closed_form_invariant(r.p, r.q, r.k);
      try {
        r.pipeline = torsion_forge::lens_invariant(r.p, r.q, r.k, seed).invariant;
        r.rel_error = std::abs(r.pipeline - r.closed_form) / std::abs(r.closed_form);
      } catch (const torsion_forge::Error& e) {
        r.error = e.what();
        r.rel_error = NAN;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::max(1, threads); ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  return rows;
}

namespace {

double max_error(const std::vector<SweepRow>& rows) {
  double m = 0.0;
  for (const SweepRow& r : rows) m = std::max(m, std::isnan(r.rel_error) ? INFINITY : r.rel_error);
  return m;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string format_sweep(const std::vector<SweepRow>& rows, const std::string& format) {
  std::ostringstream out;
  if (format == "json") {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["max_rel_error"] = max_error(rows);
    nlohmann::json arr = nlohmann::json::array();
    for (const SweepRow& r : rows) {
      nlohmann::json e{{"p", r.p}, {"q", r.q}, {"k", r.k}, {"closed_form", r.closed_form}};
      if (r.error.empty()) {
        e["pipeline"] = r.pipeline;
        e["rel_error"] = r.rel_error;
      } else {
        e["error"] = r.error;
      }
      arr.push_back(std::move(e));
    }
    j["rows"] = std::move(arr);
    out << j.dump(2) << "\n";
  } else if (format == "csv") {
    out << "p,q,k,pipeline,closed_form,rel_error\n";
    for (const SweepRow& r : rows)
      out << r.p << ',' << r.q << ',' << r.k << ',' << (r.error.empty() ? num(r.pipeline) : "") << ','
          << num(r.closed_form) << ',' << (r.error.empty() ? num(r.rel_error) : "nan") << "\n";
    out << "# max_rel_error," << num(max_error(rows)) << "\n";
  } else {
    char buf[160];
    for (const SweepRow& r : rows) {
      std::snprintf(buf, sizeof buf, "L(%d,%d) k=%-3d I=%-20.12g closed=%-20.12g err=%.2e%s\n", r.p, r.q, r.k,
                    r.pipeline, r.closed_form, r.rel_error, r.error.empty() ? "" : "  FAILED");
      out << buf;
    }
    out << "max relative error " << num(max_error(rows)) << "\n";
  }
  return out.str();
}

}  // namespace tf_cli
