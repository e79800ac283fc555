// torsion-forge: command-line front end.
//
// Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
// 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <torsion_forge/error.hpp>
#include <torsion_forge/lens.hpp>
#include <torsion_forge/triangulation_json.hpp>

#include "suites.hpp"
#include "sweep.hpp"

namespace tf = torsion_forge;
using tf_cli::Check;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

struct Options {
  int p = 5, q = 1, k = 1, p_min = 2, p_max = 12, trials = 100, sequences = 20, length = 4, seeds = 5;
  int threads = 0;
  std::uint64_t seed = kDefaultSeed;
  bool json = false, classify = false, trivial = false;
  std::string placement = "random", format = "text", input, output, moves = "1-4,4-1,2-3,3-2";
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw tf::Error(tf::ErrorCode::InvalidParams, "cannot write " + o.output);
  f << text;
}

int report_checks(const Options& o, const std::string& suite, const std::vector<Check>& checks) {
  bool all = true;
  for (const Check& c : checks) all = all && c.pass;
  if (o.json) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["suite"] = suite;
    j["pass"] = all;
    for (const Check& c : checks)
      j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"residual", c.residual}, {"detail", c.detail}});
    std::cout << j.dump(2) << "\n";
  } else {
    for (const Check& c : checks)
      std::cout << (c.pass ? "pass  " : "FAIL  ") << c.name << "  residual " << num(c.residual)
                << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    std::cout << suite << ": " << (all ? "pass" : "FAIL") << "\n";
  }
  return all ? 0 : 1;
}

std::vector<tf::MoveKind> parse_moves(const std::string& text) {
  std::vector<tf::MoveKind> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(tf::parse_move_kind(item));
  if (out.empty()) throw tf::Error(tf::ErrorCode::InvalidParams, "no moves given");
  return out;
}

tf::Placement parse_placement(const std::string& s) {
  if (s == "random") return tf::Placement::Random;
  if (s == "anchor") return tf::Placement::Anchor;
  throw tf::Error(tf::ErrorCode::InvalidParams, "placement must be random or anchor");
}

void print_report(const Options& o, const tf::InvariantReport& r) {
  if (o.json) {
    std::cout << r.to_json() << "\n";
    return;
  }
  std::cout << "I      " << num(r.invariant) << "\n"
            << "tau    " << num(r.tau) << "\n"
            << "det f1 " << num(r.det_f1) << "\n"
            << "det f2 " << num(r.det_f2) << "\n"
            << "det f3 " << num(r.det_f3) << "\n"
            << "prod(-V) " << num(r.prod_minus_v) << "\n"
            << "cells  " << r.n0 << " " << r.n1 << " " << r.n2 << " " << r.n3 << "\n"
            << "seed   " << r.seed << " (attempts " << r.attempts << ")\n";
}

int cmd_invariant_lens(const Options& o) {
  print_report(o, tf::lens_invariant(o.p, o.q, o.k, o.seed, parse_placement(o.placement)));
  return 0;
}

int cmd_invariant_closed(const Options& o) {
  const double v = tf::closed_form_invariant(o.p, o.q, o.k);
  if (o.json) {
    nlohmann::json j{{"schema_version", 1}, {"p", o.p}, {"q", o.q}, {"k", o.k}, {"invariant", v}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << num(v) << "\n";
  }
  return 0;
}

int cmd_invariant_modified(const Options& o) {
  const tf::ModifiedReport r = tf::modified_invariants(o.p, o.q);
  if (o.json) {
    nlohmann::json j{{"schema_version", 1}, {"p", o.p}, {"q", o.q}, {"product", r.product}};
    for (const tf::ModifiedBlock& b : r.blocks)
      j["blocks"].push_back({{"j", b.j},
                             {"invariant", b.invariant},
                             {"closed_form", tf::closed_form_modified(o.p, o.q, b.j)},
                             {"ranks", b.ranks}});
    std::cout << j.dump(2) << "\n";
  } else {
    for (const tf::ModifiedBlock& b : r.blocks)
      std::cout << "I_" << b.j << " " << num(b.invariant) << "  closed " << num(tf::closed_form_modified(o.p, o.q, b.j))
                << "\n";
    std::cout << "product " << num(r.product) << "\n";
  }
  return 0;
}

int cmd_invariant_file(const Options& o) {
  std::ifstream f(o.input, std::ios::binary);
  if (!f) throw tf::Error(tf::ErrorCode::InvalidParams, "cannot read " + o.input);
  std::stringstream ss;
  ss << f.rdbuf();
  const tf::DecoratedTriangulation dt = tf::triangulation_from_json(ss.str());
  tf::LiftedTriangulation lt;
  lt.tri = dt.tri;
  lt.decoration = dt.decoration ? *dt.decoration : tf::HolonomyDecoration::trivial(dt.tri.tet_count());
  lt.anchor.assign(tf::quotient_cells(lt.tri).n0, tf::Vec3::Zero());
  const int order = lt.decoration.order;
  tf::Representation rep = tf::Representation::trivial(order);
  if (order > 1 && !o.trivial) rep = tf::rho_k(order, o.k);
  tf::PipelineOptions opt;
  opt.placement = tf::Placement::Random;
  print_report(o, tf::invariant(lt, rep, o.seed, opt));
  return 0;
}

int cmd_export(const Options& o, const std::string& what) {
  if (what == "lens") {
    const tf::LiftedTriangulation lt = tf::lens_triangulation(o.p, o.q);
    emit(o, tf::to_json(lt.tri, lt.decoration) + "\n");
  } else if (what == "cover") {
    emit(o, tf::to_json(tf::lens_cover_triangulation(o.p, o.q).tri) + "\n");
  } else {
    const tf::LiftedTriangulation lt = tf::subdivided_lens(tf::lens_cover_triangulation(o.p, o.q));
    emit(o, tf::to_json(lt.tri, lt.decoration) + "\n");
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  if (o.classify) {
    const tf::Classification c = tf::classify(o.p);
    const auto groups = [](const std::vector<std::vector<int>>& g) {
      std::string s;
      for (const auto& cls : g) {
        s += "{";
        for (std::size_t i = 0; i < cls.size(); ++i) s += (i ? "," : "") + std::to_string(cls[i]);
        s += "} ";
      }
      return s;
    };
    if (o.format == "json") {
      nlohmann::json j{{"schema_version", 1},
                       {"p", o.p},
                       {"by_invariant", c.by_invariant},
                       {"by_criterion", c.by_criterion},
                       {"consistent", c.consistent}};
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "p=" << o.p << " classes " << groups(c.by_invariant) << "\n"
                << "criterion   " << groups(c.by_criterion) << "\n"
                << (c.consistent ? "consistent" : "INCONSISTENT") << "\n";
    }
    return c.consistent ? 0 : 1;
  }
  if (o.p_max < 2 || o.p_min < 2 || o.p_min > o.p_max)
    throw tf::Error(tf::ErrorCode::InvalidParams, "need 2 <= p-min <= p-max");
  if (o.format != "csv" && o.format != "json" && o.format != "text")
    throw tf::Error(tf::ErrorCode::InvalidParams, "format must be csv, json or text");
  const int threads = o.threads > 0 ? std::min(o.threads, tf_cli::thread_budget()) : tf_cli::thread_budget();
  const auto rows = tf_cli::run_sweep(o.p_min, o.p_max, o.seed, threads);
  emit(o, tf_cli::format_sweep(rows, o.format));
  for (const auto& r : rows)
    if (!r.error.empty()) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Geometric torsion invariants of 3-manifolds"};
  app.require_subcommand(1);

  const auto lens_flags = [&o](CLI::App* c, bool with_k) {
    c->add_option("--p", o.p, "order of the fundamental group");
    c->add_option("--q", o.q, "lens parameter, coprime to p");
    if (with_k) c->add_option("--k", o.k, "representation index, 1 <= k < p");
    c->add_option("--seed", o.seed, "placement seed");
    c->add_flag("--json", o.json, "print JSON");
  };

  CLI::App* inv = app.add_subcommand("invariant", "compute an invariant");
  inv->require_subcommand(1);
  CLI::App* inv_lens = inv->add_subcommand("lens", "pipeline on the lens bipyramid");
  lens_flags(inv_lens, true);
  inv_lens->add_option("--placement", o.placement, "random or anchor");
  CLI::App* inv_closed = inv->add_subcommand("closed-form", "closed form for L(p,q) and rho_k");
  lens_flags(inv_closed, true);
  CLI::App* inv_mod = inv->add_subcommand("modified", "per-character invariants I_0..I_{p-1}");
  lens_flags(inv_mod, false);
  CLI::App* inv_file = inv->add_subcommand("file", "pipeline on a triangulation JSON file");
  inv_file->add_option("--input", o.input, "triangulation file")->required();
  inv_file->add_option("--k", o.k, "representation index for the decoration order");
  inv_file->add_flag("--trivial", o.trivial, "use the trivial representation");
  inv_file->add_option("--seed", o.seed, "placement seed");
  inv_file->add_flag("--json", o.json, "print JSON");

  CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
  ver->require_subcommand(1);
  CLI::App* v_pachner = ver->add_subcommand("pachner", "invariance under random Pachner moves");
  lens_flags(v_pachner, true);
  v_pachner->add_option("--moves", o.moves, "comma-separated move kinds");
  v_pachner->add_option("--sequences", o.sequences, "number of random sequences");
  v_pachner->add_option("--length", o.length, "moves per sequence");
  CLI::App* v_schlaefli = ver->add_subcommand("schlaefli", "Schlaefli identity on random tetrahedra");
  v_schlaefli->add_option("--trials", o.trials, "number of tetrahedra");
  v_schlaefli->add_option("--seed", o.seed, "seed");
  v_schlaefli->add_flag("--json", o.json, "print JSON");
  CLI::App* v_modified = ver->add_subcommand("modified", "block decomposition of the cover");
  lens_flags(v_modified, false);
  CLI::App* v_symmetry = ver->add_subcommand("symmetry", "symmetry of f3");
  lens_flags(v_symmetry, true);
  CLI::App* v_acyclic = ver->add_subcommand("acyclicity", "rank equalities of the shipped complexes");
  lens_flags(v_acyclic, true);
  CLI::App* v_placement = ver->add_subcommand("placement", "independence of placement and lifts");
  lens_flags(v_placement, true);
  v_placement->add_option("--seeds", o.seeds, "number of placements");

  CLI::App* sweep = app.add_subcommand("sweep", "pipeline against closed forms over many L(p,q)");
  sweep->add_option("--p-min", o.p_min, "smallest p");
  sweep->add_option("--p-max", o.p_max, "largest p");
  sweep->add_option("--p", o.p, "p for --classify");
  sweep->add_flag("--classify", o.classify, "group q by invariant multisets");
  sweep->add_option("--format", o.format, "csv, json or text");
  sweep->add_option("--seed", o.seed, "placement seed");
  sweep->add_option("--threads", o.threads, "worker threads (capped by TORSION_FORGE_THREADS)");
  sweep->add_option("--output", o.output, "write to a file instead of stdout");

  CLI::App* exp = app.add_subcommand("export", "write a triangulation as JSON");
  exp->require_subcommand(1);
  std::string export_kind;
  for (const char* name : {"lens", "cover", "subdivided"}) {
    CLI::App* c = exp->add_subcommand(name, std::string("the ") + name + " triangulation");
    c->add_option("--p", o.p, "p");
    c->add_option("--q", o.q, "q");
    c->add_option("--output", o.output, "output file");
    c->callback([&export_kind, name] { export_kind = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const tf_cli::LensArgs la{o.p, o.q, o.k, o.seed};
    if (*inv_lens) return cmd_invariant_lens(o);
    if (*inv_closed) return cmd_invariant_closed(o);
    if (*inv_mod) return cmd_invariant_modified(o);
    if (*inv_file) return cmd_invariant_file(o);
    if (*v_pachner) return report_checks(o, "pachner", tf_cli::verify_pachner(la, parse_moves(o.moves), o.sequences, o.length));
    if (*v_schlaefli) return report_checks(o, "schlaefli", tf_cli::verify_schlaefli(o.trials, o.seed));
    if (*v_modified) return report_checks(o, "modified", tf_cli::verify_modified(o.p, o.q));
    if (*v_symmetry) return report_checks(o, "symmetry", tf_cli::verify_symmetry(la));
    if (*v_acyclic) return report_checks(o, "acyclicity", tf_cli::verify_acyclicity(la));
    if (*v_placement) return report_checks(o, "placement", tf_cli::verify_placement(la, o.seeds));
    if (*sweep) return cmd_sweep(o);
    if (*exp) return cmd_export(o, export_kind);
  } catch (const tf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tf::is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
