// Command-line front end: transform raw VRPTW files into synchronized
// instances, solve them, validate solutions, and run benchmark manifests.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "vrpsc/bench.hpp"
#include "vrpsc/instance.hpp"
#include "vrpsc/oracle.hpp"
#include "vrpsc/search.hpp"
#include "vrpsc/solution.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicle routing with synchronized special services"};
  app.require_subcommand(1);

  // transform ---------------------------------------------------------------
  auto* t = app.add_subcommand("transform", "Turn a raw VRPTW file into an instance");
  std::string t_input, t_output;
  double t_ns = 0.25, t_alpha = 0, t_beta = 10;
  int t_take = 0, t_vs = 0;
  bool t_truncate = false;
  t->add_option("--input", t_input, "raw VRPTW file")->required();
  t->add_option("--out", t_output, "instance file to write")->required();
  t->add_option("--ns", t_ns, "fraction of customers that become special");
  t->add_option("--alpha", t_alpha, "sync slack below the copy's start");
  t->add_option("--beta", t_beta, "sync slack above the copy's start");
  t->add_option("--customers", t_take, "keep only the first N customers (0 = all)");
  t->add_option("--fleet-special", t_vs, "special fleet size (0 = same as regular)");
  t->add_flag("--truncate-distances", t_truncate, "truncate travel values to one decimal");

  // solve -------------------------------------------------------------------
  auto* s = app.add_subcommand("solve", "Run the search on an instance");
  std::string s_instance, s_out, s_trace, s_config;
  std::uint64_t s_seed = 1;
  int s_iterations = -1;
  s->add_option("--instance", s_instance, "instance file")->required();
  s->add_option("--out", s_out, "solution file to write");
  s->add_option("--trace", s_trace, "trace file to write (one record per iteration)");
  s->add_option("--config", s_config, "search config json");
  s->add_option("--seed", s_seed, "random seed");
  s->add_option("--iterations", s_iterations, "iteration count override");

  // validate ----------------------------------------------------------------
  auto* v = app.add_subcommand("validate", "Check a solution file against its instance");
  std::string v_instance, v_solution;
  v->add_option("--instance", v_instance, "instance file")->required();
  v->add_option("--solution", v_solution, "solution file")->required();

  // bench -------------------------------------------------------------------
  auto* b = app.add_subcommand("bench", "Run a benchmark manifest");
  std::string b_manifest, b_out, b_reference;
  int b_workers = 0;
  b->add_option("--manifest", b_manifest, "manifest json")->required();
  b->add_option("--out-dir", b_out, "output directory override");
  b->add_option("--workers", b_workers, "worker thread override");
  b->add_option("--reference", b_reference, "reference csv override");

  // report ------------------------------------------------------------------
  auto* r = app.add_subcommand("report", "Re-aggregate a details.csv");
  std::string r_details, r_reference, r_out = "bench_out";
  r->add_option("--details", r_details, "details.csv from a previous run")->required();
  r->add_option("--reference", r_reference, "reference csv");
  r->add_option("--out-dir", r_out, "output directory");

  // oracle ------------------------------------------------------------------
  auto* o = app.add_subcommand("oracle", "Exhaustively solve a tiny instance");
  std::string o_instance, o_out;
  o->add_option("--instance", o_instance, "instance file")->required();
  o->add_option("--out", o_out, "solution file to write");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*t) {
      vrpsc::RawVrptw raw = vrpsc::parse_vrptw(slurp(t_input));
      raw.name = std::filesystem::path(t_input).stem().string();
      raw = vrpsc::take_customers(raw, t_take);
      vrpsc::TransformOptions opt;
      opt.ns = t_ns;
      opt.alpha = t_alpha;
      opt.beta = t_beta;
      opt.vehicles_special = t_vs;
      opt.truncate_distances = t_truncate;
      vrpsc::Instance ins = vrpsc::Instance::transform(raw, opt);
      spit(t_output, ins.to_text());
      std::cout << ins.name() << ": " << ins.size() << " vertices, "
                << ins.special_customers().size() << " special" << std::endl;
    } else if (*s) {
      vrpsc::Instance ins = vrpsc::Instance::from_text(slurp(s_instance));
      vrpsc::SearchConfig cfg;
      if (!s_config.empty()) cfg = vrpsc::config_from_json(slurp(s_config));
      if (s->count("--seed")) cfg.seed = s_seed;
      if (s_iterations >= 0) cfg.iterations = s_iterations;
      cfg.keep_trace = cfg.keep_trace || !s_trace.empty();
      vrpsc::SearchResult res = vrpsc::run_search(ins, cfg);
      auto violations = vrpsc::validate(ins, res.best);
      if (!violations.empty()) {
        std::cerr << "refusing to write an invalid solution:" << std::endl;
        for (const auto& viol : violations) {
          std::cerr << "  [" << to_string(viol.code) << "] " << viol.message << std::endl;
        }
        return 1;
      }
      if (!s_out.empty()) spit(s_out, res.best.to_text(ins));
      if (!s_trace.empty()) {
        std::ostringstream os;
        for (const auto& row : res.trace) os << vrpsc::trace_line(row) << "\n";
        spit(s_trace, os.str());
      }
      std::cout << "initial " << vrpsc::fmt_num(res.initial_cost) << " final "
                << vrpsc::fmt_num(res.best_cost) << " iterations " << res.iterations
                << " runtime_s " << vrpsc::fmt_num(res.runtime_seconds) << std::endl;
    } else if (*v) {
      vrpsc::Instance ins = vrpsc::Instance::from_text(slurp(v_instance));
      vrpsc::Solution sol = vrpsc::Solution::from_text(ins, slurp(v_solution));
      auto violations = vrpsc::validate(ins, sol);
      if (violations.empty()) {
        std::cout << "ok: cost " << vrpsc::fmt_num(sol.cost()) << std::endl;
        return 0;
      }
      for (const auto& viol : violations) {
        std::cout << "[" << to_string(viol.code) << "] " << viol.message << std::endl;
      }
      return 1;
    } else if (*b) {
      vrpsc::BenchManifest m = vrpsc::manifest_from_json(slurp(b_manifest));
      // Relative paths in the manifest resolve against the manifest location.
      const auto base = std::filesystem::path(b_manifest).parent_path();
      auto resolve = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative()) {
          p = (base / p).string();
        }
      };
      for (auto& job : m.jobs) {
        resolve(job.instance_path);
        resolve(job.raw_path);
      }
      resolve(m.reference_path);
      if (!b_out.empty()) m.output_dir = b_out;
      else resolve(m.output_dir);
      if (b_workers > 0) m.workers = b_workers;
      if (!b_reference.empty()) m.reference_path = b_reference;
      vrpsc::BenchReport report = vrpsc::run_bench(m);
      vrpsc::write_report_files(report, m.output_dir);
      for (const auto& c : report.classes) {
        std::cout << c.klass << ": runs " << c.runs << " mean_final "
                  << vrpsc::fmt_num(c.mean_final) << " mean_imp% "
                  << vrpsc::fmt_num(c.mean_imp);
        if (c.has_reference) std::cout << " gap% " << vrpsc::fmt_num(c.gap_pct);
        std::cout << std::endl;
      }
    } else if (*r) {
      vrpsc::BenchReport report;
      report.rows = vrpsc::read_details_csv(r_details);
      std::map<std::string, double> ref;
      if (!r_reference.empty()) ref = vrpsc::read_reference_csv(r_reference);
      report.classes = vrpsc::aggregate(report.rows, ref);
      vrpsc::write_report_files(report, r_out);
      std::cout << "classes " << report.classes.size() << " rows " << report.rows.size()
                << std::endl;
    } else if (*o) {
      vrpsc::Instance ins = vrpsc::Instance::from_text(slurp(o_instance));
      auto sol = vrpsc::solve_exact(ins);
      if (!sol) {
        std::cout << "infeasible" << std::endl;
        return 1;
      }
      if (!o_out.empty()) spit(o_out, sol->to_text(ins));
      std::cout << "optimal " << vrpsc::fmt_num(sol->cost()) << std::endl;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
