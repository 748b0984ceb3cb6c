#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vrpsc/search.hpp"

namespace vrpsc {

// One benchmark job: an instance (either a ready instance file or a raw
// VRPTW file plus transform settings) run under one or more seeds.
struct BenchJob {
  std::string instance_path;  // ready-made instance file...
  std::string raw_path;       // ...or raw file + transform options below
  TransformOptions transform;
  int take = 0;  // keep only the first N raw customers (0 = all)
  std::string klass;  // aggregation label, e.g. "R1"
  std::vector<std::uint64_t> seeds;
};

struct BenchManifest {
  SearchConfig config;
  std::vector<BenchJob> jobs;
  std::string reference_path;  // optional csv: class,final
  std::string output_dir = "bench_out";
  int workers = 1;
};

BenchManifest manifest_from_json(const std::string& text);

struct BenchRow {
  std::string instance;
  std::string klass;
  std::uint64_t seed = 0;
  bool missing = false;   // instance file absent; row kept for the record
  bool feasible = false;
  double initial = 0, final_cost = 0;
  double runtime_seconds = 0;
  int iterations = 0;
  int validator_failures = 0;

  double improvement_pct() const {
    return initial > 0 ? (initial - final_cost) / initial * 100.0 : 0.0;
  }
};

struct ClassSummary {
  std::string klass;
  int runs = 0;
  double mean_initial = 0, mean_final = 0, mean_imp = 0, mean_runtime = 0;
  double reference = 0;  // NaN-free: has_reference tells whether it is set
  bool has_reference = false;
  double gap_pct = 0;  // (mean_final - reference) / reference * 100
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<ClassSummary> classes;
};

// Runs every (job, seed) pair; workers > 1 runs them on a thread pool. Rows
// come back in manifest order regardless of scheduling.
BenchReport run_bench(const BenchManifest& manifest);

// Aggregation used by run_bench and by the standalone report command.
std::vector<ClassSummary> aggregate(const std::vector<BenchRow>& rows,
                                    const std::map<std::string, double>& reference);

std::map<std::string, double> read_reference_csv(const std::string& path);

// details.csv / classes.csv / series.csv under out_dir.
void write_report_files(const BenchReport& report, const std::string& out_dir);
std::vector<BenchRow> read_details_csv(const std::string& path);

}  // namespace vrpsc
