#include "vrpsc/bench.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace vrpsc {

using nlohmann::json;

BenchManifest manifest_from_json(const std::string& text) {
  json j = json::parse(text);
  BenchManifest m;
  if (j.contains("config")) {
    m.config = config_from_json(j["config"].dump());
  }
  if (j.contains("reference")) m.reference_path = j["reference"].get<std::string>();
  if (j.contains("output")) m.output_dir = j["output"].get<std::string>();
  if (j.contains("workers")) m.workers = j["workers"].get<int>();
  if (!j.contains("jobs") || !j["jobs"].is_array() || j["jobs"].empty()) {
    throw std::invalid_argument("manifest needs a nonempty 'jobs' array");
  }
  for (const auto& je : j["jobs"]) {
    BenchJob job;
    if (je.contains("instance")) job.instance_path = je["instance"].get<std::string>();
    if (je.contains("raw")) job.raw_path = je["raw"].get<std::string>();
    if (job.instance_path.empty() == job.raw_path.empty()) {
      throw std::invalid_argument("each job needs exactly one of 'instance' or 'raw'");
    }
    if (je.contains("ns")) job.transform.ns = je["ns"].get<double>();
    if (je.contains("alpha")) job.transform.alpha = je["alpha"].get<double>();
    if (je.contains("beta")) job.transform.beta = je["beta"].get<double>();
    if (je.contains("vehicles_special")) {
      job.transform.vehicles_special = je["vehicles_special"].get<int>();
    }
    if (je.contains("truncate")) job.transform.truncate_distances = je["truncate"].get<bool>();
    if (je.contains("take")) job.take = je["take"].get<int>();
    if (je.contains("class")) job.klass = je["class"].get<std::string>();
    if (je.contains("seeds")) {
      job.seeds = je["seeds"].get<std::vector<std::uint64_t>>();
    }
    if (job.seeds.empty()) job.seeds.push_back(m.config.seed);
    m.jobs.push_back(std::move(job));
  }
  return m;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Task {
  std::size_t row_index;
  const BenchJob* job;
  std::uint64_t seed;
};

BenchRow run_one(const BenchManifest& m, const BenchJob& job, std::uint64_t seed) {
  BenchRow row;
  row.klass = job.klass;
  row.seed = seed;
  const std::string& path = job.instance_path.empty() ? job.raw_path : job.instance_path;
  row.instance = std::filesystem::path(path).stem().string();
  if (!std::filesystem::exists(path)) {
    row.missing = true;
    return row;
  }
  Instance ins;
  if (!job.instance_path.empty()) {
    ins = Instance::from_text(slurp(path));
  } else {
    RawVrptw raw = parse_vrptw(slurp(path));
    raw = take_customers(raw, job.take);
    ins = Instance::transform(raw, job.transform);
  }
  row.instance = ins.name();

  SearchConfig cfg = m.config;
  cfg.seed = seed;
  cfg.keep_trace = false;
  try {
    SearchResult res = run_search(ins, cfg);
    row.feasible = validate(ins, res.best).empty();
    row.initial = res.initial_cost;
    row.final_cost = res.best_cost;
    row.runtime_seconds = res.runtime_seconds;
    row.iterations = res.iterations;
    row.validator_failures = res.validator_failures;
  } catch (const std::runtime_error&) {
    row.feasible = false;  // e.g. no feasible initial solution
  }
  return row;
}

}  // namespace

BenchReport run_bench(const BenchManifest& manifest) {
  BenchReport report;
  std::vector<Task> tasks;
  for (const auto& job : manifest.jobs) {
    for (std::uint64_t seed : job.seeds) {
      tasks.push_back({report.rows.size(), &job, seed});
      report.rows.emplace_back();
    }
  }

  const int workers = std::max(1, manifest.workers);
  if (workers == 1) {
    for (const Task& t : tasks) {
      report.rows[t.row_index] = run_one(manifest, *t.job, t.seed);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
          const Task& t = tasks[i];
          report.rows[t.row_index] = run_one(manifest, *t.job, t.seed);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::map<std::string, double> reference;
  if (!manifest.reference_path.empty()) {
    reference = read_reference_csv(manifest.reference_path);
  }
  report.classes = aggregate(report.rows, reference);
  return report;
}

std::vector<ClassSummary> aggregate(const std::vector<BenchRow>& rows,
                                    const std::map<std::string, double>& reference) {
  std::vector<ClassSummary> out;
  std::vector<std::string> order;
  std::map<std::string, ClassSummary> acc;
  for (const BenchRow& r : rows) {
    if (r.missing || !r.feasible) continue;
    if (!acc.count(r.klass)) {
      order.push_back(r.klass);
      acc[r.klass].klass = r.klass;
    }
    ClassSummary& c = acc[r.klass];
    ++c.runs;
    c.mean_initial += r.initial;
    c.mean_final += r.final_cost;
    c.mean_imp += r.improvement_pct();
    c.mean_runtime += r.runtime_seconds;
  }
  for (const std::string& k : order) {
    ClassSummary c = acc[k];
    if (c.runs > 0) {
      c.mean_initial /= c.runs;
      c.mean_final /= c.runs;
      c.mean_imp /= c.runs;
      c.mean_runtime /= c.runs;
    }
    auto it = reference.find(k);
    if (it != reference.end() && it->second > 0) {
      c.has_reference = true;
      c.reference = it->second;
      c.gap_pct = (c.mean_final - it->second) / it->second * 100.0;
    }
    out.push_back(c);
  }
  return out;
}

std::map<std::string, double> read_reference_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference file " + path);
  std::map<std::string, double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("reference line " + std::to_string(lineno) +
                               ": expected 'class,final'");
    }
    const std::string klass = line.substr(0, comma);
    if (klass == "class") continue;  // header
    out[klass] = std::stod(line.substr(comma + 1));
  }
  return out;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_report_files(const BenchReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream d(out_dir + "/details.csv");
    d << "instance,class,seed,missing,feasible,initial,final,imp_pct,runtime_s,"
         "iterations,validator_failures\n";
    for (const auto& r : report.rows) {
      d << csv_escape(r.instance) << ',' << csv_escape(r.klass) << ',' << r.seed << ','
        << (r.missing ? 1 : 0) << ',' << (r.feasible ? 1 : 0) << ',' << fmt_num(r.initial)
        << ',' << fmt_num(r.final_cost) << ',' << fmt_num(r.improvement_pct()) << ','
        << fmt_num(r.runtime_seconds) << ',' << r.iterations << ',' << r.validator_failures
        << "\n";
    }
  }
  {
    std::ofstream c(out_dir + "/classes.csv");
    c << "class,runs,mean_initial,mean_final,mean_imp_pct,mean_runtime_s,reference,"
         "gap_pct\n";
    for (const auto& s : report.classes) {
      c << csv_escape(s.klass) << ',' << s.runs << ',' << fmt_num(s.mean_initial) << ','
        << fmt_num(s.mean_final) << ',' << fmt_num(s.mean_imp) << ','
        << fmt_num(s.mean_runtime) << ',';
      if (s.has_reference) {
        c << fmt_num(s.reference) << ',' << fmt_num(s.gap_pct);
      } else {
        c << ',';
      }
      c << "\n";
    }
  }
  {
    std::ofstream s(out_dir + "/series.csv");
    s << "class,metric,value\n";
    for (const auto& cs : report.classes) {
      s << csv_escape(cs.klass) << ",mean_final," << fmt_num(cs.mean_final) << "\n";
      s << csv_escape(cs.klass) << ",mean_imp_pct," << fmt_num(cs.mean_imp) << "\n";
      if (cs.has_reference) {
        s << csv_escape(cs.klass) << ",gap_pct," << fmt_num(cs.gap_pct) << "\n";
      }
    }
  }
}

std::vector<BenchRow> read_details_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open details file " + path);
  std::vector<BenchRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';  // doubled quote inside a quoted field
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cur += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    f.push_back(cur);
    if (f.size() != 11) throw std::runtime_error("bad details row: " + line);
    BenchRow r;
    r.instance = f[0];
    r.klass = f[1];
    r.seed = std::stoull(f[2]);
    r.missing = f[3] == "1";
    r.feasible = f[4] == "1";
    r.initial = parse_num(f[5]);
    r.final_cost = parse_num(f[6]);
    r.runtime_seconds = parse_num(f[8]);
    r.iterations = std::stoi(f[9]);
    r.validator_failures = std::stoi(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace vrpsc
