#include "vrpsc/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vrpsc {

namespace {

struct Bank {
  std::vector<double> weights, scores;
  std::vector<long long> uses, total_uses;

  explicit Bank(std::size_t n)
      : weights(n, 1.0), scores(n, 0.0), uses(n, 0), total_uses(n, 0) {}

  int pick(Rng& rng) { return rng.pick_weighted(weights); }

  void reward(int op, double score) { scores[static_cast<std::size_t>(op)] += score; }

  void note_use(int op) {
    ++uses[static_cast<std::size_t>(op)];
    ++total_uses[static_cast<std::size_t>(op)];
  }

  void roll_segment(double reaction, double floor) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (uses[i] > 0) {
        weights[i] = (1 - reaction) * weights[i] +
                     reaction * scores[i] / static_cast<double>(uses[i]);
      }
      if (weights[i] < floor) weights[i] = floor;
      scores[i] = 0;
      uses[i] = 0;
    }
  }
};

int draw_remove_count(const Instance& ins, const SearchConfig& cfg, Rng& rng) {
  int hi = std::min(cfg.remove_cap,
                    static_cast<int>(std::floor(cfg.remove_frac * ins.request_count())));
  if (hi < 1) hi = 1;
  const int lo = std::min(cfg.remove_min, hi);
  return rng.uniform_int(lo, hi);
}

}  // namespace

Solution construct_initial(const Instance& ins, const SearchConfig& cfg, Rng& rng) {
  std::vector<int> bank;
  for (int v : ins.regular_customers()) bank.push_back(v);
  for (int v : ins.special_customers()) bank.push_back(v);
  std::sort(bank.begin(), bank.end());

  RepairParams params;
  params.k = 2;
  params.noise = 0;
  for (int attempt = 0; attempt < std::max(1, cfg.construction_retries); ++attempt) {
    std::vector<int> order = bank;
    if (attempt > 0) rng.shuffle(order);
    Solution sol = Solution::empty_of(ins);
    RepairResult rr = regret_insert(ins, sol, order, params, rng);
    if (rr.complete) return sol;
  }
  throw std::runtime_error("unable to construct a feasible initial solution for " +
                           ins.name());
}

SearchResult run_search(const Instance& ins, const SearchConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);
  SearchResult res;

  Solution current = construct_initial(ins, cfg, rng);
  res.initial_cost = current.cost();
  res.best = current;

  Bank removal_bank(3);
  Bank repair_bank(cfg.regret_depths.size());
  Bank noise_bank(2);  // 0: off, 1: on
  const double noise_amount = cfg.noise_fraction * ins.max_travel();

  double temperature = cfg.sa_start_ratio > 0
                           ? cfg.sa_start_ratio * current.cost() / std::log(2.0)
                           : 0.0;

  auto validate_best = [&]() {
    if (!cfg.validate_incumbents) return;
    if (!validate(ins, res.best).empty()) ++res.validator_failures;
  };
  validate_best();

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    const int rop = removal_bank.pick(rng);
    const int iop = repair_bank.pick(rng);
    const int nop = cfg.noise && noise_amount > 0 ? noise_bank.pick(rng) : 0;
    removal_bank.note_use(rop);
    repair_bank.note_use(iop);
    noise_bank.note_use(nop);

    const int count = draw_remove_count(ins, cfg, rng);

    Solution candidate = current;
    std::vector<int> removed;
    switch (rop) {
      case 0: removed = remove_random(ins, candidate, count, rng); break;
      case 1: removed = remove_related(ins, candidate, count, cfg.removal, rng); break;
      default: removed = remove_worst(ins, candidate, count, cfg.removal, rng); break;
    }

    RepairParams params;
    params.k = cfg.regret_depths[static_cast<std::size_t>(iop)];
    params.noise = nop == 1 ? noise_amount : 0;
    RepairResult rr = regret_insert(ins, candidate, removed, params, rng);
    res.rollbacks += rr.rollbacks;

    bool accepted = false, new_best = false;
    if (!rr.complete) {
      ++res.failed_repairs;
    } else {
      const double dc = candidate.cost() - current.cost();
      double score = 0;
      if (candidate.cost() < res.best.cost() - kValidateTol) {
        score = cfg.score_best;
        accepted = true;
        new_best = true;
      } else if (dc < 0) {
        score = cfg.score_better;
        accepted = true;
      } else if (temperature > 0 &&
                 rng.uniform() < std::exp(-dc / temperature)) {
        score = cfg.score_accepted;
        accepted = true;
      }
      if (accepted) {
        current = candidate;
        ++res.accepted_moves;
        if (new_best) {
          res.best = current;
          ++res.best_updates;
          validate_best();
        }
        removal_bank.reward(rop, score);
        repair_bank.reward(iop, score);
        noise_bank.reward(nop, score);
      }
    }

    temperature *= cfg.sa_cooling;
    if (cfg.segment > 0 && iter % cfg.segment == 0) {
      removal_bank.roll_segment(cfg.reaction, cfg.weight_floor);
      repair_bank.roll_segment(cfg.reaction, cfg.weight_floor);
      noise_bank.roll_segment(cfg.reaction, cfg.weight_floor);
    }
    if (cfg.keep_trace) {
      res.trace.push_back({iter, current.cost(), res.best.cost(), rop, iop, nop == 1,
                           accepted, new_best});
    }
    res.iterations = iter;
  }

  res.best_cost = res.best.cost();
  const auto names_rm = std::vector<std::string>{"random", "related", "worst"};
  for (std::size_t i = 0; i < removal_bank.weights.size(); ++i) {
    res.removal_ops.push_back({names_rm[i], removal_bank.weights[i],
                               removal_bank.total_uses[i]});
  }
  for (std::size_t i = 0; i < repair_bank.weights.size(); ++i) {
    res.repair_ops.push_back({"regret" + std::to_string(cfg.regret_depths[i]),
                              repair_bank.weights[i], repair_bank.total_uses[i]});
  }
  res.noise_ops.push_back({"plain", noise_bank.weights[0], noise_bank.total_uses[0]});
  res.noise_ops.push_back({"noise", noise_bank.weights[1], noise_bank.total_uses[1]});

  res.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::string trace_line(const TraceRow& r) {
  std::ostringstream os;
  os << r.iteration << ' ' << fmt_num(r.current) << ' ' << fmt_num(r.best) << ' '
     << r.removal_op << ' ' << r.repair_op << ' ' << (r.noise_used ? 1 : 0) << ' '
     << (r.accepted ? 1 : 0) << ' ' << (r.new_best ? 1 : 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// Config JSON
// ---------------------------------------------------------------------------

using nlohmann::json;

std::string config_to_json(const SearchConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["iterations"] = c.iterations;
  j["remove_min"] = c.remove_min;
  j["remove_cap"] = c.remove_cap;
  j["remove_frac"] = c.remove_frac;
  j["lambda_time"] = c.removal.lambda_time;
  j["lambda_dist"] = c.removal.lambda_dist;
  j["lambda_demand"] = c.removal.lambda_demand;
  j["lambda_type"] = c.removal.lambda_type;
  j["p_related"] = c.removal.p_related;
  j["p_worst"] = c.removal.p_worst;
  j["regret_depths"] = c.regret_depths;
  j["sa_start_ratio"] = c.sa_start_ratio;
  j["sa_cooling"] = c.sa_cooling;
  j["segment"] = c.segment;
  j["score_best"] = c.score_best;
  j["score_better"] = c.score_better;
  j["score_accepted"] = c.score_accepted;
  j["reaction"] = c.reaction;
  j["weight_floor"] = c.weight_floor;
  j["noise_fraction"] = c.noise_fraction;
  j["noise"] = c.noise;
  j["construction_retries"] = c.construction_retries;
  j["validate_incumbents"] = c.validate_incumbents;
  j["keep_trace"] = c.keep_trace;
  return j.dump(2);
}

SearchConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  SearchConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "seed") c.seed = it.value().get<std::uint64_t>();
    else if (k == "iterations") c.iterations = it.value().get<int>();
    else if (k == "remove_min") c.remove_min = it.value().get<int>();
    else if (k == "remove_cap") c.remove_cap = it.value().get<int>();
    else if (k == "remove_frac") c.remove_frac = it.value().get<double>();
    else if (k == "lambda_time") c.removal.lambda_time = it.value().get<double>();
    else if (k == "lambda_dist") c.removal.lambda_dist = it.value().get<double>();
    else if (k == "lambda_demand") c.removal.lambda_demand = it.value().get<double>();
    else if (k == "lambda_type") c.removal.lambda_type = it.value().get<double>();
    else if (k == "p_related") c.removal.p_related = it.value().get<double>();
    else if (k == "p_worst") c.removal.p_worst = it.value().get<double>();
    else if (k == "regret_depths") c.regret_depths = it.value().get<std::vector<int>>();
    else if (k == "sa_start_ratio") c.sa_start_ratio = it.value().get<double>();
    else if (k == "sa_cooling") c.sa_cooling = it.value().get<double>();
    else if (k == "segment") c.segment = it.value().get<int>();
    else if (k == "score_best") c.score_best = it.value().get<double>();
    else if (k == "score_better") c.score_better = it.value().get<double>();
    else if (k == "score_accepted") c.score_accepted = it.value().get<double>();
    else if (k == "reaction") c.reaction = it.value().get<double>();
    else if (k == "weight_floor") c.weight_floor = it.value().get<double>();
    else if (k == "noise_fraction") c.noise_fraction = it.value().get<double>();
    else if (k == "noise") c.noise = it.value().get<bool>();
    else if (k == "construction_retries") c.construction_retries = it.value().get<int>();
    else if (k == "validate_incumbents") c.validate_incumbents = it.value().get<bool>();
    else if (k == "keep_trace") c.keep_trace = it.value().get<bool>();
    else throw std::invalid_argument("unknown config key '" + k + "'");
  }
  if (c.iterations < 0 || c.segment < 0 || c.regret_depths.empty()) {
    throw std::invalid_argument("invalid config values");
  }
  for (int k : c.regret_depths) {
    if (k < 1) throw std::invalid_argument("regret depth must be >= 1");
  }
  return c;
}

}  // namespace vrpsc
