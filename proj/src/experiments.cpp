#include "sepfam/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "sepfam/coxtest.hpp"
#include "sepfam/errors.hpp"

namespace sepfam {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InputError("scenario: '" + key + "' expects a number, got '" + value + "'");
  }
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value.front() == '-') throw std::invalid_argument(value);
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InputError("scenario: '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
}

NativeParams native_from_pair(FamilyId family, double a, double b) {
  switch (family) {
    case FamilyId::Lognormal:
      return LognormalParams{a, b};
    case FamilyId::Gamma:
      return GammaParams{a, b};
    case FamilyId::Weibull:
      return WeibullParams{a, b};
  }
  throw InputError("scenario: unknown generator family");
}

std::pair<double, double> native_pair(const NativeParams& p) {
  return std::visit(
      [](const auto& v) -> std::pair<double, double> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LognormalParams>) return {v.alpha1, v.alpha2};
        if constexpr (std::is_same_v<T, GammaParams>) return {v.gamma1, v.gamma2};
        if constexpr (std::is_same_v<T, WeibullParams>) return {v.beta1, v.beta2};
      },
      p);
}

// Runs `count` independent tasks over `threads` workers; task i writes only
// slot i, so the output never depends on scheduling.
template <class Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct Cell {
  std::size_t n;
  std::size_t replicate;
};

std::vector<Cell> cells(const ScenarioConfig& config) {
  std::vector<Cell> out;
  for (std::size_t n : config.sample_sizes) {
    for (std::size_t r = 0; r < config.replicates; ++r) out.push_back({n, r});
  }
  return out;
}

template <class Record, class Runner>
std::vector<Record> run_cells(const ScenarioConfig& config, const std::vector<Record>& previous,
                              Runner&& runner) {
  validate(config);
  std::map<std::pair<std::size_t, std::size_t>, const Record*> done;
  for (const auto& rec : previous) done[{rec.n, rec.replicate}] = &rec;
  const auto todo = cells(config);
  std::vector<Record> out(todo.size());
  parallel_for(todo.size(), config.threads, [&](std::size_t i) {
    const auto it = done.find({todo[i].n, todo[i].replicate});
    out[i] = it != done.end() ? *it->second : runner(config, todo[i].n, todo[i].replicate);
  });
  return out;
}

double binomial_se(double rate, std::size_t count) {
  return count > 0 ? std::sqrt(rate * (1.0 - rate) / static_cast<double>(count)) : 0.0;
}

FamilyId generator_family(const ScenarioConfig& c) { return family_of(c.generator); }

}  // namespace

void validate(const ScenarioConfig& config) {
  validate(config.generator);
  validate(config.fbst);
  if (config.replicates < 1) throw InputError("scenario: replicates must be >= 1");
  if (config.sample_sizes.empty()) throw InputError("scenario: no sample sizes given");
  for (std::size_t n : config.sample_sizes) {
    if (n < 5) throw InputError("scenario: sample sizes must be >= 5");
  }
}

ScenarioConfig parse_scenario(std::istream& in) {
  ScenarioConfig c;
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InputError("scenario line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    kv[key] = trim(std::string_view(body).substr(eq + 1));
  }

  auto take = [&kv](const std::string& key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto mode = take("mode")) {
    if (*mode == "pairwise") {
      c.mode = ScenarioMode::PairwiseLnW;
    } else if (*mode == "lgw") {
      c.mode = ScenarioMode::Lgw3;
    } else {
      throw InputError("scenario: mode must be 'pairwise' or 'lgw'");
    }
  }
  const FamilyId family = parse_family(take("generator").value_or("lognormal"));
  const auto params = take("params");
  const auto mu = take("mu");
  const auto sigma2 = take("sigma2");
  if (params) {
    const auto items = split_list(*params);
    if (items.size() != 2) throw InputError("scenario: params expects two numbers");
    c.generator = native_from_pair(family, parse_double("params", items[0]),
                                   parse_double("params", items[1]));
  } else if (mu || sigma2 || c.mode == ScenarioMode::Lgw3) {
    const CommonParams cp{mu ? parse_double("mu", *mu) : 20.0,
                          sigma2 ? parse_double("sigma2", *sigma2) : 50.0};
    c.generator = from_common(family, cp);
  } else {
    const CommonParams unit{1.0, 1.0};
    c.generator = family == FamilyId::Lognormal ? NativeParams{LognormalParams{0.0, 1.0}}
                                                : from_common(family, unit);
  }
  if (auto v = take("sample_sizes")) {
    c.sample_sizes.clear();
    for (const auto& item : split_list(*v)) c.sample_sizes.push_back(parse_count("sample_sizes", item));
  }
  if (auto v = take("replicates")) c.replicates = parse_count("replicates", *v);
  if (auto v = take("seed")) c.seed = parse_count("seed", *v);
  if (auto v = take("threads")) c.threads = parse_count("threads", *v);
  if (auto v = take("chain_length")) c.fbst.chain_length = parse_count("chain_length", *v);
  if (auto v = take("burn_in")) c.fbst.burn_in = parse_count("burn_in", *v);
  if (auto v = take("adapt_start")) c.fbst.adapt_start = parse_count("adapt_start", *v);
  if (auto v = take("proposal_scale")) c.fbst.initial_proposal_scale = parse_double("proposal_scale", *v);
  if (auto v = take("optimizer_restarts")) c.fbst.optimizer_restarts = parse_count("optimizer_restarts", *v);
  if (auto v = take("optimizer_tol")) c.fbst.optimizer_tol = parse_double("optimizer_tol", *v);
  if (auto v = take("significance")) c.fbst.significance = parse_double("significance", *v);
  if (!kv.empty()) throw InputError("scenario: unknown key '" + kv.begin()->first + "'");
  try {
    validate(c);
  } catch (const DomainError& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

nlohmann::json as_json(const ScenarioConfig& c) {
  const auto [a, b] = native_pair(c.generator);
  return {
      {"mode", c.mode == ScenarioMode::PairwiseLnW ? "pairwise" : "lgw"},
      {"generator", {{"family", family_name(family_of(c.generator))}, {"params", {a, b}}}},
      {"sample_sizes", c.sample_sizes},
      {"replicates", c.replicates},
      {"seed", c.seed},
      {"fbst",
       {{"chain_length", c.fbst.chain_length},
        {"burn_in", c.fbst.burn_in},
        {"adapt_start", c.fbst.adapt_start},
        {"proposal_scale", c.fbst.initial_proposal_scale},
        {"optimizer_restarts", c.fbst.optimizer_restarts},
        {"optimizer_tol", c.fbst.optimizer_tol},
        {"significance", c.fbst.significance}}},
  };
}

ReplicateSeeds replicate_seeds(std::uint64_t seed, std::size_t n, std::size_t replicate) {
  const std::uint64_t cell = stream_seed(seed, n);
  return {stream_seed(cell, 2 * replicate), stream_seed(cell, 2 * replicate + 1)};
}

// ---------------------------------------------------------------------------

PairwiseRecord run_pairwise_replicate(const ScenarioConfig& config, std::size_t n,
                                      std::size_t replicate) {
  PairwiseRecord rec;
  rec.n = n;
  rec.replicate = replicate;
  const ReplicateSeeds seeds = replicate_seeds(config.seed, n, replicate);
  try {
    Rng rng(seeds.data);
    const std::vector<double> y = sample_n(config.generator, n, rng);
    const Dataset data(y);
    const MixtureSpec spec = MixtureSpec::with_defaults({FamilyId::Lognormal, FamilyId::Weibull});
    FbstConfig fbst = config.fbst;
    fbst.seed = seeds.fbst;
    const Hypothesis hs[] = {Hypothesis::weight_is_one(0), Hypothesis::weight_is_one(1)};
    const auto ev = evaluate_hypotheses(spec, hs, data, fbst);
    rec.ev_lognormal = ev[0].e_value;
    rec.ev_weibull = ev[1].e_value;
    rec.fbst_reject_lognormal = ev[0].verdict == Verdict::Reject;
    rec.fbst_reject_weibull = ev[1].verdict == Verdict::Reject;
    const CoxResult cl = cox_lognormal_null(y);
    const CoxResult cw = cox_weibull_null(y);
    rec.cox_deviate_lognormal_null = cl.deviate;
    rec.cox_deviate_weibull_null = cw.deviate;
    rec.cox_reject_lognormal = cox_rejects(cl);
    rec.cox_reject_weibull = cox_rejects(cw);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

RateTable tabulate_pairwise(FamilyId truth, const std::vector<PairwiseRecord>& records) {
  std::vector<std::size_t> sizes;
  for (const auto& r : records) {
    if (std::find(sizes.begin(), sizes.end(), r.n) == sizes.end()) sizes.push_back(r.n);
  }
  RateTable table{truth, {}};
  struct Column {
    const char* method;
    FamilyId family;
    bool PairwiseRecord::*reject;
  };
  const Column columns[] = {
      {"FBST", FamilyId::Lognormal, &PairwiseRecord::fbst_reject_lognormal},
      {"FBST", FamilyId::Weibull, &PairwiseRecord::fbst_reject_weibull},
      {"Cox", FamilyId::Lognormal, &PairwiseRecord::cox_reject_lognormal},
      {"Cox", FamilyId::Weibull, &PairwiseRecord::cox_reject_weibull},
  };
  for (const auto& col : columns) {
    const bool is_true = col.family == truth;
    for (std::size_t n : sizes) {
      std::size_t ok = 0, failures = 0, hits = 0;
      for (const auto& r : records) {
        if (r.n != n) continue;
        if (!r.ok) {
          ++failures;
          continue;
        }
        ++ok;
        const bool rejected = r.*(col.reject);
        if (rejected != is_true) ++hits;
      }
      const double rate = ok > 0 ? static_cast<double>(hits) / static_cast<double>(ok) : 0.0;
      table.rows.push_back({col.method, "H_" + std::string(family_name(col.family)), n,
                            is_true ? "acceptance" : "rejection", rate, binomial_se(rate, ok), ok,
                            failures});
    }
  }
  return table;
}

std::vector<PairwiseRecord> run_pairwise_records(const ScenarioConfig& config,
                                                 const std::vector<PairwiseRecord>& previous) {
  if (config.mode != ScenarioMode::PairwiseLnW) {
    throw InputError("run_pairwise requires mode = pairwise");
  }
  return run_cells(config, previous, run_pairwise_replicate);
}

RateTable run_pairwise(const ScenarioConfig& config) {
  return tabulate_pairwise(generator_family(config), run_pairwise_records(config));
}

// ---------------------------------------------------------------------------

bool correct_decision(std::size_t k, std::span<const double> ev_zero,
                      std::span<const double> ev_one) {
  if (ev_zero.size() != ev_one.size() || k >= ev_zero.size()) {
    throw DomainError("correct_decision: inconsistent e-value vectors");
  }
  for (std::size_t j = 0; j < ev_zero.size(); ++j) {
    if (j == k) continue;
    if (!(ev_zero[k] < ev_zero[j]) || !(ev_one[k] > ev_one[j])) return false;
  }
  return true;
}

LgwRecord run_lgw_replicate(const ScenarioConfig& config, std::size_t n, std::size_t replicate) {
  LgwRecord rec;
  rec.n = n;
  rec.replicate = replicate;
  const ReplicateSeeds seeds = replicate_seeds(config.seed, n, replicate);
  try {
    Rng rng(seeds.data);
    const Dataset data(sample_n(config.generator, n, rng));
    const MixtureSpec spec = MixtureSpec::with_defaults(
        {FamilyId::Lognormal, FamilyId::Gamma, FamilyId::Weibull});
    FbstConfig fbst = config.fbst;
    fbst.seed = seeds.fbst;
    const auto hyps = all_weight_hypotheses(spec);
    PosteriorChain chain;
    const auto ev = evaluate_hypotheses(spec, hyps, data, fbst, &chain);
    for (const auto& r : ev) {
      auto& slot = r.hypothesis.kind == Hypothesis::Kind::WeightIsZero ? rec.ev_zero : rec.ev_one;
      slot[r.hypothesis.component] = r.e_value;
    }
    for (const auto& s : chain.states) {
      rec.mean_mu += s.cp.mu;
      rec.mean_sigma2 += s.cp.sigma2;
      for (std::size_t k = 0; k < 3; ++k) rec.mean_weights[k] += s.weights[k];
    }
    const double kept = static_cast<double>(chain.states.size());
    rec.mean_mu /= kept;
    rec.mean_sigma2 /= kept;
    for (auto& w : rec.mean_weights) w /= kept;
    const auto truth = static_cast<std::size_t>(generator_family(config));
    rec.correct = correct_decision(truth, rec.ev_zero, rec.ev_one);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

LgwSummary tabulate_lgw(FamilyId truth, const std::vector<LgwRecord>& records) {
  std::vector<std::size_t> sizes;
  for (const auto& r : records) {
    if (std::find(sizes.begin(), sizes.end(), r.n) == sizes.end()) sizes.push_back(r.n);
  }
  LgwSummary summary{truth, {}};
  for (std::size_t n : sizes) {
    LgwRow row{n, 0.0, 0.0, {}, 0.0, 0.0, 0, 0};
    std::size_t correct = 0;
    for (const auto& r : records) {
      if (r.n != n) continue;
      if (!r.ok) {
        ++row.failures;
        continue;
      }
      ++row.replicates;
      row.mean_mu += r.mean_mu;
      row.mean_sigma2 += r.mean_sigma2;
      for (std::size_t k = 0; k < 3; ++k) row.mean_weights[k] += r.mean_weights[k];
      if (r.correct) ++correct;
    }
    if (row.replicates > 0) {
      const double cnt = static_cast<double>(row.replicates);
      row.mean_mu /= cnt;
      row.mean_sigma2 /= cnt;
      for (auto& w : row.mean_weights) w /= cnt;
      row.correct_rate = static_cast<double>(correct) / cnt;
      row.standard_error = binomial_se(row.correct_rate, row.replicates);
    }
    summary.rows.push_back(row);
  }
  return summary;
}

std::vector<LgwRecord> run_lgw_records(const ScenarioConfig& config,
                                       const std::vector<LgwRecord>& previous) {
  if (config.mode != ScenarioMode::Lgw3) throw InputError("run_lgw requires mode = lgw");
  return run_cells(config, previous, run_lgw_replicate);
}

LgwSummary run_lgw(const ScenarioConfig& config) {
  return tabulate_lgw(generator_family(config), run_lgw_records(config));
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const PairwiseRecord& r) {
  j = {{"n", r.n},
       {"replicate", r.replicate},
       {"ok", r.ok},
       {"error", r.error},
       {"ev_lognormal", r.ev_lognormal},
       {"ev_weibull", r.ev_weibull},
       {"fbst_reject_lognormal", r.fbst_reject_lognormal},
       {"fbst_reject_weibull", r.fbst_reject_weibull},
       {"cox_deviate_lognormal_null", r.cox_deviate_lognormal_null},
       {"cox_deviate_weibull_null", r.cox_deviate_weibull_null},
       {"cox_reject_lognormal", r.cox_reject_lognormal},
       {"cox_reject_weibull", r.cox_reject_weibull}};
}

void from_json(const nlohmann::json& j, PairwiseRecord& r) {
  j.at("n").get_to(r.n);
  j.at("replicate").get_to(r.replicate);
  j.at("ok").get_to(r.ok);
  j.at("error").get_to(r.error);
  j.at("ev_lognormal").get_to(r.ev_lognormal);
  j.at("ev_weibull").get_to(r.ev_weibull);
  j.at("fbst_reject_lognormal").get_to(r.fbst_reject_lognormal);
  j.at("fbst_reject_weibull").get_to(r.fbst_reject_weibull);
  j.at("cox_deviate_lognormal_null").get_to(r.cox_deviate_lognormal_null);
  j.at("cox_deviate_weibull_null").get_to(r.cox_deviate_weibull_null);
  j.at("cox_reject_lognormal").get_to(r.cox_reject_lognormal);
  j.at("cox_reject_weibull").get_to(r.cox_reject_weibull);
}

void to_json(nlohmann::json& j, const LgwRecord& r) {
  j = {{"n", r.n},
       {"replicate", r.replicate},
       {"ok", r.ok},
       {"error", r.error},
       {"mean_mu", r.mean_mu},
       {"mean_sigma2", r.mean_sigma2},
       {"mean_weights", r.mean_weights},
       {"ev_zero", r.ev_zero},
       {"ev_one", r.ev_one},
       {"correct", r.correct}};
}

void from_json(const nlohmann::json& j, LgwRecord& r) {
  j.at("n").get_to(r.n);
  j.at("replicate").get_to(r.replicate);
  j.at("ok").get_to(r.ok);
  j.at("error").get_to(r.error);
  j.at("mean_mu").get_to(r.mean_mu);
  j.at("mean_sigma2").get_to(r.mean_sigma2);
  j.at("mean_weights").get_to(r.mean_weights);
  j.at("ev_zero").get_to(r.ev_zero);
  j.at("ev_one").get_to(r.ev_one);
  j.at("correct").get_to(r.correct);
}

nlohmann::json as_json(const RateTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"method", r.method},
                    {"hypothesis", r.hypothesis},
                    {"n", r.n},
                    {"measure", r.measure},
                    {"rate", r.rate},
                    {"standard_error", r.standard_error},
                    {"replicates", r.replicates},
                    {"failures", r.failures}});
  }
  return {{"truth", family_name(table.truth)}, {"rows", rows}};
}

nlohmann::json as_json(const LgwSummary& summary) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : summary.rows) {
    rows.push_back({{"n", r.n},
                    {"mean_mu", r.mean_mu},
                    {"mean_sigma2", r.mean_sigma2},
                    {"mean_p_lognormal", r.mean_weights[0]},
                    {"mean_p_gamma", r.mean_weights[1]},
                    {"mean_p_weibull", r.mean_weights[2]},
                    {"correct_rate", r.correct_rate},
                    {"standard_error", r.standard_error},
                    {"replicates", r.replicates},
                    {"failures", r.failures}});
  }
  return {{"truth", family_name(summary.truth)}, {"rows", rows}};
}

void write_csv(std::ostream& out, const RateTable& table) {
  const auto prec = out.precision(10);
  out << "truth,method,hypothesis,n,measure,rate,standard_error,replicates,failures\n";
  for (const auto& r : table.rows) {
    out << family_name(table.truth) << ',' << r.method << ',' << r.hypothesis << ',' << r.n << ','
        << r.measure << ',' << r.rate << ',' << r.standard_error << ',' << r.replicates << ','
        << r.failures << '\n';
  }
  out.precision(prec);
}

void write_csv(std::ostream& out, const LgwSummary& summary) {
  const auto prec = out.precision(10);
  out << "truth,n,mean_mu,mean_sigma2,mean_p_lognormal,mean_p_gamma,mean_p_weibull,"
         "correct_rate,standard_error,replicates,failures\n";
  for (const auto& r : summary.rows) {
    out << family_name(summary.truth) << ',' << r.n << ',' << r.mean_mu << ',' << r.mean_sigma2
        << ',' << r.mean_weights[0] << ',' << r.mean_weights[1] << ',' << r.mean_weights[2] << ','
        << r.correct_rate << ',' << r.standard_error << ',' << r.replicates << ',' << r.failures
        << '\n';
  }
  out.precision(prec);
}

namespace {

template <class Record>
std::vector<Record> read_jsonl(std::istream& in) {
  std::vector<Record> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<Record>());
    } catch (const nlohmann::json::exception& e) {
      throw InputError("verdict log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<PairwiseRecord> read_pairwise_jsonl(std::istream& in) {
  return read_jsonl<PairwiseRecord>(in);
}

std::vector<LgwRecord> read_lgw_jsonl(std::istream& in) { return read_jsonl<LgwRecord>(in); }

}  // namespace sepfam
