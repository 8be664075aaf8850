#include "catch_amalgamated.hpp"

#include <cmath>
#include <sstream>

#include "sepfam/experiments.hpp"

using namespace sepfam;
using Catch::Approx;

namespace {

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

ScenarioConfig small(ScenarioMode mode) {
  ScenarioConfig c;
  c.mode = mode;
  c.generator = mode == ScenarioMode::Lgw3 ? from_common(FamilyId::Weibull, {20.0, 50.0})
                                           : NativeParams{LognormalParams{0.0, 1.0}};
  c.sample_sizes = {30};
  c.replicates = 3;
  c.seed = 77;
  c.fbst.chain_length = 3000;
  c.fbst.burn_in = 1000;
  c.fbst.adapt_start = 500;
  c.fbst.optimizer_restarts = 2;
  return c;
}

template <class Record>
std::string dump(const std::vector<Record>& records) {
  std::ostringstream out;
  write_jsonl(out, records);
  return out.str();
}

}  // namespace

TEST_CASE("scenario parsing", "[experiments]") {
  const auto c = parse(R"(# pairwise study
mode = pairwise
generator = weibull
params = 2.0, 1.5
sample_sizes = 25, 100 ,200
replicates = 40   # trailing comment
seed = 9
chain_length = 5000
burn_in = 1000
significance = 0.1
)");
  CHECK(c.mode == ScenarioMode::PairwiseLnW);
  CHECK(family_of(c.generator) == FamilyId::Weibull);
  CHECK(std::get<WeibullParams>(c.generator).beta1 == 2.0);
  CHECK(std::get<WeibullParams>(c.generator).beta2 == 1.5);
  CHECK(c.sample_sizes == std::vector<std::size_t>{25, 100, 200});
  CHECK(c.replicates == 40);
  CHECK(c.seed == 9);
  CHECK(c.fbst.chain_length == 5000);
  CHECK(c.fbst.significance == 0.1);

  const auto lgw = parse("mode = lgw\ngenerator = gamma\n");
  CHECK(lgw.mode == ScenarioMode::Lgw3);
  CHECK(moments(lgw.generator).mu == Approx(20.0).epsilon(1e-12));
  CHECK(moments(lgw.generator).sigma2 == Approx(50.0).epsilon(1e-12));

  const auto common = parse("generator = lognormal\nmu = 3\nsigma2 = 2\n");
  CHECK(moments(common.generator).mu == Approx(3.0).epsilon(1e-12));
  CHECK(moments(common.generator).sigma2 == Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(parse("colour = blue\n"), InputError);
  CHECK_THROWS_AS(parse("mode = triple\n"), InputError);
  CHECK_THROWS_AS(parse("replicates = -3\n"), InputError);
  CHECK_THROWS_AS(parse("replicates = 0\n"), InputError);
  CHECK_THROWS_AS(parse("sample_sizes = 10, x\n"), InputError);
  CHECK_THROWS_AS(parse("just words\n"), InputError);
  CHECK_THROWS_AS(parse("generator = cauchy\n"), InputError);
  CHECK_THROWS_AS(parse("params = 1\n"), InputError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.cfg"), InputError);

  const auto j = as_json(c);
  CHECK(j.at("replicates") == 40);
}

TEST_CASE("replicate seeds depend only on seed, n and replicate", "[experiments]") {
  const auto a = replicate_seeds(5, 100, 3);
  const auto b = replicate_seeds(5, 100, 3);
  CHECK(a.data == b.data);
  CHECK(a.fbst == b.fbst);
  CHECK(a.data != a.fbst);
  CHECK(replicate_seeds(5, 100, 4).data != a.data);
  CHECK(replicate_seeds(5, 200, 3).data != a.data);
}

TEST_CASE("correct decision rule", "[experiments]") {
  const std::vector<double> zero = {0.9, 0.1, 0.8};
  const std::vector<double> one = {0.2, 0.7, 0.3};
  CHECK(correct_decision(1, zero, one));
  CHECK_FALSE(correct_decision(0, zero, one));
  CHECK_FALSE(correct_decision(2, zero, one));

  // Smallest against p_k = 0 but not largest for p_k = 1.
  CHECK_FALSE(correct_decision(1, zero, std::vector<double>{0.2, 0.5, 0.6}));
  // Ties are incorrect.
  CHECK_FALSE(correct_decision(1, std::vector<double>{0.1, 0.1, 0.8}, one));
  CHECK_FALSE(correct_decision(1, zero, std::vector<double>{0.7, 0.7, 0.3}));
  CHECK_THROWS_AS(correct_decision(3, zero, one), DomainError);
  CHECK_THROWS_AS(correct_decision(0, zero, std::vector<double>{0.5, 0.5}), DomainError);
}

TEST_CASE("rate tabulation", "[experiments]") {
  std::vector<PairwiseRecord> recs;
  for (std::size_t r = 0; r < 10; ++r) {
    PairwiseRecord p;
    p.n = 50;
    p.replicate = r;
    p.ok = true;
    p.fbst_reject_lognormal = r < 2;
    p.fbst_reject_weibull = r < 7;
    p.cox_reject_lognormal = false;
    p.cox_reject_weibull = true;
    recs.push_back(p);
  }
  PairwiseRecord bad;
  bad.n = 50;
  bad.replicate = 10;
  bad.ok = false;
  bad.error = "optimizer failed";
  recs.push_back(bad);

  const RateTable t = tabulate_pairwise(FamilyId::Lognormal, recs);
  REQUIRE(t.rows.size() == 4);
  const RateRow& fl = t.rows[0];
  CHECK(fl.method == "FBST");
  CHECK(fl.hypothesis == "H_lognormal");
  CHECK(fl.measure == "acceptance");
  CHECK(fl.rate == Approx(0.8));
  CHECK(fl.standard_error == Approx(std::sqrt(0.8 * 0.2 / 10.0)));
  CHECK(fl.replicates == 10);
  CHECK(fl.failures == 1);
  const RateRow& fw = t.rows[1];
  CHECK(fw.measure == "rejection");
  CHECK(fw.rate == Approx(0.7));
  CHECK(t.rows[2].method == "Cox");
  CHECK(t.rows[2].rate == 1.0);
  CHECK(t.rows[2].standard_error == 0.0);
  CHECK(t.rows[3].rate == 1.0);

  std::ostringstream csv;
  write_csv(csv, t);
  CHECK(csv.str().rfind("truth,method,hypothesis,n,measure,rate,standard_error,replicates,failures\n",
                        0) == 0);
}

TEST_CASE("pairwise harness is reproducible", "[experiments][mc]") {
  const ScenarioConfig c = small(ScenarioMode::PairwiseLnW);
  const auto records = run_pairwise_records(c);
  REQUIRE(records.size() == 3);
  for (const auto& r : records) CHECK(r.ok);

  SECTION("a single replicate is a pure function of its cell") {
    ScenarioConfig one = c;
    one.replicates = 1;
    const auto a = run_pairwise_records(one);
    const auto b = run_pairwise_records(one);
    CHECK(dump(a) == dump(b));
    CHECK(dump(a) == dump(std::vector<PairwiseRecord>{records[0]}));
  }

  SECTION("rates are recomputed bit for bit from the verdict log") {
    std::istringstream in(dump(records));
    const auto back = read_pairwise_jsonl(in);
    CHECK(dump(back) == dump(records));
    CHECK(as_json(tabulate_pairwise(FamilyId::Lognormal, back)).dump() ==
          as_json(run_pairwise(c)).dump());
  }

  SECTION("more replicates leave the first ones unchanged") {
    ScenarioConfig twice = c;
    twice.replicates = 6;
    const auto more = run_pairwise_records(twice);
    REQUIRE(more.size() == 6);
    CHECK(dump(std::vector<PairwiseRecord>(more.begin(), more.begin() + 3)) == dump(records));
  }

  SECTION("thread count does not change results") {
    ScenarioConfig two = c;
    two.threads = 2;
    CHECK(dump(run_pairwise_records(two)) == dump(records));
  }

  SECTION("previous records are reused") {
    std::vector<PairwiseRecord> prev = records;
    prev[1].ev_lognormal = 0.123456;
    const auto resumed = run_pairwise_records(c, prev);
    CHECK(resumed[1].ev_lognormal == 0.123456);
    CHECK(dump(std::vector<PairwiseRecord>{resumed[0]}) == dump(std::vector<PairwiseRecord>{records[0]}));
  }

  SECTION("mode mismatch") {
    CHECK_THROWS_AS(run_lgw(c), InputError);
  }
}

TEST_CASE("lgw harness is reproducible", "[experiments][mc]") {
  const ScenarioConfig c = small(ScenarioMode::Lgw3);
  const auto records = run_lgw_records(c);
  REQUIRE(records.size() == 3);
  for (const auto& r : records) {
    CHECK(r.ok);
    CHECK(r.mean_weights[0] + r.mean_weights[1] + r.mean_weights[2] == Approx(1.0).epsilon(1e-12));
    CHECK(r.correct == correct_decision(2, r.ev_zero, r.ev_one));
  }

  std::istringstream in(dump(records));
  const auto back = read_lgw_jsonl(in);
  CHECK(dump(back) == dump(records));

  ScenarioConfig two = c;
  two.threads = 2;
  CHECK(dump(run_lgw_records(two)) == dump(records));

  const LgwSummary s = tabulate_lgw(FamilyId::Weibull, records);
  REQUIRE(s.rows.size() == 1);
  double correct = 0.0, mu = 0.0;
  for (const auto& r : records) {
    correct += r.correct ? 1.0 : 0.0;
    mu += r.mean_mu;
  }
  CHECK(s.rows[0].correct_rate == Approx(correct / 3.0));
  CHECK(s.rows[0].mean_mu == Approx(mu / 3.0));
  CHECK(s.rows[0].failures == 0);
  CHECK_THROWS_AS(run_pairwise(c), InputError);

  std::istringstream junk("{\"n\": 1}\nnot json\n");
  CHECK_THROWS_AS(read_lgw_jsonl(junk), InputError);
}
