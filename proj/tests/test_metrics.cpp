#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "xlate/errors.hpp"
#include "xlate/metrics.hpp"

using namespace xlate;

namespace {

CombinationTally tally(const std::string& model, Approach approach, long long n,
                       long long k, std::map<Subtype, long long> subtypes = {}) {
  CombinationTally t;
  t.key = {model, "avatar", approach, {Lang::Python, Lang::Java}};
  t.instances = n;
  t.correct = k;
  t.subtype_counts = std::move(subtypes);
  return t;
}

}  // namespace

TEST_CASE("micro accuracy pools instances, not rows") {
  std::vector<CombinationTally> tallies = {tally("a", Approach::Direct, 10, 5),
                                           tally("b", Approach::Direct, 30, 25)};
  CHECK(micro_accuracy(tallies) == Rat(3, 4));

  std::vector<CombinationTally> one = {tally("a", Approach::Direct, 4, 4)};
  CHECK(micro_accuracy(one) == Rat(1));

  std::vector<CombinationTally> none;
  CHECK_THROWS_AS(micro_accuracy(none), UndefinedInputError);
  std::vector<CombinationTally> zero = {tally("a", Approach::Direct, 0, 0)};
  CHECK_THROWS_AS(micro_accuracy(zero), UndefinedInputError);
}

TEST_CASE("published pooled accuracies render at table precision") {
  CHECK(percent_1dp(Rat(3043, 4495)) == "67.7");
  CHECK(percent_1dp(Rat(3530, 4495)) == "78.5");
  long long delta = percent_1dp_tenths(Rat(3530, 4495)) - percent_1dp_tenths(Rat(3043, 4495));
  CHECK(delta == 108);  // 10.8 percentage points
}

TEST_CASE("percent rendering follows the published two-stage half-up rounding") {
  CHECK(percent_1dp(Rat(3, 4)) == "75.0");
  CHECK(percent_1dp(Rat(0)) == "0.0");
  CHECK(percent_1dp(Rat(1)) == "100.0");
  CHECK(percent_1dp(Rat(48, 250)) == "19.2");
  // The cases where one-stage and two-stage rounding differ.
  CHECK(percent_1dp(Rat(10, 1339)) == "0.8");   // 0.7468%
  CHECK(percent_1dp(Rat(144, 264)) == "54.6");  // 54.5454..%
  CHECK(percent_1dp(Rat(26, 264)) == "9.9");    // 9.8484..%
}

TEST_CASE("frequencies pool counts over the grand total") {
  std::vector<CombinationTally> tallies = {
      tally("a", Approach::Direct, 0, 0, {{Subtype::RE1, 259}, {Subtype::RE2, 736}}),
      tally("b", Approach::Direct, 0, 0,
            {{Subtype::RE3, 104}, {Subtype::RE4, 170}, {Subtype::RE5, 10},
             {Subtype::RE6, 60}}),
  };
  FrequencyDistribution dist = runtime_frequencies(tallies);
  CHECK(dist.grand_total == 1339);
  CHECK(dist.freq[Subtype::RE1] == Rat(259, 1339));
  CHECK(dist.freq[Subtype::RE4] == Rat(170, 1339));
  CHECK(percent_1dp(dist.freq[Subtype::RE1]) == "19.3");
  CHECK(percent_1dp(dist.freq[Subtype::RE4]) == "12.7");

  Rat sum(0);
  for (auto& [s, f] : dist.freq) sum += f;
  CHECK(sum == Rat(1));
}

TEST_CASE("single nonzero subtype has frequency 1") {
  std::vector<CombinationTally> tallies = {
      tally("a", Approach::Direct, 0, 0, {{Subtype::RE3, 7}})};
  FrequencyDistribution dist = runtime_frequencies(tallies);
  CHECK(dist.freq[Subtype::RE3] == Rat(1));
  CHECK_THROWS_AS(compile_frequencies(tallies), UndefinedInputError);
}

TEST_CASE("mitigation table matches the published worked examples") {
  std::vector<CombinationTally> direct = {
      tally("a", Approach::Direct, 0, 0,
            {{Subtype::RE1, 231}, {Subtype::RE4, 80}, {Subtype::CE2, 15},
             {Subtype::CE5, 9}, {Subtype::CE7, 7}})};
  std::vector<CombinationTally> algo = {
      tally("a", Approach::AlgorithmBased, 0, 0,
            {{Subtype::RE1, 28}, {Subtype::RE4, 90}, {Subtype::CE5, 17},
             {Subtype::CE7, 7}})};

  std::vector<MitigationRow> rows = mitigation_table(direct, algo);
  REQUIRE(rows.size() == 5);  // zero-count subtypes omitted

  auto row = [&](Subtype s) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const MitigationRow& r) { return r.subtype == s; });
    REQUIRE(it != rows.end());
    return *it;
  };

  MitigationRow re1 = row(Subtype::RE1);
  CHECK(re1.p_direct == Rat(231, 259));
  CHECK(re1.p_algo == Rat(28, 259));
  CHECK(percent_1dp(re1.p_direct) == "89.2");
  CHECK(percent_1dp(re1.p_algo) == "10.8");
  CHECK(re1.mitigated);

  MitigationRow ce2 = row(Subtype::CE2);
  CHECK(ce2.p_direct == Rat(1));
  CHECK(ce2.p_algo == Rat(0));
  CHECK(ce2.mitigated);

  MitigationRow re4 = row(Subtype::RE4);
  CHECK(percent_1dp(re4.p_direct) == "47.1");
  CHECK(percent_1dp(re4.p_algo) == "52.9");
  CHECK_FALSE(re4.mitigated);

  MitigationRow ce5 = row(Subtype::CE5);
  CHECK(percent_1dp(ce5.p_direct) == "34.6");
  CHECK(percent_1dp(ce5.p_algo) == "65.4");
  CHECK_FALSE(ce5.mitigated);

  // Ties are not mitigation.
  MitigationRow ce7 = row(Subtype::CE7);
  CHECK(ce7.p_direct == Rat(1, 2));
  CHECK_FALSE(ce7.mitigated);
  // Complement is exact in rational arithmetic.
  for (const MitigationRow& r : rows) {
    CHECK(r.p_direct + r.p_algo == Rat(1));
    CHECK(r.count_all == r.count_direct + r.count_algo);
  }
}

TEST_CASE("mitigation rejects mismatched combination sets") {
  std::vector<CombinationTally> direct = {tally("a", Approach::Direct, 0, 0)};
  std::vector<CombinationTally> algo = {tally("b", Approach::AlgorithmBased, 0, 0)};
  CHECK_THROWS_AS(mitigation_table(direct, algo), InputShapeError);

  std::vector<CombinationTally> wrong_side = {tally("a", Approach::Direct, 0, 0)};
  CHECK_THROWS_AS(mitigation_table(wrong_side, wrong_side), InputShapeError);
}

TEST_CASE("cohen kappa analytic cases") {
  CHECK(cohen_kappa({"A", "B", "A"}, {"A", "B", "A"}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cohen_kappa({"A", "A", "B", "B"}, {"A", "B", "A", "B"}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // p_o = 2/3; p_e = (2/3)(1/3) + (1/3)(2/3) = 4/9; kappa = (2/9)/(5/9) = 0.4.
  CHECK(cohen_kappa({"A", "A", "B"}, {"A", "B", "B"}) ==
        doctest::Approx(0.4).epsilon(1e-12));
  // Three labels, skewed marginals: p_o = 3/4, p_e = 1/4 + 0 + 1/8 = 3/8.
  CHECK(cohen_kappa({"A", "B", "C", "A"}, {"A", "C", "C", "A"}) ==
        doctest::Approx((0.75 - 0.375) / (1.0 - 0.375)).epsilon(1e-12));
  // Both raters constant and identical.
  CHECK(cohen_kappa({"A", "A"}, {"A", "A"}) == 1.0);
  CHECK_THROWS_AS(cohen_kappa({}, {}), UndefinedInputError);
  CHECK_THROWS_AS(cohen_kappa({"A"}, {"A", "B"}), UndefinedInputError);
}

TEST_CASE("kappa stays in [-1, 1] and is 1 only on identical lists") {
  std::mt19937_64 rng(7);
  std::vector<std::string> labels = {"RE1", "RE2", "CE4", "CE7"};
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = 1 + rng() % 20;
    std::vector<std::string> a, b;
    for (size_t i = 0; i < n; ++i) {
      a.push_back(labels[rng() % labels.size()]);
      b.push_back(labels[rng() % labels.size()]);
    }
    try {
      double k = cohen_kappa(a, b);
      CHECK(k >= -1.0 - 1e-12);
      CHECK(k <= 1.0 + 1e-12);
      if (k == 1.0) CHECK(a == b);
    } catch (const UndefinedInputError&) {
      // Constant, unequal marginals can hit the undefined corner.
    }
  }
}

TEST_CASE("pooling law: micro accuracy equals the N-weighted mean, exactly") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<CombinationTally> tallies;
    int rows = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < rows; ++i) {
      long long n = 1 + static_cast<long long>(rng() % 500);
      long long k = static_cast<long long>(rng() % (n + 1));
      tallies.push_back(tally("m" + std::to_string(i), Approach::Direct, n, k));
    }
    Rat pooled = micro_accuracy(tallies);

    // Independent route: weighted mean of per-combination accuracies.
    Rat total_n(0), weighted(0);
    for (const CombinationTally& t : tallies) total_n += Rat(t.instances);
    for (const CombinationTally& t : tallies) {
      weighted += Rat(t.instances, 1) / total_n * Rat(t.correct, t.instances);
    }
    CHECK(pooled == weighted);

    // And it differs from the unweighted mean whenever sizes are imbalanced.
    std::shuffle(tallies.begin(), tallies.end(), rng);
    CHECK(micro_accuracy(tallies) == pooled);  // permutation invariance
  }
}
