#include "xlate/metrics.hpp"

#include <algorithm>
#include <set>

#include "xlate/errors.hpp"

namespace xlate {

namespace {

const std::array<Verdict, 4> kFailureVerdicts = {
    Verdict::CompileError, Verdict::RuntimeError, Verdict::TestFailure,
    Verdict::Timeout};

FrequencyDistribution frequencies_for(std::span<const CombinationTally> tallies,
                                      std::span<const Subtype> subtypes, Stage group) {
  FrequencyDistribution dist;
  dist.group = group;
  std::map<Subtype, long long> pooled;
  for (Subtype s : subtypes) pooled[s] = 0;
  for (const CombinationTally& t : tallies) {
    for (Subtype s : subtypes) pooled[s] += t.subtype_count(s);
  }
  long long grand = 0;
  for (auto& [s, n] : pooled) grand += n;
  if (grand == 0) {
    throw UndefinedInputError("frequency distribution over all-zero counts");
  }
  dist.grand_total = grand;
  for (auto& [s, n] : pooled) dist.freq[s] = Rat(n, grand);
  return dist;
}

// Pooled per-subtype counts keyed by everything except approach must line up.
void check_paired_shape(std::span<const CombinationTally> direct,
                        std::span<const CombinationTally> algo) {
  auto cells = [](std::span<const CombinationTally> side, Approach want) {
    std::set<std::tuple<std::string, std::string, std::string>> out;
    for (const CombinationTally& t : side) {
      if (t.key.approach != want) {
        throw InputShapeError("tally with approach '" +
                              std::string(approach_key(t.key.approach)) +
                              "' passed on the '" + std::string(approach_key(want)) +
                              "' side");
      }
      out.insert({t.key.model_id, t.key.dataset_id, direction_key(t.key.direction)});
    }
    return out;
  };
  if (cells(direct, Approach::Direct) != cells(algo, Approach::AlgorithmBased)) {
    throw InputShapeError("direct and algorithm tallies cover different combinations");
  }
}

}  // namespace

bool CombinationTally::conserves() const {
  long long failures = 0;
  for (Verdict v : kFailureVerdicts) failures += verdict_count(v);
  return correct + failures == instances;
}

Rat micro_accuracy(std::span<const CombinationTally> tallies) {
  long long total_n = 0, total_k = 0;
  for (const CombinationTally& t : tallies) {
    total_n += t.instances;
    total_k += t.correct;
  }
  if (total_n <= 0) {
    throw UndefinedInputError("micro accuracy over zero instances");
  }
  return Rat(total_k, total_n);
}

FrequencyDistribution runtime_frequencies(std::span<const CombinationTally> tallies) {
  return frequencies_for(tallies, kRuntimeSubtypes, Stage::Runtime);
}

FrequencyDistribution compile_frequencies(std::span<const CombinationTally> tallies) {
  return frequencies_for(tallies, kCompileSubtypes, Stage::Compile);
}

std::vector<MitigationRow> mitigation_table(std::span<const CombinationTally> direct,
                                            std::span<const CombinationTally> algo) {
  check_paired_shape(direct, algo);
  std::vector<MitigationRow> rows;
  for (Subtype s : kAllSubtypes) {
    MitigationRow row;
    row.subtype = s;
    for (const CombinationTally& t : direct) row.count_direct += t.subtype_count(s);
    for (const CombinationTally& t : algo) row.count_algo += t.subtype_count(s);
    row.count_all = row.count_direct + row.count_algo;
    if (row.count_all == 0) continue;  // rows with no occurrences are omitted
    row.p_direct = Rat(row.count_direct, row.count_all);
    row.p_algo = Rat(row.count_algo, row.count_all);
    row.mitigated = row.p_algo < row.p_direct;  // strict; a tie is not mitigation
    rows.push_back(row);
  }
  return rows;
}

double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || a.size() != b.size()) {
    throw UndefinedInputError("kappa needs two equal-length, non-empty label lists");
  }
  const long long n = static_cast<long long>(a.size());
  long long agree = 0;
  std::map<std::string, long long> marg_a, marg_b;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) ++agree;
    ++marg_a[a[i]];
    ++marg_b[b[i]];
  }
  Rat po(agree, n);
  Rat pe(0);
  for (const auto& [label, ca] : marg_a) {
    auto it = marg_b.find(label);
    if (it != marg_b.end()) pe += Rat(ca, n) * Rat(it->second, n);
  }
  if (pe == Rat(1)) {
    if (po == Rat(1)) return 1.0;
    throw UndefinedInputError("kappa undefined: chance agreement is 1 but observed is not");
  }
  return to_double((po - pe) / (Rat(1) - pe));
}

long long percent_1dp_tenths(const Rat& fraction) {
  // value in percent = 100 * num / den; first to hundredths, then to tenths,
  // both half-up. Counts are non-negative here.
  long long num = fraction.numerator();
  long long den = fraction.denominator();
  long long hundredths = (2 * 10'000 * num + den) / (2 * den);
  return (hundredths + 5) / 10;
}

std::string percent_1dp(const Rat& fraction) {
  long long tenths = percent_1dp_tenths(fraction);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace xlate
