// Metric engine over per-combination tallies: pooled micro-average accuracy,
// grand-level subtype frequency distributions, per-subtype mitigation, and a
// Cohen's-kappa agreement audit. All accumulation is exact rational
// arithmetic; rounding happens only when a percent is rendered.
#pragma once

#include <boost/rational.hpp>

#include <map>
#include <span>
#include <string>
#include <vector>

#include "xlate/types.hpp"

namespace xlate {

using Rat = boost::rational<long long>;

struct CombinationKey {
  std::string model_id;
  std::string dataset_id;
  Approach approach = Approach::Direct;
  Direction direction;

  bool operator==(const CombinationKey&) const = default;
  auto operator<=>(const CombinationKey&) const = default;
};

// The unit all metrics are computed over: one (model, dataset, approach,
// direction) cell.
struct CombinationTally {
  CombinationKey key;
  long long instances = 0;  // N
  long long correct = 0;    // K
  std::map<Verdict, long long> verdict_counts;
  std::map<Subtype, long long> subtype_counts;  // absent = zero
  long long unclassified = 0;  // runtime failures no rule matched

  long long verdict_count(Verdict v) const {
    auto it = verdict_counts.find(v);
    return it == verdict_counts.end() ? 0 : it->second;
  }
  long long subtype_count(Subtype s) const {
    auto it = subtype_counts.find(s);
    return it == subtype_counts.end() ? 0 : it->second;
  }
  // Correct + the four failure verdicts must cover every instance.
  bool conserves() const;
};

struct FrequencyDistribution {
  Stage group = Stage::Runtime;
  long long grand_total = 0;  // N_RE or N_CE
  std::map<Subtype, Rat> freq;
};

struct MitigationRow {
  Subtype subtype = Subtype::RE1;
  long long count_direct = 0;
  long long count_algo = 0;
  long long count_all = 0;
  Rat p_direct;
  Rat p_algo;
  bool mitigated = false;  // strictly lower share under the algorithm approach
};

// (sum K) / (sum N) over the given tallies. Throws UndefinedInputError when
// the pool is empty or sums to zero instances.
Rat micro_accuracy(std::span<const CombinationTally> tallies);

// Pooled counts normalized by the grand total; never an average of per-row
// percentages. Throws UndefinedInputError when every count is zero.
FrequencyDistribution runtime_frequencies(std::span<const CombinationTally> tallies);
FrequencyDistribution compile_frequencies(std::span<const CombinationTally> tallies);

// One row per subtype with count_all > 0. The two tally sets must cover the
// same (model, dataset, direction) cells; otherwise InputShapeError.
std::vector<MitigationRow> mitigation_table(std::span<const CombinationTally> direct,
                                            std::span<const CombinationTally> algo);

// Chance-corrected agreement between two equal-length label sequences.
// Both raters constant and identical is defined as 1.
double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Percent rendering at the published tables' precision: half-up to two
// decimals, then half-up to one. For a fraction like 144/264 this yields
// "54.6", matching how the source tables were rounded.
std::string percent_1dp(const Rat& fraction);
// Same rounding, returned in tenths of a percent.
long long percent_1dp_tenths(const Rat& fraction);
double to_double(const Rat& r);

}  // namespace xlate
