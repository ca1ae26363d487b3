#include "xlate/reporting.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "nlohmann/json.hpp"
#include "xlate/errors.hpp"
#include "xlate/util.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace xlate {

namespace {

std::string approach_display(Approach a) {
  return a == Approach::Direct ? "Direct" : "Algorithm";
}

std::string direction_display(const Direction& d) {
  return std::string(lang_name(d.source)) + "->" + std::string(lang_name(d.target));
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

long long parse_count(const std::string& cell, const std::string& what, int lineno) {
  std::string v(trim(cell));
  if (v.empty() || v == "x" || v == "X") return 0;  // published tables mark zero cells
  try {
    size_t used = 0;
    long long n = std::stoll(v, &used);
    if (used != v.size() || n < 0) throw std::invalid_argument(v);
    return n;
  } catch (...) {
    throw ConfigError("counts csv line " + std::to_string(lineno) + ": bad " + what +
                      " value '" + v + "'");
  }
}

}  // namespace

std::string CaseRecord::case_key() const {
  return dataset_id + "/" + direction_key(direction) + "/" + task_id + ":" +
         model_id + ":" + std::string(approach_key(approach));
}

std::string CaseRecord::to_jsonl() const {
  json doc = {
      {"task_id", task_id},
      {"dataset", dataset_id},
      {"model", model_id},
      {"approach", std::string(approach_key(approach))},
      {"direction", direction_key(direction)},
      {"verdict", std::string(verdict_key(verdict))},
      {"durations", {{"compile_ms", compile_ms}, {"run_ms", run_ms}}},
      {"diagnostic_digest", diagnostic_digest},
      {"unclassified", unclassified},
  };
  if (label) {
    doc["label"] = {
        {"stage", std::string(stage_key(label->stage))},
        {"subtype", std::string(subtype_key(label->subtype))},
        {"rule_id", label->matched_rule_id},
        {"evidence", label->evidence},
    };
  }
  if (first_failure_test) doc["first_failure_test"] = *first_failure_test;
  return doc.dump();
}

CaseRecord CaseRecord::from_jsonl(const std::string& line) {
  json doc = json::parse(line);
  CaseRecord r;
  r.task_id = doc.at("task_id").get<std::string>();
  r.dataset_id = doc.at("dataset").get<std::string>();
  r.model_id = doc.at("model").get<std::string>();
  auto approach = approach_from_key(doc.at("approach").get<std::string>());
  auto direction = direction_from_key(doc.at("direction").get<std::string>());
  auto verdict = verdict_from_key(doc.at("verdict").get<std::string>());
  if (!approach || !direction || !verdict) {
    throw IoError("malformed case record: " + line);
  }
  r.approach = *approach;
  r.direction = *direction;
  r.verdict = *verdict;
  if (doc.contains("durations")) {
    r.compile_ms = doc["durations"].value("compile_ms", 0L);
    r.run_ms = doc["durations"].value("run_ms", 0L);
  }
  r.diagnostic_digest = doc.value("diagnostic_digest", "");
  r.unclassified = doc.value("unclassified", false);
  if (doc.contains("label")) {
    FailureLabel label;
    const json& l = doc["label"];
    label.stage = l.at("stage").get<std::string>() == "compile" ? Stage::Compile
                                                                : Stage::Runtime;
    auto subtype = subtype_from_key(l.at("subtype").get<std::string>());
    if (!subtype) throw IoError("malformed case label: " + line);
    label.subtype = *subtype;
    label.matched_rule_id = l.value("rule_id", "");
    label.evidence = l.value("evidence", "");
    r.label = std::move(label);
  }
  if (doc.contains("first_failure_test")) {
    r.first_failure_test = doc["first_failure_test"].get<int>();
  }
  return r;
}

std::vector<CaseRecord> load_case_records(const fs::path& jsonl) {
  std::vector<CaseRecord> records;
  std::error_code ec;
  if (!fs::exists(jsonl, ec)) return records;
  for (const std::string& line : split_lines(read_file(jsonl))) {
    if (trim(line).empty()) continue;
    records.push_back(CaseRecord::from_jsonl(line));
  }
  return records;
}

std::vector<CombinationTally> tallies_from_records(std::span<const CaseRecord> records) {
  std::map<CombinationKey, CombinationTally> by_key;
  for (const CaseRecord& r : records) {
    CombinationTally& tally = by_key[r.combination()];
    tally.key = r.combination();
    ++tally.instances;
    if (r.verdict == Verdict::Correct) {
      ++tally.correct;
    }
    ++tally.verdict_counts[r.verdict];
    if (r.label) ++tally.subtype_counts[r.label->subtype];
    if (r.unclassified) ++tally.unclassified;
  }
  std::vector<CombinationTally> out;
  out.reserve(by_key.size());
  for (auto& [key, tally] : by_key) out.push_back(std::move(tally));
  return out;
}

FailureProfileRow failure_profile(std::span<const CaseRecord> records) {
  FailureProfileRow row;
  if (records.empty()) {
    row.incomplete = true;
    return row;
  }
  row.key = records.front().combination();
  for (const CaseRecord& r : records) {
    if (!(r.combination() == row.key)) {
      throw InputShapeError("failure_profile needs records from one combination");
    }
  }
  long long n = static_cast<long long>(records.size());
  auto count = [&](Verdict v) {
    long long c = 0;
    for (const CaseRecord& r : records) c += r.verdict == v;
    return c;
  };
  row.instances = n;
  row.accuracy = Rat(count(Verdict::Correct), n);
  row.re_rate = Rat(count(Verdict::RuntimeError), n);
  row.ce_rate = Rat(count(Verdict::CompileError), n);
  row.tf_rate = Rat(count(Verdict::TestFailure), n);
  row.to_rate = Rat(count(Verdict::Timeout), n);
  return row;
}

long long TaxonomyGrid::column_sum(Subtype s) const {
  long long sum = 0;
  for (const TaxonomyGridRow& row : rows) {
    for (const auto& [dir, counts] : row.counts) {
      auto it = counts.find(s);
      if (it != counts.end()) sum += it->second;
    }
  }
  return sum;
}

TaxonomyGrid taxonomy_grid(std::span<const CombinationTally> tallies) {
  TaxonomyGrid grid;
  std::set<std::string> dirs;
  std::map<std::tuple<std::string, std::string, Approach>, TaxonomyGridRow> rows;
  for (const CombinationTally& t : tallies) {
    std::string dir = direction_key(t.key.direction);
    dirs.insert(dir);
    auto key = std::make_tuple(t.key.model_id, t.key.dataset_id, t.key.approach);
    TaxonomyGridRow& row = rows[key];
    row.model_id = t.key.model_id;
    row.dataset_id = t.key.dataset_id;
    row.approach = t.key.approach;
    for (Subtype s : kAllSubtypes) {
      row.counts[dir][s] += t.subtype_count(s);
    }
    row.unclassified[dir] += t.unclassified;
  }
  grid.direction_keys.assign(dirs.begin(), dirs.end());
  for (auto& [key, row] : rows) grid.rows.push_back(std::move(row));
  return grid;
}

namespace {

// ------------------------------------------------------------ summary.csv

std::string render_summary_csv(const RunData& data) {
  std::ostringstream out;
  out << "model,dataset,approach,direction,N,K,accuracy_pct,re_pct,ce_pct,tf_pct,to_pct\n";
  for (const CombinationTally& t : data.tallies) {
    out << t.key.model_id << ',' << t.key.dataset_id << ','
        << approach_key(t.key.approach) << ',' << direction_key(t.key.direction) << ','
        << t.instances << ',' << t.correct;
    if (t.instances > 0) {
      out << ',' << percent_1dp(Rat(t.correct, t.instances))
          << ',' << percent_1dp(Rat(t.verdict_count(Verdict::RuntimeError), t.instances))
          << ',' << percent_1dp(Rat(t.verdict_count(Verdict::CompileError), t.instances))
          << ',' << percent_1dp(Rat(t.verdict_count(Verdict::TestFailure), t.instances))
          << ',' << percent_1dp(Rat(t.verdict_count(Verdict::Timeout), t.instances));
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
  return out.str();
}

// ------------------------------------------------------------ taxonomy.csv

std::string render_taxonomy_csv(const RunData& data) {
  std::ostringstream out;
  out << "model,dataset,approach,direction";
  for (Subtype s : kAllSubtypes) out << ',' << subtype_key(s);
  out << ",unclassified\n";
  for (const CombinationTally& t : data.tallies) {
    out << t.key.model_id << ',' << t.key.dataset_id << ','
        << approach_key(t.key.approach) << ',' << direction_key(t.key.direction);
    for (Subtype s : kAllSubtypes) out << ',' << t.subtype_count(s);
    out << ',' << t.unclassified << '\n';
  }
  return out.str();
}

// ------------------------------------------------------------ report.md

void render_accuracy_section(std::ostream& out, const RunData& data) {
  out << "## Accuracy (micro-average)\n\n";
  auto side = [&](Approach a) {
    std::vector<CombinationTally> subset;
    for (const CombinationTally& t : data.tallies) {
      if (t.key.approach == a) subset.push_back(t);
    }
    return subset;
  };
  std::vector<CombinationTally> direct = side(Approach::Direct);
  std::vector<CombinationTally> algo = side(Approach::AlgorithmBased);

  bool have_direct = false, have_algo = false;
  Rat acc_direct, acc_algo;
  try {
    acc_direct = micro_accuracy(direct);
    have_direct = true;
  } catch (const UndefinedInputError&) {
  }
  try {
    acc_algo = micro_accuracy(algo);
    have_algo = true;
  } catch (const UndefinedInputError&) {
  }
  if (!have_direct && !have_algo) {
    out << "No instance totals available.\n\n";
    return;
  }
  out << "| Approach | N | K | Accuracy |\n|---|---|---|---|\n";
  auto row = [&](const char* name, std::span<const CombinationTally> subset, Rat acc) {
    long long n = 0, k = 0;
    for (const CombinationTally& t : subset) {
      n += t.instances;
      k += t.correct;
    }
    out << "| " << name << " | " << n << " | " << k << " | " << percent_1dp(acc)
        << "% |\n";
  };
  if (have_direct) row("Direct", direct, acc_direct);
  if (have_algo) row("Algorithm", algo, acc_algo);
  if (have_direct && have_algo) {
    long long delta =
        percent_1dp_tenths(acc_algo) - percent_1dp_tenths(acc_direct);
    long long mag = delta < 0 ? -delta : delta;
    out << "\nImprovement (Algorithm - Direct): " << (delta < 0 ? "-" : "")
        << mag / 10 << "." << mag % 10 << " pp\n";
  }
  out << '\n';

  // Per-combination comparison, Direct vs Algorithm side by side.
  std::map<std::tuple<std::string, std::string, std::string>,
           std::map<Approach, const CombinationTally*>>
      cells;
  for (const CombinationTally& t : data.tallies) {
    cells[{t.key.model_id, t.key.dataset_id, direction_key(t.key.direction)}]
         [t.key.approach] = &t;
  }
  out << "| Model | Dataset | Direction | N | Direct | Algorithm |\n"
         "|---|---|---|---|---|---|\n";
  for (const auto& [key, byapp] : cells) {
    const auto& [model, dataset, dir] = key;
    auto fmt = [&](Approach a) -> std::string {
      auto it = byapp.find(a);
      if (it == byapp.end() || it->second->instances == 0) return "x";
      return percent_1dp(Rat(it->second->correct, it->second->instances)) + "%";
    };
    long long n = 0;
    for (const auto& [a, t] : byapp) n = std::max(n, t->instances);
    out << "| " << model << " | " << dataset << " | " << dir << " | " << n << " | "
        << fmt(Approach::Direct) << " | " << fmt(Approach::AlgorithmBased) << " |\n";
  }
  out << '\n';
}

void render_profile_section(std::ostream& out, const RunData& data) {
  out << "## Failure profile\n\n";
  bool any = false;
  for (const CombinationTally& t : data.tallies) any |= t.instances > 0;
  if (!any) {
    out << "Not available: the input carries subtype counts only, no instance "
           "totals.\n\n";
    return;
  }
  out << "| Model | Dataset | Approach | Direction | N | Acc% | RE% | CE% | TF% | TO% |\n"
         "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const CombinationTally& t : data.tallies) {
    if (t.instances == 0) continue;
    out << "| " << t.key.model_id << " | " << t.key.dataset_id << " | "
        << approach_display(t.key.approach) << " | "
        << direction_display(t.key.direction) << " | " << t.instances << " | "
        << percent_1dp(Rat(t.correct, t.instances)) << " | "
        << percent_1dp(Rat(t.verdict_count(Verdict::RuntimeError), t.instances)) << " | "
        << percent_1dp(Rat(t.verdict_count(Verdict::CompileError), t.instances)) << " | "
        << percent_1dp(Rat(t.verdict_count(Verdict::TestFailure), t.instances)) << " | "
        << percent_1dp(Rat(t.verdict_count(Verdict::Timeout), t.instances)) << " |\n";
  }
  out << '\n';
}

void render_taxonomy_section(std::ostream& out, const RunData& data) {
  out << "## Error counts by taxonomy\n\n";
  TaxonomyGrid grid = taxonomy_grid(data.tallies);
  if (grid.rows.empty()) {
    out << "No labeled failures.\n\n";
    return;
  }
  for (const std::string& dir : grid.direction_keys) {
    auto d = direction_from_key(dir);
    out << "### " << (d ? direction_display(*d) : dir) << "\n\n";
    out << "| Model | Dataset | Approach |";
    for (Subtype s : kAllSubtypes) out << ' ' << subtype_key(s) << " |";
    out << " unclassified |\n|---|---|---|";
    for (size_t i = 0; i < kAllSubtypes.size() + 1; ++i) out << "---|";
    out << '\n';
    for (const TaxonomyGridRow& row : grid.rows) {
      out << "| " << row.model_id << " | " << row.dataset_id << " | "
          << approach_display(row.approach) << " |";
      auto counts_it = row.counts.find(dir);
      for (Subtype s : kAllSubtypes) {
        long long c = 0;
        if (counts_it != row.counts.end()) {
          auto it = counts_it->second.find(s);
          if (it != counts_it->second.end()) c = it->second;
        }
        // Zero renders as "x" here; machine views keep numeric 0.
        if (c == 0) {
          out << " x |";
        } else {
          out << ' ' << c << " |";
        }
      }
      long long uc = 0;
      auto uit = row.unclassified.find(dir);
      if (uit != row.unclassified.end()) uc = uit->second;
      if (uc == 0) {
        out << " x |\n";
      } else {
        out << ' ' << uc << " |\n";
      }
    }
    out << '\n';
  }
}

void render_frequency_section(std::ostream& out, const RunData& data) {
  out << "## Pooled subtype frequencies\n\n";
  auto emit = [&](const char* name, Stage stage) {
    try {
      FrequencyDistribution dist = stage == Stage::Runtime
                                       ? runtime_frequencies(data.tallies)
                                       : compile_frequencies(data.tallies);
      out << "### " << name << " (grand total " << dist.grand_total << ")\n\n";
      out << "| Subtype | Count | Share |\n|---|---|---|\n";
      for (const auto& [s, f] : dist.freq) {
        long long count = f.numerator() * (dist.grand_total / f.denominator());
        out << "| " << subtype_key(s) << " " << subtype_long_name(s) << " | " << count
            << " | " << percent_1dp(f) << "% |\n";
      }
      out << '\n';
    } catch (const UndefinedInputError&) {
      out << "### " << name << "\n\nNo labeled failures.\n\n";
    }
  };
  emit("Runtime", Stage::Runtime);
  emit("Compile-time", Stage::Compile);
}

void render_mitigation_section(std::ostream& out, const RunData& data) {
  out << "## Mitigation (Direct vs Algorithm)\n\n";
  std::vector<CombinationTally> direct, algo;
  for (const CombinationTally& t : data.tallies) {
    (t.key.approach == Approach::Direct ? direct : algo).push_back(t);
  }
  if (direct.empty() || algo.empty()) {
    out << "Not available: needs tallies for both approaches over the same "
           "combinations.\n\n";
    return;
  }
  std::vector<MitigationRow> rows;
  try {
    rows = mitigation_table(direct, algo);
  } catch (const InputShapeError& e) {
    out << "Not available: " << e.what() << "\n\n";
    return;
  }
  out << "| Subtype | Direct | Algorithm | Direct share | Algorithm share | Mitigated |\n"
         "|---|---|---|---|---|---|\n";
  for (const MitigationRow& r : rows) {
    out << "| " << subtype_key(r.subtype) << " " << subtype_long_name(r.subtype)
        << " | " << r.count_direct << " | " << r.count_algo << " | "
        << percent_1dp(r.p_direct) << "% | " << percent_1dp(r.p_algo) << "% | "
        << (r.mitigated ? "yes" : "no") << " |\n";
  }
  out << '\n';
}

std::string render_report_md(const RunData& data) {
  std::ostringstream out;
  out << "# Translation run report\n\nRun id: `" << data.run_id << "`\n\n";
  render_accuracy_section(out, data);
  render_profile_section(out, data);
  render_taxonomy_section(out, data);
  render_frequency_section(out, data);
  render_mitigation_section(out, data);
  return out.str();
}

}  // namespace

std::vector<fs::path> emit_reports(const fs::path& out_dir, const RunData& data,
                                   const std::set<ReportFormat>& formats) {
  fs::path dir = out_dir / "reports" / data.run_id;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report dir: " + dir.string());

  std::vector<fs::path> written;
  if (formats.count(ReportFormat::Jsonl) && !data.records.empty()) {
    std::vector<CaseRecord> sorted = data.records;
    std::sort(sorted.begin(), sorted.end(),
              [](const CaseRecord& a, const CaseRecord& b) {
                return a.case_key() < b.case_key();
              });
    std::string body;
    for (const CaseRecord& r : sorted) {
      body += r.to_jsonl();
      body += '\n';
    }
    write_file(dir / "cases.jsonl", body);
    written.push_back(dir / "cases.jsonl");
  }
  if (formats.count(ReportFormat::Csv)) {
    write_file(dir / "summary.csv", render_summary_csv(data));
    write_file(dir / "taxonomy.csv", render_taxonomy_csv(data));
    written.push_back(dir / "summary.csv");
    written.push_back(dir / "taxonomy.csv");
  }
  if (formats.count(ReportFormat::Markdown)) {
    write_file(dir / "report.md", render_report_md(data));
    written.push_back(dir / "report.md");
  }
  if (!data.manifest_json.empty()) {
    write_file(dir / "manifest.json", data.manifest_json);
    written.push_back(dir / "manifest.json");
  }
  return written;
}

std::vector<CombinationTally> load_counts_csv(const fs::path& csv) {
  std::vector<std::string> lines = split_lines(read_file(csv));
  std::vector<CombinationTally> tallies;
  int lineno = 0;
  for (const std::string& line : lines) {
    ++lineno;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    std::vector<std::string> f = csv_split(line);
    if (lineno == 1 && !f.empty() && trim(f[0]) == "model") continue;  // header
    if (f.size() < 6 + kAllSubtypes.size()) {
      throw ConfigError("counts csv line " + std::to_string(lineno) +
                        ": expected model,dataset,approach,direction,N,K," +
                        std::to_string(kAllSubtypes.size()) + " subtype columns");
    }
    CombinationTally t;
    t.key.model_id = std::string(trim(f[0]));
    t.key.dataset_id = std::string(trim(f[1]));
    auto approach = approach_from_key(trim(f[2]));
    auto direction = direction_from_key(trim(f[3]));
    if (!approach || !direction) {
      throw ConfigError("counts csv line " + std::to_string(lineno) +
                        ": bad approach or direction");
    }
    t.key.approach = *approach;
    t.key.direction = *direction;
    t.instances = parse_count(f[4], "N", lineno);
    t.correct = parse_count(f[5], "K", lineno);
    size_t col = 6;
    for (Subtype s : kAllSubtypes) {
      long long n = parse_count(f[col++], std::string(subtype_key(s)), lineno);
      if (n != 0) t.subtype_counts[s] = n;
    }
    // Counts replays carry no per-verdict split; approximate the failure
    // verdicts from the labeled stages so conservation-style sums stay
    // meaningful when N is present.
    if (t.instances > 0) {
      long long runtime = 0, compile = 0;
      for (Subtype s : kRuntimeSubtypes) runtime += t.subtype_count(s);
      for (Subtype s : kCompileSubtypes) compile += t.subtype_count(s);
      t.verdict_counts[Verdict::Correct] = t.correct;
      if (runtime > 0) t.verdict_counts[Verdict::RuntimeError] = runtime;
      if (compile > 0) t.verdict_counts[Verdict::CompileError] = compile;
      long long rest = t.instances - t.correct - runtime - compile;
      if (rest > 0) t.verdict_counts[Verdict::TestFailure] = rest;
    }
    tallies.push_back(std::move(t));
  }
  return tallies;
}

void write_counts_csv(const fs::path& csv, std::span<const CombinationTally> tallies) {
  std::ostringstream out;
  out << "model,dataset,approach,direction,N,K";
  for (Subtype s : kAllSubtypes) out << ',' << subtype_key(s);
  out << '\n';
  for (const CombinationTally& t : tallies) {
    out << t.key.model_id << ',' << t.key.dataset_id << ','
        << approach_key(t.key.approach) << ',' << direction_key(t.key.direction) << ','
        << t.instances << ',' << t.correct;
    for (Subtype s : kAllSubtypes) out << ',' << t.subtype_count(s);
    out << '\n';
  }
  write_file(csv, out.str());
}

}  // namespace xlate
