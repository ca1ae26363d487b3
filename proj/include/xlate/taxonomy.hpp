// Maps compile/runtime diagnostics to failure subtypes via an ordered rule
// codebook. First match wins; compile residue falls into the CE7 catch-all;
// runtime residue is either reference-shaped (RE4) or flagged unclassified.
#pragma once

#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "xlate/types.hpp"

namespace xlate {

struct CodebookRule {
  std::string rule_id;
  Stage stage = Stage::Compile;
  std::optional<Lang> lang;  // nullopt = applies to both languages
  Subtype subtype = Subtype::CE7;
  std::string pattern;       // case-insensitive regex over the evidence line
  std::string rationale;
};

class Codebook {
 public:
  // Parses the tab-separated codebook text. Throws ConfigError on bad rows.
  static Codebook parse(const std::string& text);
  static Codebook builtin();

  const std::string& version() const { return version_; }
  const std::vector<CodebookRule>& rules() const { return rules_; }
  // The exact text this codebook was parsed from.
  const std::string& text() const { return text_; }

  // First matching rule for (stage, lang) against the evidence line.
  const CodebookRule* match(Stage stage, Lang lang, const std::string& line) const;

 private:
  std::string version_;
  std::string text_;
  std::vector<CodebookRule> rules_;
  std::vector<std::regex> compiled_;  // parallel to rules_
};

// The tab-separated source text of the built-in codebook.
const std::string& builtin_codebook_text();

struct FailureLabel {
  Stage stage = Stage::Compile;
  Subtype subtype = Subtype::CE7;
  std::string matched_rule_id;
  std::string evidence;  // the diagnostic line the rule matched
};

struct LabelResult {
  bool classified = false;
  FailureLabel label;      // valid when classified
  std::string evidence;    // evidence line even when unclassified
};

// Picks the diagnostic line classification operates on. Compile diagnostics
// with several errors classify from the first error line only; Python
// runtime tracebacks end with the effective exception, so the last one wins.
std::string evidence_line(Stage stage, Lang lang, const std::string& diagnostics);

FailureLabel classify_compile(const Codebook& book, const std::string& diagnostics,
                              Lang target_lang);
LabelResult classify_runtime(const Codebook& book, const std::string& trace,
                             Lang target_lang);

}  // namespace xlate
