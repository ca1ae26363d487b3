#include "xlate/taxonomy.hpp"

#include "xlate/errors.hpp"
#include "xlate/util.hpp"

namespace xlate {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t pos = 0;
  while (true) {
    size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

bool line_has_error_token(const std::string& line) {
  static const std::regex kTok(R"([A-Za-z_][\w.]*(Error|Exception)\b|\berror:)",
                               std::regex::ECMAScript);
  return std::regex_search(line, kTok);
}

}  // namespace

Codebook Codebook::parse(const std::string& text) {
  Codebook book;
  book.text_ = text;
  int lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view rest = trim(line.substr(1));
      if (starts_with(rest, "version:")) {
        book.version_ = std::string(trim(rest.substr(8)));
      }
      continue;
    }
    std::vector<std::string> f = split_tabs(raw);
    if (f.size() < 5) {
      throw ConfigError("codebook line " + std::to_string(lineno) +
                        ": expected at least 5 tab-separated fields");
    }
    CodebookRule rule;
    rule.rule_id = std::string(trim(f[0]));
    std::string stage(trim(f[1]));
    if (stage == "compile") {
      rule.stage = Stage::Compile;
    } else if (stage == "runtime") {
      rule.stage = Stage::Runtime;
    } else {
      throw ConfigError("codebook line " + std::to_string(lineno) +
                        ": unknown stage '" + stage + "'");
    }
    std::string lang(trim(f[2]));
    if (lang == "any") {
      rule.lang = std::nullopt;
    } else if (auto l = lang_from_key(lang)) {
      rule.lang = *l;
    } else {
      throw ConfigError("codebook line " + std::to_string(lineno) +
                        ": unknown lang '" + lang + "'");
    }
    auto subtype = subtype_from_key(trim(f[3]));
    if (!subtype) {
      throw ConfigError("codebook line " + std::to_string(lineno) +
                        ": unknown subtype '" + std::string(trim(f[3])) + "'");
    }
    rule.subtype = *subtype;
    if (subtype_stage(rule.subtype) != rule.stage) {
      throw ConfigError("codebook line " + std::to_string(lineno) + ": subtype " +
                        std::string(subtype_key(rule.subtype)) +
                        " does not belong to stage '" + stage + "'");
    }
    rule.pattern = f[4];
    if (f.size() >= 6) rule.rationale = f[5];
    try {
      book.compiled_.emplace_back(rule.pattern,
                                  std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw ConfigError("codebook line " + std::to_string(lineno) +
                        ": bad pattern: " + e.what());
    }
    book.rules_.push_back(std::move(rule));
  }
  if (book.version_.empty()) {
    throw ConfigError("codebook has no '# version:' header");
  }
  return book;
}

Codebook Codebook::builtin() { return parse(builtin_codebook_text()); }

const CodebookRule* Codebook::match(Stage stage, Lang lang,
                                    const std::string& line) const {
  for (size_t i = 0; i < rules_.size(); ++i) {
    const CodebookRule& rule = rules_[i];
    if (rule.stage != stage) continue;
    if (rule.lang && *rule.lang != lang) continue;
    if (std::regex_search(line, compiled_[i])) return &rule;
  }
  return nullptr;
}

std::string evidence_line(Stage stage, Lang lang, const std::string& diagnostics) {
  std::vector<std::string> lines = split_lines(diagnostics);
  std::string first_nonempty;
  for (const std::string& l : lines) {
    if (!trim(l).empty()) {
      first_nonempty = std::string(trim(l));
      break;
    }
  }
  if (stage == Stage::Runtime && lang == Lang::Python) {
    // Tracebacks end with the effective exception; chained tracebacks keep
    // the last one.
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
      if (line_has_error_token(*it)) return std::string(trim(*it));
    }
    return first_nonempty;
  }
  // Java (both stages) and Python compile checks report the effective error
  // first; later lines are carets, notes, or further errors.
  for (const std::string& l : lines) {
    if (line_has_error_token(l)) return std::string(trim(l));
  }
  return first_nonempty;
}

FailureLabel classify_compile(const Codebook& book, const std::string& diagnostics,
                              Lang target_lang) {
  std::string line = evidence_line(Stage::Compile, target_lang, diagnostics);
  const CodebookRule* rule = book.match(Stage::Compile, target_lang, line);
  FailureLabel label;
  label.stage = Stage::Compile;
  label.evidence = line;
  if (rule) {
    label.subtype = rule->subtype;
    label.matched_rule_id = rule->rule_id;
  } else {
    // The shipped codebook ends compile rules with a catch-all, so this only
    // triggers for a user codebook that dropped it.
    label.subtype = Subtype::CE7;
    label.matched_rule_id = "ce-residual-implicit";
  }
  return label;
}

LabelResult classify_runtime(const Codebook& book, const std::string& trace,
                             Lang target_lang) {
  std::string line = evidence_line(Stage::Runtime, target_lang, trace);
  LabelResult result;
  result.evidence = line;
  const CodebookRule* rule = book.match(Stage::Runtime, target_lang, line);
  if (rule) {
    result.classified = true;
    result.label.stage = Stage::Runtime;
    result.label.subtype = rule->subtype;
    result.label.matched_rule_id = rule->rule_id;
    result.label.evidence = line;
  }
  return result;
}

}  // namespace xlate
