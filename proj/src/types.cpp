#include "xlate/types.hpp"

namespace xlate {

std::string_view lang_name(Lang lang) {
  return lang == Lang::Python ? "Python" : "Java";
}

std::string_view lang_key(Lang lang) {
  return lang == Lang::Python ? "python" : "java";
}

std::optional<Lang> lang_from_key(std::string_view key) {
  if (key == "python" || key == "Python" || key == "py") return Lang::Python;
  if (key == "java" || key == "Java") return Lang::Java;
  return std::nullopt;
}

std::string direction_key(const Direction& d) {
  std::string out{lang_key(d.source)};
  out += '-';
  out += lang_key(d.target);
  return out;
}

std::optional<Direction> direction_from_key(std::string_view key) {
  size_t sep = key.find("->");
  size_t seplen = 2;
  if (sep == std::string_view::npos) {
    sep = key.find('-');
    seplen = 1;
  }
  if (sep == std::string_view::npos) return std::nullopt;
  auto src = lang_from_key(key.substr(0, sep));
  auto tgt = lang_from_key(key.substr(sep + seplen));
  if (!src || !tgt || *src == *tgt) return std::nullopt;
  return Direction{*src, *tgt};
}

std::string_view approach_key(Approach a) {
  return a == Approach::Direct ? "direct" : "algorithm";
}

std::optional<Approach> approach_from_key(std::string_view key) {
  if (key == "direct") return Approach::Direct;
  if (key == "algorithm" || key == "algo") return Approach::AlgorithmBased;
  return std::nullopt;
}

std::string_view verdict_key(Verdict v) {
  switch (v) {
    case Verdict::Correct: return "correct";
    case Verdict::CompileError: return "compile_error";
    case Verdict::RuntimeError: return "runtime_error";
    case Verdict::TestFailure: return "test_failure";
    case Verdict::Timeout: return "timeout";
  }
  return "correct";
}

std::optional<Verdict> verdict_from_key(std::string_view key) {
  if (key == "correct") return Verdict::Correct;
  if (key == "compile_error") return Verdict::CompileError;
  if (key == "runtime_error") return Verdict::RuntimeError;
  if (key == "test_failure") return Verdict::TestFailure;
  if (key == "timeout") return Verdict::Timeout;
  return std::nullopt;
}

std::string_view stage_key(Stage s) {
  return s == Stage::Compile ? "compile" : "runtime";
}

std::string_view subtype_key(Subtype s) {
  switch (s) {
    case Subtype::RE1: return "RE1";
    case Subtype::RE2: return "RE2";
    case Subtype::RE3: return "RE3";
    case Subtype::RE4: return "RE4";
    case Subtype::RE5: return "RE5";
    case Subtype::RE6: return "RE6";
    case Subtype::CE1: return "CE1";
    case Subtype::CE2: return "CE2";
    case Subtype::CE3: return "CE3";
    case Subtype::CE4: return "CE4";
    case Subtype::CE5: return "CE5";
    case Subtype::CE6: return "CE6";
    case Subtype::CE7: return "CE7";
  }
  return "CE7";
}

std::string_view subtype_long_name(Subtype s) {
  switch (s) {
    case Subtype::RE1: return "Dependency & Entry-Point Issues";
    case Subtype::RE2: return "Parsing & Type Conversion Issues";
    case Subtype::RE3: return "Index/Key Access Issues";
    case Subtype::RE4: return "Missing State & Invalid Reference";
    case Subtype::RE5: return "Arithmetic Errors";
    case Subtype::RE6: return "Resource Exhaustion";
    case Subtype::CE1: return "Import/Namespace Resolution";
    case Subtype::CE2: return "Lexical & Token Errors";
    case Subtype::CE3: return "Incomplete Constructs";
    case Subtype::CE4: return "Structural & Declaration Issues";
    case Subtype::CE5: return "Type/Overload Resolution Errors";
    case Subtype::CE6: return "Literal Constraints";
    case Subtype::CE7: return "Others";
  }
  return "Others";
}

Stage subtype_stage(Subtype s) {
  switch (s) {
    case Subtype::RE1:
    case Subtype::RE2:
    case Subtype::RE3:
    case Subtype::RE4:
    case Subtype::RE5:
    case Subtype::RE6:
      return Stage::Runtime;
    default:
      return Stage::Compile;
  }
}

std::optional<Subtype> subtype_from_key(std::string_view key) {
  for (Subtype s : kAllSubtypes) {
    if (subtype_key(s) == key) return s;
  }
  return std::nullopt;
}

}  // namespace xlate
