// Built-in facet detection rules for algorithm plans. One tab-separated row
// per rule: facet, then a regex applied to the lowercased plan text. A facet
// may appear on several rows; any hit marks it addressed.
#include <string>

#include "xlate/pipelines.hpp"

namespace xlate {

namespace {

const char* const kLines[] = {
    "# plan facet rules",
    "# version: 1.0.0",
    "# columns: facet\tpattern (regex over lowercased plan text)",
    "input_handling\t\\b(read|reads|reading|input|stdin|scan|scans|pars(e|es|ing))\\b",
    "data_structures\t\\b(list|lists|array|arrays|map|maps|dictionary|dict|set|sets|queue|stack|matrix|vector|tuple|string|strings|variable|variables)\\b",
    "numeric_rules\t\\b(integer|integers|int|float|floats|double|decimal|division|divide|modulo|mod|remainder|precision|overflow|arithmetic|numeric)\\b",
    "index_bases_loop_bounds\t\\b(index|indexes|indices|0-based|1-based|zero-based|one-based|loop|loops|iterate|iterates|iteration|bound|bounds|range)\\b",
    "termination\t\\b(terminate|terminates|termination|halt|halts|stop|stops|until|eof|exit|exits|break)\\b|end of (input|file)|no more",
    "output_format\t\\b(print|prints|output|outputs|write|writes|stdout|format|formatted|newline|separator)\\b|one per line|space-separated",
};

}  // namespace

const std::string& builtin_plan_rules_text() {
  static const std::string text = [] {
    std::string out;
    for (const char* line : kLines) {
      out += line;
      out += '\n';
    }
    return out;
  }();
  return text;
}

}  // namespace xlate
