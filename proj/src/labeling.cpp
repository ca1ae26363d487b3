#include "xlate/labeling.hpp"

namespace xlate {

std::optional<LabelResult> label_failure(const Codebook& book,
                                         const ExecutionOutcome& outcome,
                                         Lang target_lang) {
  switch (outcome.verdict) {
    case Verdict::CompileError: {
      LabelResult result;
      result.classified = true;
      result.label = classify_compile(book, outcome.primary_diagnostic, target_lang);
      result.evidence = result.label.evidence;
      return result;
    }
    case Verdict::RuntimeError:
      return classify_runtime(book, outcome.primary_diagnostic, target_lang);
    default:
      return std::nullopt;  // only the two buckets carry taxonomy labels
  }
}

}  // namespace xlate
