// Bridges execution outcomes to taxonomy labels: compile and runtime failures
// get exactly one label each; test failures and timeouts get none.
#pragma once

#include <optional>

#include "xlate/executor.hpp"
#include "xlate/taxonomy.hpp"

namespace xlate {

// nullopt for Correct, TestFailure, and Timeout. An unclassified runtime
// trace yields a result with classified=false.
std::optional<LabelResult> label_failure(const Codebook& book,
                                         const ExecutionOutcome& outcome,
                                         Lang target_lang);

}  // namespace xlate
