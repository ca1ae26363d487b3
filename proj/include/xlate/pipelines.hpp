// The two translation workflows: Direct (one call) and Algorithm-based
// (plan extraction, checklist validation with retries, then code generation).
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xlate/corpus.hpp"
#include "xlate/gateway.hpp"
#include "xlate/types.hpp"

namespace xlate {

// The six facets an algorithm plan must address to be accepted.
enum class PlanFacet {
  InputHandling,
  DataStructures,
  NumericRules,
  IndexBasesLoopBounds,
  Termination,
  OutputFormat,
};

inline constexpr std::array<PlanFacet, 6> kPlanFacets = {
    PlanFacet::InputHandling,  PlanFacet::DataStructures,
    PlanFacet::NumericRules,   PlanFacet::IndexBasesLoopBounds,
    PlanFacet::Termination,    PlanFacet::OutputFormat,
};

std::string_view plan_facet_key(PlanFacet f);

struct AlgorithmPlan {
  std::string plan_text;
  std::map<PlanFacet, bool> checklist;  // always exactly the six facets
  int attempt_index = 1;
  bool accepted = false;  // all six facets addressed
};

struct TranslationArtifact {
  std::string task_id;
  std::string dataset_id;
  std::string model_id;
  Approach approach = Approach::Direct;
  Direction direction;
  std::string generated_code;
  std::optional<AlgorithmPlan> plan;
  int call_count = 0;
  std::vector<std::string> transcript_tags;
  std::string error;  // artifact-level failure (e.g. empty model output)
};

// Facet detection rules as data: one regex per facet over the lowercased
// plan text.
class PlanRules {
 public:
  static PlanRules parse(const std::string& text);
  static PlanRules builtin();
  const std::string& version() const { return version_; }

  AlgorithmPlan validate(const std::string& plan_text) const;

 private:
  std::string version_;
  std::vector<std::pair<PlanFacet, std::string>> patterns_;
};

const std::string& builtin_plan_rules_text();

// Prompt templates, versioned text resources. Rendering is a pure function;
// no placeholder survives substitution.
std::string render_direct_prompt(Lang source_lang, Lang target_lang,
                                 const std::string& source_code);
std::string render_algorithm_prompt(Lang source_lang, const std::string& source_code);
std::string render_codegen_prompt(Lang target_lang, const std::string& plan_text);

// Pulls the candidate program out of model output: the longest fenced block
// tagged for the target language (untagged blocks eligible), else the raw
// text trimmed. Throws EmptyOutputError when nothing remains.
std::string extract_code(const std::string& raw_text, Lang target_lang);

AlgorithmPlan validate_algorithm_plan(const std::string& plan_text);

// Request tags: "<dataset>/<direction>/<task>:<model>:direct",
// ":algorithm:<attempt>", ":codegen".
std::string direct_tag(const TranslationTask& task, const std::string& model_id);
std::string algorithm_tag(const TranslationTask& task, const std::string& model_id,
                          int attempt);
std::string codegen_tag(const TranslationTask& task, const std::string& model_id);

struct PipelineOptions {
  int plan_retry_budget = 2;  // retries after the first plan attempt
  const PlanRules* plan_rules = nullptr;  // null = builtin
  DecodingParams decoding;
};

// Exactly one model call. An empty extraction is recorded in the artifact,
// not thrown. Gateway errors propagate with task context.
TranslationArtifact translate_direct(ModelGateway& gateway, const TranslationTask& task,
                                     const std::string& model_id,
                                     const PipelineOptions& options = {});

// Plan stage with retries, then one code generation call. When every plan
// attempt is rejected the last plan is used and left marked unaccepted.
TranslationArtifact translate_algorithm(ModelGateway& gateway,
                                        const TranslationTask& task,
                                        const std::string& model_id,
                                        const PipelineOptions& options = {});

}  // namespace xlate
