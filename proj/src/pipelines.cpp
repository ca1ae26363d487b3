#include "xlate/pipelines.hpp"

#include <regex>

#include "xlate/errors.hpp"
#include "xlate/util.hpp"

namespace xlate {

namespace {

// Templates are fixed across models and datasets; substitution only fills
// the marked slots.
constexpr const char* kDirectTemplate =
    "<SOURCE_LANG> code: <SOURCE_CODE>\n"
    "\n"
    "Let's think step-by-step and translate the above <SOURCE_LANG> code into "
    "functionally equivalent <TARGET_LANG> code using the following instructions:\n"
    "Step 1: Analyze the structure and identify main components, control flow, "
    "data types, and dependencies\n"
    "Step 2: Map <SOURCE_LANG> constructs to <TARGET_LANG> equivalents and "
    "determine required libraries\n"
    "Step 3: Generate <TARGET_LANG> code preserving exact functionality, names, "
    "logic, and program structure\n"
    "Step 4: Finally, provide only the <TARGET_LANG> code without any headers, "
    "comments, explanations, or examples\n";

constexpr const char* kAlgorithmTemplate =
    "<SOURCE_LANG> code: <SOURCE_CODE>\n"
    "\n"
    "Let's think step-by-step and extract a detailed algorithm from the above "
    "<SOURCE_LANG> code using the following instructions:\n"
    "Step 1: Identify the code structure and analyze function signatures, "
    "classes, and program organization\n"
    "Step 2: Extract the core logic and trace execution flow, control "
    "structures, data transformations, and I/O operations\n"
    "Step 3: Document the algorithm components and specify data types, "
    "dependencies, and exact conditions\n"
    "Step 4: Finally, provide only the detailed algorithm without any headers, "
    "comments, explanations, or examples\n";

constexpr const char* kCodegenTemplate =
    "algorithm: <ALGORITHM>\n"
    "\n"
    "Let's think step-by-step and generate complete, executable <TARGET_LANG> "
    "code from the above algorithm using the following instructions:\n"
    "Step 1: Analyze the algorithm requirements and identify data structures, "
    "input/output specifications, and core logic components\n"
    "Step 2: Design the <TARGET_LANG> implementation and plan program "
    "structure, determine classes/functions, select appropriate data types, "
    "and language constructs\n"
    "Step 3: Generate the complete code and implement logic flow with proper "
    "syntax, add necessary imports/dependencies, handle edge cases, and ensure "
    "code compiles and executes correctly\n"
    "Step 4: Finally, provide only the <TARGET_LANG> code without any headers, "
    "comments, explanations, or examples\n";

struct FencedBlock {
  std::string tag;  // lowercased language tag, may be empty
  std::string content;
};

std::vector<FencedBlock> parse_fenced_blocks(const std::string& text) {
  std::vector<FencedBlock> blocks;
  std::vector<std::string> lines = split_lines(text);
  bool in_block = false;
  FencedBlock current;
  std::string content;
  for (const std::string& line : lines) {
    std::string_view t = trim(line);
    if (starts_with(t, "```")) {
      if (!in_block) {
        in_block = true;
        current.tag = to_lower(trim(t.substr(3)));
        content.clear();
      } else {
        current.content = content;
        blocks.push_back(current);
        in_block = false;
      }
      continue;
    }
    if (in_block) {
      content += line;
      content += '\n';
    }
  }
  if (in_block) {  // unterminated fence runs to end of text
    current.content = content;
    blocks.push_back(current);
  }
  return blocks;
}

bool tag_matches(const std::string& tag, Lang lang) {
  if (tag.empty()) return true;
  if (lang == Lang::Java) return tag == "java";
  return tag == "python" || tag == "py" || tag == "python3";
}

}  // namespace

std::string_view plan_facet_key(PlanFacet f) {
  switch (f) {
    case PlanFacet::InputHandling: return "input_handling";
    case PlanFacet::DataStructures: return "data_structures";
    case PlanFacet::NumericRules: return "numeric_rules";
    case PlanFacet::IndexBasesLoopBounds: return "index_bases_loop_bounds";
    case PlanFacet::Termination: return "termination";
    case PlanFacet::OutputFormat: return "output_format";
  }
  return "input_handling";
}

std::string render_direct_prompt(Lang source_lang, Lang target_lang,
                                 const std::string& source_code) {
  if (source_lang == target_lang) {
    throw ConfigError("direct prompt needs two distinct languages");
  }
  std::string out = kDirectTemplate;
  out = replace_all(std::move(out), "<SOURCE_LANG>", lang_name(source_lang));
  out = replace_all(std::move(out), "<TARGET_LANG>", lang_name(target_lang));
  out = replace_all(std::move(out), "<SOURCE_CODE>", source_code);
  return out;
}

std::string render_algorithm_prompt(Lang source_lang, const std::string& source_code) {
  std::string out = kAlgorithmTemplate;
  out = replace_all(std::move(out), "<SOURCE_LANG>", lang_name(source_lang));
  out = replace_all(std::move(out), "<SOURCE_CODE>", source_code);
  return out;
}

std::string render_codegen_prompt(Lang target_lang, const std::string& plan_text) {
  if (trim(plan_text).empty()) {
    throw ConfigError("code generation needs a non-empty algorithm plan");
  }
  std::string out = kCodegenTemplate;
  out = replace_all(std::move(out), "<TARGET_LANG>", lang_name(target_lang));
  out = replace_all(std::move(out), "<ALGORITHM>", plan_text);
  return out;
}

std::string extract_code(const std::string& raw_text, Lang target_lang) {
  std::vector<FencedBlock> blocks = parse_fenced_blocks(raw_text);
  const FencedBlock* best = nullptr;
  for (const FencedBlock& b : blocks) {
    if (!tag_matches(b.tag, target_lang)) continue;
    if (!best || b.content.size() > best->content.size()) best = &b;
  }
  std::string candidate =
      best ? std::string(trim(best->content)) : std::string(trim(raw_text));
  if (candidate.empty()) {
    throw EmptyOutputError("model output contains no code");
  }
  return candidate;
}

AlgorithmPlan validate_algorithm_plan(const std::string& plan_text) {
  return PlanRules::builtin().validate(plan_text);
}

PlanRules PlanRules::parse(const std::string& text) {
  PlanRules rules;
  int lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view rest = trim(line.substr(1));
      if (starts_with(rest, "version:")) {
        rules.version_ = std::string(trim(rest.substr(8)));
      }
      continue;
    }
    size_t tab = raw.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError("plan rules line " + std::to_string(lineno) +
                        ": expected '<facet>\\t<pattern>'");
    }
    std::string facet_key(trim(raw.substr(0, tab)));
    std::string pattern = raw.substr(tab + 1);
    std::optional<PlanFacet> facet;
    for (PlanFacet f : kPlanFacets) {
      if (plan_facet_key(f) == facet_key) facet = f;
    }
    if (!facet) {
      throw ConfigError("plan rules line " + std::to_string(lineno) +
                        ": unknown facet '" + facet_key + "'");
    }
    try {
      std::regex probe(pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw ConfigError("plan rules line " + std::to_string(lineno) +
                        ": bad pattern: " + e.what());
    }
    rules.patterns_.emplace_back(*facet, std::move(pattern));
  }
  for (PlanFacet f : kPlanFacets) {
    bool covered = false;
    for (auto& [facet, _] : rules.patterns_) covered |= facet == f;
    if (!covered) {
      throw ConfigError(std::string("plan rules missing facet '") +
                        std::string(plan_facet_key(f)) + "'");
    }
  }
  return rules;
}

PlanRules PlanRules::builtin() {
  static const PlanRules rules = parse(builtin_plan_rules_text());
  return rules;
}

AlgorithmPlan PlanRules::validate(const std::string& plan_text) const {
  AlgorithmPlan plan;
  plan.plan_text = plan_text;
  std::string lowered = to_lower(plan_text);
  for (PlanFacet f : kPlanFacets) plan.checklist[f] = false;
  for (const auto& [facet, pattern] : patterns_) {
    if (plan.checklist[facet]) continue;
    std::regex re(pattern, std::regex::ECMAScript);
    if (std::regex_search(lowered, re)) plan.checklist[facet] = true;
  }
  plan.accepted = true;
  for (PlanFacet f : kPlanFacets) plan.accepted &= plan.checklist[f];
  return plan;
}

std::string direct_tag(const TranslationTask& task, const std::string& model_id) {
  return task.dataset_id + "/" + direction_key(task.direction()) + "/" +
         task.task_id + ":" + model_id + ":direct";
}

std::string algorithm_tag(const TranslationTask& task, const std::string& model_id,
                          int attempt) {
  return task.dataset_id + "/" + direction_key(task.direction()) + "/" +
         task.task_id + ":" + model_id + ":algorithm:" + std::to_string(attempt);
}

std::string codegen_tag(const TranslationTask& task, const std::string& model_id) {
  return task.dataset_id + "/" + direction_key(task.direction()) + "/" +
         task.task_id + ":" + model_id + ":codegen";
}

namespace {

TranslationArtifact make_artifact(const TranslationTask& task,
                                  const std::string& model_id, Approach approach) {
  TranslationArtifact artifact;
  artifact.task_id = task.task_id;
  artifact.dataset_id = task.dataset_id;
  artifact.model_id = model_id;
  artifact.approach = approach;
  artifact.direction = task.direction();
  return artifact;
}

void fill_code(TranslationArtifact& artifact, const std::string& raw_text, Lang target) {
  try {
    artifact.generated_code = extract_code(raw_text, target);
  } catch (const EmptyOutputError& e) {
    artifact.generated_code.clear();
    artifact.error = e.what();
  }
}

}  // namespace

TranslationArtifact translate_direct(ModelGateway& gateway, const TranslationTask& task,
                                     const std::string& model_id,
                                     const PipelineOptions& options) {
  TranslationArtifact artifact = make_artifact(task, model_id, Approach::Direct);
  PromptRequest request;
  request.model_id = model_id;
  request.decoding = options.decoding;
  request.prompt_text =
      render_direct_prompt(task.source_lang, task.target_lang, task.source_code);
  request.request_tag = direct_tag(task, model_id);

  ModelResponse response;
  try {
    response = gateway.complete(request);
  } catch (const GatewayError& e) {
    throw GatewayError("task " + task.task_id + ": " + e.what());
  }
  artifact.transcript_tags.push_back(request.request_tag);
  artifact.call_count = 1;
  fill_code(artifact, response.raw_text, task.target_lang);
  return artifact;
}

TranslationArtifact translate_algorithm(ModelGateway& gateway,
                                        const TranslationTask& task,
                                        const std::string& model_id,
                                        const PipelineOptions& options) {
  TranslationArtifact artifact = make_artifact(task, model_id, Approach::AlgorithmBased);
  const PlanRules rules = options.plan_rules ? *options.plan_rules : PlanRules::builtin();

  std::string plan_prompt = render_algorithm_prompt(task.source_lang, task.source_code);
  AlgorithmPlan plan;
  int attempts = 0;
  const int max_plan_attempts = 1 + std::max(0, options.plan_retry_budget);
  while (attempts < max_plan_attempts) {
    ++attempts;
    PromptRequest request;
    request.model_id = model_id;
    request.decoding = options.decoding;
    request.prompt_text = plan_prompt;
    request.request_tag = algorithm_tag(task, model_id, attempts);
    ModelResponse response;
    try {
      response = gateway.complete(request);
    } catch (const GatewayError& e) {
      throw GatewayError("task " + task.task_id + ": " + e.what());
    }
    artifact.transcript_tags.push_back(request.request_tag);
    plan = rules.validate(response.raw_text);
    plan.attempt_index = attempts;
    if (plan.accepted) break;
  }
  // A still-rejected plan is carried forward, flagged, so the combination
  // keeps its paired sample.

  PromptRequest request;
  request.model_id = model_id;
  request.decoding = options.decoding;
  request.prompt_text = render_codegen_prompt(
      task.target_lang, plan.plan_text.empty() ? "(no plan produced)" : plan.plan_text);
  request.request_tag = codegen_tag(task, model_id);
  ModelResponse response;
  try {
    response = gateway.complete(request);
  } catch (const GatewayError& e) {
    throw GatewayError("task " + task.task_id + ": " + e.what());
  }
  artifact.transcript_tags.push_back(request.request_tag);
  artifact.call_count = attempts + 1;
  artifact.plan = std::move(plan);
  fill_code(artifact, response.raw_text, task.target_lang);
  return artifact;
}

}  // namespace xlate
