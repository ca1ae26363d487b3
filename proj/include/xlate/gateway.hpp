// Provider-agnostic chat-completion access with deterministic decoding
// defaults, retries with backoff, a bounded in-flight pool, and append-only
// JSONL transcripts. Requests whose tag already has a transcript entry are
// replayed from disk and never reach the provider.
#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace xlate {

struct DecodingParams {
  double temperature = 0.0;
  std::optional<long> seed = 20240601;  // fixed when the endpoint accepts one
  int max_output_tokens = 8192;
};

struct PromptRequest {
  std::string model_id;
  std::string prompt_text;
  DecodingParams decoding;
  std::string request_tag;  // task id + stage; unique per logical call
};

struct ModelResponse {
  std::string raw_text;
  long latency_ms = 0;
  int attempt_count = 1;
};

// One attempt outcome from a provider backend.
struct ProviderReply {
  bool ok = false;
  bool retryable = false;  // transport-level failure worth retrying
  int http_status = 0;     // 0 when not HTTP
  std::string text;        // response text or error detail
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual ProviderReply attempt(const PromptRequest& request) = 0;
  virtual std::string describe() const = 0;
};

// Scripted provider for tests and offline runs. Script JSON:
//   {
//     "responses":      { "<request_tag>": ["text", {"status": 429}, ...] },
//     "stage_defaults": { "direct": "text", "algorithm": "...", "codegen": "..." }
//   }
// Per-tag entries are consumed in order (last one repeats); stage defaults
// key off the suffix after the final ':' in the tag, stripped of any attempt
// number, and are pure functions of the request.
class MockProvider : public Provider {
 public:
  static std::unique_ptr<MockProvider> from_file(const std::filesystem::path& script);
  static std::unique_ptr<MockProvider> from_json_text(const std::string& json_text);

  ProviderReply attempt(const PromptRequest& request) override;
  std::string describe() const override { return "mock"; }

 private:
  struct Entry {
    std::string text;
    int status = 0;  // nonzero simulates an HTTP failure with that status
    long latency_ms = 0;
  };
  std::mutex mu_;
  std::map<std::string, std::vector<Entry>> by_tag_;
  std::map<std::string, size_t> cursor_;
  std::map<std::string, std::string> stage_defaults_;
};

// OpenRouter-compatible chat-completions endpoint.
class HttpProvider : public Provider {
 public:
  HttpProvider(std::string base_url, std::string api_key);
  ProviderReply attempt(const PromptRequest& request) override;
  std::string describe() const override { return "http:" + base_url_; }

 private:
  std::string base_url_;
  std::string api_key_;
};

struct GatewayPolicy {
  int max_attempts = 3;        // total tries per request
  int backoff_initial_ms = 500;
  double backoff_factor = 2.0;
  int max_in_flight = 4;
};

struct TranscriptEntry {
  std::string request_tag;
  std::string model_id;
  std::string prompt_text;
  std::string raw_text;
  DecodingParams decoding;
  int attempt_count = 1;
  long latency_ms = 0;
  std::int64_t requested_at_ms = 0;
  std::int64_t responded_at_ms = 0;
  bool ok = true;
  std::string error;

  std::string to_jsonl() const;
  static TranscriptEntry from_jsonl(const std::string& line);
};

class ModelGateway {
 public:
  // Loads any existing transcript at `transcript_path` so completed tags
  // replay without touching the provider.
  ModelGateway(std::unique_ptr<Provider> provider,
               std::filesystem::path transcript_path, GatewayPolicy policy = {});

  // Returns the provider text verbatim. The transcript entry is on disk
  // before this returns. Throws GatewayError once the attempt budget is
  // spent; the failure is also recorded in the transcript.
  ModelResponse complete(const PromptRequest& request);

  bool has_transcript(const std::string& request_tag) const;
  const GatewayPolicy& policy() const { return policy_; }
  // Number of complete() calls that reached the provider (not replays).
  long provider_calls() const;

 private:
  void write_entry(const TranscriptEntry& entry);

  std::unique_ptr<Provider> provider_;
  std::filesystem::path transcript_path_;
  GatewayPolicy policy_;
  mutable std::mutex mu_;           // guards index_ and the transcript file
  std::map<std::string, ModelResponse> index_;  // successful tags only
  long provider_calls_ = 0;
  int in_flight_ = 0;
  std::condition_variable slot_free_;
};

// Reads the stored response for `request_tag` from a transcript log. The
// latest successful entry wins; duplicates emit a warning to `warn`.
ModelResponse replay_transcript(const std::filesystem::path& log,
                                const std::string& request_tag,
                                std::ostream* warn = nullptr);

}  // namespace xlate
