#include "xlate/gateway.hpp"

#include <chrono>
#include <iostream>
#include <thread>

#include "httplib.h"
#include "nlohmann/json.hpp"
#include "xlate/errors.hpp"
#include "xlate/util.hpp"

using nlohmann::json;

namespace xlate {

namespace {

// "avatar/python-java/t1:gpt:algorithm:2" -> "algorithm"
std::string stage_of_tag(const std::string& tag) {
  size_t colon = tag.rfind(':');
  if (colon == std::string::npos) return tag;
  std::string last = tag.substr(colon + 1);
  bool numeric = !last.empty() &&
                 last.find_first_not_of("0123456789") == std::string::npos;
  if (!numeric) return last;
  size_t prev = tag.rfind(':', colon - 1);
  return prev == std::string::npos ? last : tag.substr(prev + 1, colon - prev - 1);
}

bool retryable_status(int status) {
  return status == 408 || status == 429 || (status >= 500 && status < 600);
}

}  // namespace

// ---------------------------------------------------------------- mock

std::unique_ptr<MockProvider> MockProvider::from_file(const std::filesystem::path& script) {
  return from_json_text(read_file(script));
}

std::unique_ptr<MockProvider> MockProvider::from_json_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("mock script is not valid JSON: ") + e.what());
  }
  auto provider = std::make_unique<MockProvider>();
  if (doc.contains("responses")) {
    for (auto& [tag, entries] : doc["responses"].items()) {
      std::vector<Entry>& queue = provider->by_tag_[tag];
      for (auto& item : entries) {
        Entry e;
        if (item.is_string()) {
          e.text = item.get<std::string>();
        } else if (item.is_object()) {
          e.text = item.value("text", "");
          e.status = item.value("status", 0);
          e.latency_ms = item.value("latency_ms", 0);
        } else {
          throw ConfigError("mock script: entries must be strings or objects");
        }
        queue.push_back(std::move(e));
      }
      if (queue.empty()) {
        throw ConfigError("mock script: empty response list for tag '" + tag + "'");
      }
    }
  }
  if (doc.contains("stage_defaults")) {
    for (auto& [stage, text] : doc["stage_defaults"].items()) {
      provider->stage_defaults_[stage] = text.get<std::string>();
    }
  }
  return provider;
}

ProviderReply MockProvider::attempt(const PromptRequest& request) {
  std::lock_guard lock(mu_);
  ProviderReply reply;
  auto it = by_tag_.find(request.request_tag);
  if (it != by_tag_.end()) {
    size_t& cur = cursor_[request.request_tag];
    const Entry& e = it->second[std::min(cur, it->second.size() - 1)];
    ++cur;
    if (e.status != 0) {
      reply.ok = false;
      reply.http_status = e.status;
      reply.retryable = retryable_status(e.status);
      reply.text = "mock scripted status " + std::to_string(e.status);
      return reply;
    }
    reply.ok = true;
    reply.text = e.text;
    return reply;
  }
  auto stage_it = stage_defaults_.find(stage_of_tag(request.request_tag));
  if (stage_it != stage_defaults_.end()) {
    reply.ok = true;
    reply.text = stage_it->second;
    return reply;
  }
  reply.ok = false;
  reply.retryable = false;
  reply.text = "mock script has no response for tag '" + request.request_tag + "'";
  return reply;
}

// ---------------------------------------------------------------- http

HttpProvider::HttpProvider(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {}

ProviderReply HttpProvider::attempt(const PromptRequest& request) {
  // Split "<scheme>://<host>[:port]<path-prefix>".
  std::string url = base_url_;
  std::string prefix;
  size_t scheme = url.find("://");
  if (scheme != std::string::npos) {
    size_t slash = url.find('/', scheme + 3);
    if (slash != std::string::npos) {
      prefix = url.substr(slash);
      url = url.substr(0, slash);
    }
  }
  if (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  json body = {
      {"model", request.model_id},
      {"messages", json::array({json{{"role", "user"}, {"content", request.prompt_text}}})},
      {"temperature", request.decoding.temperature},
      {"max_tokens", request.decoding.max_output_tokens},
  };
  if (request.decoding.seed) body["seed"] = *request.decoding.seed;

  httplib::Client client(url);
  client.set_connection_timeout(30);
  client.set_read_timeout(600);
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  auto res = client.Post(prefix + "/chat/completions", headers, body.dump(),
                         "application/json");

  ProviderReply reply;
  if (!res) {
    reply.retryable = true;
    reply.text = "transport error: " + httplib::to_string(res.error());
    return reply;
  }
  reply.http_status = res->status;
  if (res->status != 200) {
    reply.retryable = retryable_status(res->status);
    reply.text = "HTTP " + std::to_string(res->status) + ": " + res->body;
    return reply;
  }
  try {
    json doc = json::parse(res->body);
    reply.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    reply.ok = true;
  } catch (const std::exception& e) {
    reply.retryable = false;
    reply.text = std::string("malformed completion payload: ") + e.what();
  }
  return reply;
}

// ---------------------------------------------------------------- transcript

std::string TranscriptEntry::to_jsonl() const {
  json doc = {
      {"request_tag", request_tag},
      {"model_id", model_id},
      {"prompt_text", prompt_text},
      {"raw_text", raw_text},
      {"decoding",
       {{"temperature", decoding.temperature},
        {"max_output_tokens", decoding.max_output_tokens}}},
      {"attempt_count", attempt_count},
      {"latency_ms", latency_ms},
      {"requested_at_ms", requested_at_ms},
      {"responded_at_ms", responded_at_ms},
      {"ok", ok},
  };
  if (decoding.seed) doc["decoding"]["seed"] = *decoding.seed;
  if (!ok) doc["error"] = error;
  return doc.dump();
}

TranscriptEntry TranscriptEntry::from_jsonl(const std::string& line) {
  json doc = json::parse(line);
  TranscriptEntry e;
  e.request_tag = doc.at("request_tag").get<std::string>();
  e.model_id = doc.value("model_id", "");
  e.prompt_text = doc.value("prompt_text", "");
  e.raw_text = doc.value("raw_text", "");
  if (doc.contains("decoding")) {
    const json& d = doc["decoding"];
    e.decoding.temperature = d.value("temperature", 0.0);
    e.decoding.max_output_tokens = d.value("max_output_tokens", 0);
    if (d.contains("seed")) e.decoding.seed = d["seed"].get<long>();
  }
  e.attempt_count = doc.value("attempt_count", 1);
  e.latency_ms = doc.value("latency_ms", 0L);
  e.requested_at_ms = doc.value("requested_at_ms", std::int64_t{0});
  e.responded_at_ms = doc.value("responded_at_ms", std::int64_t{0});
  e.ok = doc.value("ok", true);
  e.error = doc.value("error", "");
  return e;
}

// ---------------------------------------------------------------- gateway

ModelGateway::ModelGateway(std::unique_ptr<Provider> provider,
                           std::filesystem::path transcript_path, GatewayPolicy policy)
    : provider_(std::move(provider)),
      transcript_path_(std::move(transcript_path)),
      policy_(policy) {
  if (!provider_) throw ConfigError("gateway needs a provider");
  std::error_code ec;
  if (std::filesystem::exists(transcript_path_, ec)) {
    for (const std::string& line : split_lines(read_file(transcript_path_))) {
      if (trim(line).empty()) continue;
      try {
        TranscriptEntry e = TranscriptEntry::from_jsonl(line);
        if (!e.ok) continue;  // failed requests are retried on resume
        ModelResponse r;
        r.raw_text = e.raw_text;
        r.latency_ms = e.latency_ms;
        r.attempt_count = e.attempt_count;
        index_[e.request_tag] = std::move(r);
      } catch (const std::exception&) {
        // A torn trailing line from an interrupted run is not fatal.
      }
    }
  }
}

bool ModelGateway::has_transcript(const std::string& request_tag) const {
  std::lock_guard lock(mu_);
  return index_.count(request_tag) > 0;
}

long ModelGateway::provider_calls() const {
  std::lock_guard lock(mu_);
  return provider_calls_;
}

void ModelGateway::write_entry(const TranscriptEntry& entry) {
  append_line(transcript_path_, entry.to_jsonl());
}

ModelResponse ModelGateway::complete(const PromptRequest& request) {
  if (trim(request.prompt_text).empty()) {
    throw ConfigError("refusing to send an empty prompt (tag '" +
                      request.request_tag + "')");
  }
  {
    std::unique_lock lock(mu_);
    auto it = index_.find(request.request_tag);
    if (it != index_.end()) return it->second;  // replay; provider untouched
    slot_free_.wait(lock, [&] { return in_flight_ < policy_.max_in_flight; });
    ++in_flight_;
    ++provider_calls_;
  }
  struct SlotGuard {
    ModelGateway* gw;
    bool armed = true;
    ~SlotGuard() {
      if (!armed) return;
      std::unique_lock lock(gw->mu_);
      --gw->in_flight_;
      gw->slot_free_.notify_one();
    }
  } slot_guard{this};

  TranscriptEntry entry;
  entry.request_tag = request.request_tag;
  entry.model_id = request.model_id;
  entry.prompt_text = request.prompt_text;
  entry.decoding = request.decoding;
  entry.requested_at_ms = now_ms();

  ProviderReply reply;
  int attempts = 0;
  long backoff = policy_.backoff_initial_ms;
  auto started = std::chrono::steady_clock::now();
  while (true) {
    ++attempts;
    reply = provider_->attempt(request);
    if (reply.ok || !reply.retryable || attempts >= policy_.max_attempts) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
    backoff = static_cast<long>(static_cast<double>(backoff) * policy_.backoff_factor);
  }
  auto ended = std::chrono::steady_clock::now();

  entry.attempt_count = attempts;
  entry.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(ended - started).count();
  entry.responded_at_ms = now_ms();
  entry.ok = reply.ok;
  if (reply.ok) {
    entry.raw_text = reply.text;
  } else {
    entry.error = reply.text;
  }

  ModelResponse response;
  response.raw_text = entry.raw_text;
  response.latency_ms = entry.latency_ms;
  response.attempt_count = attempts;

  {
    std::unique_lock lock(mu_);
    write_entry(entry);  // on disk before complete() returns
    if (reply.ok) index_[request.request_tag] = response;
    --in_flight_;
    slot_free_.notify_one();
    slot_guard.armed = false;
  }
  if (!reply.ok) {
    throw GatewayError("request '" + request.request_tag + "' failed after " +
                       std::to_string(attempts) + " attempt(s): " + reply.text);
  }
  return response;
}

ModelResponse replay_transcript(const std::filesystem::path& log,
                                const std::string& request_tag, std::ostream* warn) {
  std::error_code ec;
  if (!std::filesystem::exists(log, ec)) {
    throw NotFoundError("transcript not found: " + log.string());
  }
  std::optional<ModelResponse> found;
  int hits = 0;
  for (const std::string& line : split_lines(read_file(log))) {
    if (trim(line).empty()) continue;
    TranscriptEntry e = TranscriptEntry::from_jsonl(line);
    if (e.request_tag != request_tag || !e.ok) continue;
    ++hits;
    ModelResponse r;
    r.raw_text = e.raw_text;
    r.latency_ms = e.latency_ms;
    r.attempt_count = e.attempt_count;
    found = std::move(r);  // latest entry wins
  }
  if (!found) {
    throw NotFoundError("no transcript entry for tag '" + request_tag + "'");
  }
  if (hits > 1 && warn) {
    *warn << "warning: tag '" << request_tag << "' appears " << hits
          << " times; using the latest entry\n";
  }
  return *found;
}

}  // namespace xlate
