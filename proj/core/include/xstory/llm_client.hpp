/*
 * Copyright 2026 The xstory Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xstory/templates.hpp"

namespace xstory::narrative {

inline constexpr const char* kDefaultApiKeyEnv = "XAISTORIES_API_KEY";

struct LLMClientConfig {
  std::string base_url = "mock:";
  std::string model_name = "gpt-4";
  double temperature = 0.7;
  int max_tokens = 512;
  int timeout_ms = 60000;
  int max_retries = 2;
  std::string api_key_env = kDefaultApiKeyEnv;
  int backoff_initial_ms = 500;  // doubled after every failed attempt
  int max_concurrency = 4;       // batch generation only

  // Throws std::invalid_argument on negative retries, non-positive timeout,
  // negative temperature and the like.
  void validate() const;
};

struct Narrative {
  std::string text;
  std::size_t sentence_count = 0;
  TemplateId template_id = TemplateId::kShapStories;
  std::string model_id;
  std::int64_t elapsed_ms = 0;
  int attempts = 0;
};

// One failed generate_narrative call. `attempts` counts every request sent.
class EndpointError : public std::runtime_error {
 public:
  enum class Kind { kTransport, kHttpStatus, kEmptyCompletion, kTimeout };

  EndpointError(Kind kind, int attempts, int http_status, const std::string& detail);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int attempts() const { return attempts_; }
  [[nodiscard]] int http_status() const { return http_status_; }

 private:
  Kind kind_;
  int attempts_;
  int http_status_;
};

std::string_view to_string(EndpointError::Kind kind);

// The body of a chat-completion request: one user message, no system prompt.
struct ChatRequest {
  std::string model;
  std::string user_message;
  double temperature = 0.7;
  int max_tokens = 512;
};

// Outcome of a single request attempt.
struct AttemptResult {
  enum class Status { kOk, kTransport, kTimeout, kHttpStatus };
  Status status = Status::kOk;
  int http_status = 0;
  std::string content;  // completion text when kOk
  std::string detail;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual AttemptResult send(const ChatRequest& request) = 0;
};

// JSON wire body: {"model", "messages": [{"role": "user", "content"}],
// "temperature", "max_tokens"}.
std::string encode_chat_request(const ChatRequest& request);
// First choice's message content; empty when absent.
std::string decode_chat_content(const std::string& response_body);

// POSTs to `{base_url}/chat/completions` with a bearer token read from the
// environment variable named in the config (omitted when unset).
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(LLMClientConfig config);
  AttemptResult send(const ChatRequest& request) override;

 private:
  LLMClientConfig config_;
};

// Deterministic offline backend selected by the `mock:` scheme. The reply is
// a pure function of the prompt bytes: CF prompts yield one sentence quoting
// the counterfactual label, baseline prompts one sentence without it, SHAP
// prompts eight sentences built from the table's extreme rows.
//
// Options after the scheme, comma separated: `fail=N` makes the first N
// attempts of each backend instance fail with a transport error;
// `status=CODE` makes every attempt return that HTTP status; `empty` returns
// an empty completion.
class MockChatBackend : public ChatBackend {
 public:
  explicit MockChatBackend(std::string_view options = "");
  AttemptResult send(const ChatRequest& request) override;

 private:
  int fail_remaining_ = 0;
  int forced_status_ = 0;
  bool empty_ = false;
};

std::string mock_reply(std::string_view prompt);

std::unique_ptr<ChatBackend> make_backend(const LLMClientConfig& config);

// Sends the prompt, retrying transport failures, timeouts, 429 and 5xx with
// exponential backoff up to config.max_retries extra attempts.
Narrative generate_narrative(const RenderedPrompt& prompt, const LLMClientConfig& config);
Narrative generate_narrative(const RenderedPrompt& prompt, const LLMClientConfig& config,
                             ChatBackend& backend);

// At most config.max_concurrency requests in flight; results come back in
// input order. The first failure (in input order) is rethrown after all
// requests finish.
std::vector<Narrative> generate_narratives(std::span<const RenderedPrompt> prompts,
                                           const LLMClientConfig& config);

}  // namespace xstory::narrative
