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

#include "xstory/llm_client.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "xstory/sentences.hpp"

namespace xstory::narrative {

using json = nlohmann::json;

void LLMClientConfig::validate() const {
  if (base_url.empty()) throw std::invalid_argument("llm config: base_url is empty");
  if (model_name.empty()) throw std::invalid_argument("llm config: model name is empty");
  if (!(temperature >= 0.0)) throw std::invalid_argument("llm config: temperature must be >= 0");
  if (max_tokens <= 0) throw std::invalid_argument("llm config: max_tokens must be positive");
  if (timeout_ms <= 0) throw std::invalid_argument("llm config: timeout_ms must be positive");
  if (max_retries < 0) throw std::invalid_argument("llm config: max_retries must be >= 0");
  if (backoff_initial_ms < 0) throw std::invalid_argument("llm config: backoff_initial_ms must be >= 0");
  if (max_concurrency < 1) throw std::invalid_argument("llm config: max_concurrency must be >= 1");
}

std::string_view to_string(EndpointError::Kind kind) {
  switch (kind) {
    case EndpointError::Kind::kTransport: return "transport failure";
    case EndpointError::Kind::kHttpStatus: return "non-success status";
    case EndpointError::Kind::kEmptyCompletion: return "empty completion";
    case EndpointError::Kind::kTimeout: return "timeout";
  }
  return "unknown";
}

namespace {

std::string endpoint_message(EndpointError::Kind kind, int attempts, int status, const std::string& detail) {
  std::string msg = "chat endpoint " + std::string(to_string(kind));
  if (kind == EndpointError::Kind::kHttpStatus) msg += " " + std::to_string(status);
  msg += " after " + std::to_string(attempts) + (attempts == 1 ? " attempt" : " attempts");
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

EndpointError::EndpointError(Kind kind, int attempts, int http_status, const std::string& detail)
    : std::runtime_error(endpoint_message(kind, attempts, http_status, detail)),
      kind_(kind),
      attempts_(attempts),
      http_status_(http_status) {}

std::string encode_chat_request(const ChatRequest& request) {
  json body;
  body["model"] = request.model;
  body["messages"] = json::array({{{"role", "user"}, {"content", request.user_message}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  return body.dump();
}

std::string decode_chat_content(const std::string& response_body) {
  const json doc = json::parse(response_body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) return {};
  auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) return {};
  const json& first = choices->front();
  if (auto message = first.find("message"); message != first.end() && message->is_object()) {
    if (auto content = message->find("content"); content != message->end() && content->is_string()) {
      return content->get<std::string>();
    }
  }
  // Legacy completion shape.
  if (auto text = first.find("text"); text != first.end() && text->is_string()) return text->get<std::string>();
  return {};
}

HttpChatBackend::HttpChatBackend(LLMClientConfig config) : config_(std::move(config)) {}

AttemptResult HttpChatBackend::send(const ChatRequest& request) {
  std::string base = config_.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  const std::size_t scheme_end = base.find("://");
  if (scheme_end == std::string::npos) {
    return {AttemptResult::Status::kTransport, 0, {}, "base_url '" + config_.base_url + "' has no scheme"};
  }
  const std::size_t path_start = base.find('/', scheme_end + 3);
  const std::string origin = path_start == std::string::npos ? base : base.substr(0, path_start);
  const std::string prefix = path_start == std::string::npos ? "" : base.substr(path_start);

  httplib::Client client(origin);
  if (!client.is_valid()) {
    return {AttemptResult::Status::kTransport, 0, {}, "unsupported base_url '" + config_.base_url + "'"};
  }
  const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto started = std::chrono::steady_clock::now();
  auto response = client.Post(prefix + "/chat/completions", headers, encode_chat_request(request),
                              "application/json");
  if (!response) {
    const auto error = response.error();
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const bool timed_out = error == httplib::Error::ConnectionTimeout ||
                           (error == httplib::Error::Read && elapsed >= timeout * 9 / 10);
    return {timed_out ? AttemptResult::Status::kTimeout : AttemptResult::Status::kTransport, 0, {},
            httplib::to_string(error)};
  }
  if (response->status < 200 || response->status >= 300) {
    return {AttemptResult::Status::kHttpStatus, response->status, {}, response->body.substr(0, 200)};
  }
  return {AttemptResult::Status::kOk, response->status, decode_chat_content(response->body), {}};
}

std::unique_ptr<ChatBackend> make_backend(const LLMClientConfig& config) {
  if (config.base_url.rfind("mock:", 0) == 0) {
    return std::make_unique<MockChatBackend>(std::string_view(config.base_url).substr(5));
  }
  return std::make_unique<HttpChatBackend>(config);
}

Narrative generate_narrative(const RenderedPrompt& prompt, const LLMClientConfig& config,
                             ChatBackend& backend) {
  config.validate();
  const ChatRequest request{config.model_name, prompt.text, config.temperature, config.max_tokens};
  const auto started = std::chrono::steady_clock::now();
  const int max_attempts = config.max_retries + 1;
  AttemptResult last;
  int attempt = 0;
  for (attempt = 1; attempt <= max_attempts; ++attempt) {
    last = backend.send(request);
    if (last.status == AttemptResult::Status::kOk) {
      if (last.content.empty()) {
        throw EndpointError(EndpointError::Kind::kEmptyCompletion, attempt, last.http_status, "");
      }
      Narrative narrative;
      narrative.text = std::move(last.content);
      narrative.sentence_count = count_sentences(narrative.text);
      narrative.template_id = prompt.template_id;
      narrative.model_id = config.model_name;
      narrative.attempts = attempt;
      narrative.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
      return narrative;
    }
    const bool retryable = last.status != AttemptResult::Status::kHttpStatus || last.http_status == 429 ||
                           last.http_status >= 500;
    if (!retryable || attempt == max_attempts) break;
    const long long delay = std::min<long long>(
        static_cast<long long>(config.backoff_initial_ms) << std::min(attempt - 1, 16), 30000);
    std::this_thread::sleep_for(std::chrono::milliseconds(delay));
  }
  attempt = std::min(attempt, max_attempts);
  switch (last.status) {
    case AttemptResult::Status::kTimeout:
      throw EndpointError(EndpointError::Kind::kTimeout, attempt, 0, last.detail);
    case AttemptResult::Status::kHttpStatus:
      throw EndpointError(EndpointError::Kind::kHttpStatus, attempt, last.http_status, last.detail);
    default:
      throw EndpointError(EndpointError::Kind::kTransport, attempt, 0, last.detail);
  }
}

Narrative generate_narrative(const RenderedPrompt& prompt, const LLMClientConfig& config) {
  config.validate();
  auto backend = make_backend(config);
  return generate_narrative(prompt, config, *backend);
}

std::vector<Narrative> generate_narratives(std::span<const RenderedPrompt> prompts,
                                           const LLMClientConfig& config) {
  config.validate();
  std::vector<Narrative> results(prompts.size());
  std::vector<std::exception_ptr> errors(prompts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < prompts.size(); i = next++) {
      try {
        results[i] = generate_narrative(prompts[i], config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.max_concurrency),
                                                    prompts.size());
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();  // joins
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return results;
}

}  // namespace xstory::narrative
