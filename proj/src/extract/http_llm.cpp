/*
 * Copyright (c) 2026, The cross authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "cross/extract/http_llm.hpp"

#include <cstdlib>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cross/common/error.hpp"
#include "cross/common/text.hpp"

namespace cross::extract {

HttpLlmTransport::HttpLlmTransport(EndpointConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw UsageError("LLM base URL must include a scheme: '" + config_.base_url + "'");
  }
  const auto path_start = config_.base_url.find('/', scheme_end + 3);
  scheme_host_port_ = config_.base_url.substr(0, path_start);
  if (path_start != std::string::npos) path_prefix_ = config_.base_url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
}

LlmReply HttpLlmTransport::send(const std::string& prompt) {
  httplib::Client client(scheme_host_port_);
  const auto timeout_s = static_cast<time_t>(config_.timeout_s);
  client.set_connection_timeout(timeout_s);
  client.set_read_timeout(timeout_s);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const nlohmann::json body = {
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  auto response =
      client.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
  if (!response) {
    throw TransportError(0, "LLM request failed: " + httplib::to_string(response.error()));
  }
  if (response->status < 200 || response->status >= 300) {
    throw TransportError(response->status, "LLM endpoint returned HTTP " +
                                               std::to_string(response->status));
  }

  LlmReply reply;
  try {
    const auto parsed = nlohmann::json::parse(response->body);
    reply.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    if (parsed.contains("usage")) {
      const auto& usage = parsed["usage"];
      reply.tokens_in = usage.value("prompt_tokens", std::size_t{0});
      reply.tokens_out = usage.value("completion_tokens", std::size_t{0});
    } else {
      reply.tokens_in = whitespace_token_count(prompt);
      reply.tokens_out = whitespace_token_count(reply.text);
    }
  } catch (const nlohmann::json::exception& e) {
    // A 2xx with an unreadable body is treated like a server fault.
    throw TransportError(502, std::string("malformed LLM response: ") + e.what());
  }
  return reply;
}

}  // namespace cross::extract
