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

#pragma once

#include <string>

#include "cross/extract/llm_client.hpp"

namespace cross::extract {

/// Endpoint settings for an OpenAI-compatible chat-completions service.
struct EndpointConfig {
  std::string base_url = "https://api.deepseek.com";
  std::string api_key_env = "CROSS_LLM_API_KEY";  // name of the variable, never the key
  std::string model = "deepseek-chat";
  double timeout_s = 60.0;
  double temperature = 0.0;
};

/// POSTs prompts to `{base_url}/chat/completions` and reads back the first
/// choice plus token usage. When the service omits usage, tokens are estimated
/// by whitespace splitting.
class HttpLlmTransport final : public LlmTransport {
 public:
  explicit HttpLlmTransport(EndpointConfig config);

  LlmReply send(const std::string& prompt) override;

 private:
  EndpointConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::string api_key_;
};

}  // namespace cross::extract
