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
#include <string_view>
#include <vector>

namespace cross {

/// Lower-cased alphanumeric runs of `text`; everything else separates tokens.
std::vector<std::string> word_tokens(std::string_view text);

/// Number of whitespace-separated tokens; the fallback token estimate for LLM usage.
std::size_t whitespace_token_count(std::string_view text);

/// Shortest decimal form that round-trips the double (e.g. "12", "0.5").
std::string format_time(double t);

}  // namespace cross
