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

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "cross/graph/graph_view.hpp"

namespace cross::extract {

/// One textualized interaction rendered into the prompt.
struct HistoryLine {
  double time = 0.0;
  std::string text;
};

/// Plain-text prompt with the placeholders {{goal}}, {{description}},
/// {{time}} and {{history}}.
struct PromptTemplate {
  std::string text;
  std::string goal;
  std::size_t max_history = 32;  // most recent lines kept

  static PromptTemplate standard();
  /// Loads a template file; every placeholder must appear at least once.
  static PromptTemplate from_file(const std::filesystem::path& path);
};

inline constexpr std::string_view kHistorySection = "Historical interactions:";
inline constexpr std::string_view kEmptyHistoryMarker = "(no interactions)";

/// Renders the prompt for `node` at reasoning time `t`. `history` must be
/// ascending and strictly earlier than `t`; only the last max_history lines
/// are rendered, one per line as "- [time] text".
std::string build_prompt(const graph::NodeRecord& node, double t,
                         std::span<const HistoryLine> history, const PromptTemplate& tmpl);

/// Textualized neighborhood of `u` before `t` (edge texts of H_u(t)).
std::vector<HistoryLine> textual_history(graph::NodeIndex u, double t,
                                         const graph::GraphView& view);

}  // namespace cross::extract
