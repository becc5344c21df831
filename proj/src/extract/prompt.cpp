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

#include "cross/extract/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cross/common/error.hpp"
#include "cross/common/text.hpp"

namespace cross::extract {
namespace {

constexpr std::string_view kStandardGoal =
    "You are analysing one node of a temporal interaction graph. Summarize what its "
    "neighborhood is about as of the current time, emphasizing themes that recur in "
    "the most recent interactions and how they differ from the node description. "
    "Answer with one short plain-text paragraph and no preamble.";

struct Substitution {
  std::string_view key;
  std::string_view value;
};

// Single pass so substituted values are never re-expanded.
std::string substitute(std::string_view text, std::span<const Substitution> subs) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    bool matched = false;
    if (text[pos] == '{') {
      for (const auto& s : subs) {
        if (text.substr(pos, s.key.size()) == s.key) {
          out += s.value;
          pos += s.key.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out.push_back(text[pos++]);
  }
  return out;
}

}  // namespace

PromptTemplate PromptTemplate::standard() {
  PromptTemplate t;
  t.goal = std::string(kStandardGoal);
  t.text =
      "Goal: {{goal}}\n"
      "Descriptions: {{description}}\n"
      "Current time: {{time}}\n"
      "Historical interactions:\n"
      "{{history}}\n";
  return t;
}

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open prompt template '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  PromptTemplate t = standard();
  t.text = buf.str();
  for (std::string_view key : {"{{goal}}", "{{description}}", "{{time}}", "{{history}}"}) {
    if (t.text.find(key) == std::string::npos) {
      throw DataError("prompt template '" + path.string() + "' lacks placeholder " +
                      std::string(key));
    }
  }
  return t;
}

std::string build_prompt(const graph::NodeRecord& node, double t,
                         std::span<const HistoryLine> history, const PromptTemplate& tmpl) {
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (!(history[i].time < t)) throw DataError("prompt history must precede the reasoning time");
    if (i > 0 && history[i].time < history[i - 1].time) {
      throw DataError("prompt history must be sorted by time");
    }
  }
  const std::size_t first =
      history.size() > tmpl.max_history ? history.size() - tmpl.max_history : 0;
  std::string lines;
  for (std::size_t i = first; i < history.size(); ++i) {
    if (!lines.empty()) lines.push_back('\n');
    std::string text = history[i].text;
    std::replace(text.begin(), text.end(), '\n', ' ');
    lines += "- [" + format_time(history[i].time) + "] " + text;
  }
  if (lines.empty()) lines = std::string(kEmptyHistoryMarker);

  const std::string time = format_time(t);
  const Substitution subs[] = {
      {"{{goal}}", tmpl.goal},
      {"{{description}}", node.text.empty() ? std::string_view("(none)") : node.text},
      {"{{time}}", time},
      {"{{history}}", lines},
  };
  return substitute(tmpl.text, subs);
}

std::vector<HistoryLine> textual_history(graph::NodeIndex u, double t,
                                         const graph::GraphView& view) {
  std::vector<HistoryLine> out;
  for (const auto& e : graph::historical_interactions(u, t, view)) {
    out.push_back({e.time, e.edge_text});
  }
  return out;
}

}  // namespace cross::extract
