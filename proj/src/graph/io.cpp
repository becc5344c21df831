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

#include "cross/graph/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/common/text.hpp"

namespace cross::graph {
namespace {

bool skippable(std::string_view line) {
  auto first = line.find_first_not_of(" \r");
  return first == std::string_view::npos || line[first] == '#';
}

double parse_time(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(line_no, "invalid timestamp '" + field + "'");
  }
  if (!std::isfinite(value) || value < 0.0) {
    throw ParseError(line_no, "timestamp must be finite and non-negative, got '" + field + "'");
  }
  return value;
}

std::size_t parse_index(const std::string& field, std::size_t line_no) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(line_no, "invalid index '" + field + "'");
  }
  return value;
}

struct RawEdge {
  std::string src;
  std::string dst;
  double time;
  std::string text;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::vector<std::string> split_record(std::string_view line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (true) {
    std::string field;
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        field.push_back(line[i++]);
      }
      if (!closed) throw ParseError(line_no, "unterminated quoted field");
      if (i < line.size() && line[i] != ',') {
        throw ParseError(line_no, "unexpected character after quoted field");
      }
    } else {
      auto end = line.find(',', i);
      if (end == std::string_view::npos) end = line.size();
      field.assign(line.substr(i, end - i));
      if (field.find('"') != std::string::npos) {
        throw ParseError(line_no, "stray quote in unquoted field");
      }
      i = end;
    }
    fields.push_back(std::move(field));
    if (i >= line.size()) break;
    ++i;  // skip ','
  }
  return fields;
}

std::string quote_field(std::string_view field) {
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

GraphView ingest(std::istream& edge_records, std::istream& node_texts) {
  std::map<std::string, std::string> texts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(node_texts, line)) {
    ++line_no;
    if (skippable(line)) continue;
    auto fields = split_record(line, line_no);
    if (fields.size() != 2) {
      throw ParseError(line_no, "node record needs 2 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(line_no, "empty node id");
    if (!texts.emplace(fields[0], fields[1]).second) {
      throw ParseError(line_no, "duplicate node text entry for '" + fields[0] + "'");
    }
  }

  std::vector<RawEdge> raw;
  line_no = 0;
  while (std::getline(edge_records, line)) {
    ++line_no;
    if (skippable(line)) continue;
    auto fields = split_record(line, line_no);
    if (fields.size() != 4) {
      throw ParseError(line_no, "edge record needs 4 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError(line_no, "empty node id");
    raw.push_back({fields[0], fields[1], parse_time(fields[2], line_no), fields[3]});
    texts.try_emplace(raw.back().src);
    texts.try_emplace(raw.back().dst);
  }

  std::vector<std::string> ids;
  std::vector<std::string> node_texts_sorted;
  ids.reserve(texts.size());
  for (auto& [id, text] : texts) {
    ids.push_back(id);
    node_texts_sorted.push_back(std::move(text));
  }
  auto table = std::make_shared<const NodeTable>(std::move(ids), std::move(node_texts_sorted));

  std::vector<TemporalInteraction> interactions;
  interactions.reserve(raw.size());
  for (auto& e : raw) {
    interactions.push_back(
        {table->index_of(e.src), table->index_of(e.dst), e.time, std::move(e.text)});
  }
  return GraphView(std::move(table), std::move(interactions));
}

GraphView ingest_files(const std::filesystem::path& edge_file,
                       const std::filesystem::path& node_file) {
  auto edges = open_input(edge_file);
  auto nodes = open_input(node_file);
  return ingest(edges, nodes);
}

void save_view(const GraphView& view, const std::filesystem::path& dir,
               std::string_view config_hash) {
  std::filesystem::create_directories(dir);
  const auto& nodes = view.nodes();
  {
    std::ofstream index(dir / "index.csv");
    std::ofstream table(dir / "nodes.csv");
    for (NodeIndex u = 0; u < nodes.size(); ++u) {
      index << u << ',' << quote_field(nodes.id(u)) << '\n';
      table << quote_field(nodes.id(u)) << ',' << quote_field(nodes.text(u)) << '\n';
    }
  }
  {
    std::ofstream log(dir / "edges.csv");
    for (const auto& e : view.interactions()) {
      log << e.src << ',' << e.dst << ',' << format_time(e.time) << ','
          << quote_field(e.edge_text) << '\n';
    }
  }
  nlohmann::json meta = {
      {"format_version", 1},
      {"num_nodes", view.num_nodes()},
      {"num_interactions", view.num_interactions()},
      {"content_hash", to_hex(view.content_hash())},
      {"config_hash", std::string(config_hash)},
      {"split", std::string(to_string(view.split()))},
  };
  std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';
}

ViewMetadata load_view_metadata(const std::filesystem::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) {
    throw DataError("'" + dir.string() +
                    "' is not a view directory (missing meta.json); run `cross ingest` first");
  }
  nlohmann::json meta;
  try {
    in >> meta;
    return ViewMetadata{meta.at("num_nodes").get<std::size_t>(),
                        meta.at("num_interactions").get<std::size_t>(),
                        meta.at("content_hash").get<std::string>(),
                        meta.value("config_hash", std::string{}),
                        split_tag_from_string(meta.at("split").get<std::string>())};
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed view metadata: " + std::string(e.what()));
  }
}

GraphView load_view(const std::filesystem::path& dir) {
  const auto meta = load_view_metadata(dir);

  std::vector<std::string> ids(meta.num_nodes);
  std::vector<std::string> texts(meta.num_nodes);
  {
    auto index = open_input(dir / "index.csv");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(index, line)) {
      ++line_no;
      if (skippable(line)) continue;
      auto fields = split_record(line, line_no);
      if (fields.size() != 2) throw ParseError(line_no, "index.csv: expected 2 fields");
      auto u = parse_index(fields[0], line_no);
      if (u >= ids.size()) throw ParseError(line_no, "index.csv: index out of range");
      ids[u] = fields[1];
    }
    auto table = open_input(dir / "nodes.csv");
    std::map<std::string, std::string> by_id;
    line_no = 0;
    while (std::getline(table, line)) {
      ++line_no;
      if (skippable(line)) continue;
      auto fields = split_record(line, line_no);
      if (fields.size() != 2) throw ParseError(line_no, "nodes.csv: expected 2 fields");
      by_id[fields[0]] = fields[1];
    }
    for (std::size_t u = 0; u < ids.size(); ++u) texts[u] = by_id[ids[u]];
  }
  auto table = std::make_shared<const NodeTable>(std::move(ids), std::move(texts));

  std::vector<TemporalInteraction> interactions;
  interactions.reserve(meta.num_interactions);
  auto log = open_input(dir / "edges.csv");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(log, line)) {
    ++line_no;
    if (skippable(line)) continue;
    auto fields = split_record(line, line_no);
    if (fields.size() != 4) throw ParseError(line_no, "edges.csv: expected 4 fields");
    interactions.push_back({static_cast<NodeIndex>(parse_index(fields[0], line_no)),
                            static_cast<NodeIndex>(parse_index(fields[1], line_no)),
                            parse_time(fields[2], line_no), fields[3]});
  }
  GraphView view(std::move(table), std::move(interactions), meta.split);
  if (to_hex(view.content_hash()) != meta.content_hash) {
    throw DataError("view '" + dir.string() + "' is corrupt: content hash mismatch");
  }
  return view;
}

}  // namespace cross::graph
