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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cross/graph/graph_view.hpp"

namespace cross::graph {

/// Splits one comma-delimited record. Fields may be double-quoted, with `""`
/// as an escaped quote. Throws ParseError tagged with `line_no`.
std::vector<std::string> split_record(std::string_view line, std::size_t line_no);

/// Quotes a field for split_record.
std::string quote_field(std::string_view field);

/// Reads an edge stream (src,dst,time,"edge text") and a node stream
/// (node_id,"node text"). Blank lines and lines starting with '#' are skipped.
/// Nodes that only appear in edges get an empty text.
GraphView ingest(std::istream& edge_records, std::istream& node_texts);

GraphView ingest_files(const std::filesystem::path& edge_file,
                       const std::filesystem::path& node_file);

struct ViewMetadata {
  std::size_t num_nodes = 0;
  std::size_t num_interactions = 0;
  std::string content_hash;
  std::string config_hash;
  SplitTag split = SplitTag::kAll;
};

/// Persists a frozen view as a directory: index.csv (dense id mapping),
/// nodes.csv (node table), edges.csv (time-sorted log), meta.json.
void save_view(const GraphView& view, const std::filesystem::path& dir,
               std::string_view config_hash = {});

GraphView load_view(const std::filesystem::path& dir);
ViewMetadata load_view_metadata(const std::filesystem::path& dir);

}  // namespace cross::graph
