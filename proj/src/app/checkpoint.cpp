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

#include "cross/app/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "cross/common/error.hpp"

namespace cross::app {
namespace {

using nlohmann::json;

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw DataError("checkpoint is truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

void write_matrix(std::ostream& out, const nn::Matrix& m) {
  // Row-major so the payload does not depend on Eigen's storage order.
  for (nn::Index r = 0; r < m.rows(); ++r) {
    for (nn::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
}

nn::Matrix read_matrix(std::istream& in, nn::Index rows, nn::Index cols) {
  nn::Matrix m(rows, cols);
  for (nn::Index r = 0; r < rows; ++r) {
    for (nn::Index c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw DataError("checkpoint is truncated");
      m(r, c) = v;
    }
  }
  return m;
}

struct Header {
  CheckpointInfo info;
  bool has_optimizer = false;
  std::vector<std::tuple<std::string, nn::Index, nn::Index>> shapes;
};

Header read_header(std::istream& in, const std::filesystem::path& path) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw DataError("'" + path.string() + "' is not a checkpoint");
  }
  const auto length = read_u64(in);
  if (length > (std::uint64_t{1} << 32)) throw DataError("checkpoint header is too large");
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) {
    throw DataError("checkpoint is truncated");
  }
  Header h;
  try {
    const json j = json::parse(text);
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw DataError("unsupported checkpoint version " + j.at("version").dump());
    }
    h.info.config = ExperimentConfig::from_json(j.at("config").dump());
    h.info.config_hash = j.at("config_hash").get<std::string>();
    h.info.data_hash = j.at("data_hash").get<std::string>();
    h.info.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("best_val_mrr").is_null()) h.info.best_val_mrr = j.at("best_val_mrr").get<double>();
    h.info.best_epoch = j.at("best_epoch").get<std::size_t>();
    h.info.optimizer_steps = j.at("optimizer").at("steps").get<std::uint64_t>();
    h.has_optimizer = j.at("optimizer").at("moments").get<bool>();
    for (const auto& p : j.at("parameters")) {
      h.shapes.emplace_back(p.at("name").get<std::string>(), p.at("rows").get<nn::Index>(),
                            p.at("cols").get<nn::Index>());
    }
  } catch (const json::exception& e) {
    throw DataError("malformed checkpoint header: " + std::string(e.what()));
  }
  return h;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const CheckpointInfo& info,
                     const train::Model& model, const nn::Adam* optimizer) {
  json params = json::array();
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    const auto& p = model.params[i];
    params.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
  }
  const json header = {
      {"version", kCheckpointVersion},
      {"config", json::parse(info.config.to_json())},
      {"config_hash", info.config_hash},
      {"data_hash", info.data_hash},
      {"seed", info.seed},
      {"best_val_mrr", info.best_val_mrr ? json(*info.best_val_mrr) : json(nullptr)},
      {"best_epoch", info.best_epoch},
      {"optimizer",
       {{"steps", optimizer ? optimizer->steps() : info.optimizer_steps},
        {"moments", optimizer != nullptr}}},
      {"parameters", params}};
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint '" + path.string() + "'");
  out.write(kCheckpointMagic, 8);
  write_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < model.params.size(); ++i) write_matrix(out, model.params[i].value);
  if (optimizer) {
    for (const auto& m : optimizer->first_moments()) write_matrix(out, m);
    for (const auto& v : optimizer->second_moments()) write_matrix(out, v);
  }
  if (!out) throw DataError("failed writing checkpoint '" + path.string() + "'");
}

CheckpointInfo read_checkpoint_info(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  return read_header(in, path).info;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  auto header = read_header(in, path);

  Checkpoint ck;
  ck.info = header.info;
  ck.model = std::make_unique<train::Model>(ck.info.config.encoder_config(ck.info.seed));
  auto& params = ck.model->params;
  if (params.size() != header.shapes.size()) {
    throw DataError("checkpoint holds " + std::to_string(header.shapes.size()) +
                    " parameters but the model has " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, rows, cols] = header.shapes[i];
    if (params[i].name != name || params[i].value.rows() != rows || params[i].value.cols() != cols) {
      throw DataError("checkpoint parameter '" + name + "' does not match the model");
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i].value = read_matrix(in, params[i].value.rows(), params[i].value.cols());
  }
  ck.has_optimizer = header.has_optimizer;
  if (ck.has_optimizer) {
    for (auto* moments : {&ck.first_moments, &ck.second_moments}) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        moments->push_back(read_matrix(in, params[i].value.rows(), params[i].value.cols()));
      }
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("checkpoint has trailing bytes");
  return ck;
}

}  // namespace cross::app
