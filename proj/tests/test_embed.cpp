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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/embed/features.hpp"
#include "cross/embed/text_embedder.hpp"
#include "cross/embed/time_encoder.hpp"
#include "cross/graph/io.hpp"
#include "gradcheck.hpp"

namespace cross::embed {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("cross_embed_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(HashEmbedder, UnitNormAndDeterministic) {
  HashEmbedder a(64, 3);
  HashEmbedder b(64, 3);
  for (const char* text : {"chess club", "Tea, tea and more TEA", "x"}) {
    const auto v = a.embed(text);
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    EXPECT_EQ(v, b.embed(text));
  }
}

TEST(HashEmbedder, EmptyTextIsReservedVector) {
  HashEmbedder e(16);
  EXPECT_EQ(e.embed(""), reserved_empty(16));
  EXPECT_EQ(e.embed("  !? "), reserved_empty(16));
  EXPECT_EQ(reserved_empty(4), (Vector(4) << 1, 0, 0, 0).finished());
}

TEST(HashEmbedder, CaseAndPunctuationInsensitive) {
  HashEmbedder e(32);
  EXPECT_EQ(e.embed("Chess, Club!"), e.embed("chess club"));
}

TEST(HashEmbedder, SharedWordsCorrelate) {
  HashEmbedder e(256);
  const double shared = e.embed("alpha beta gamma").dot(e.embed("alpha beta delta"));
  const double disjoint = e.embed("alpha beta gamma").dot(e.embed("omega psi chi"));
  EXPECT_GT(shared, 0.4);
  EXPECT_LT(std::abs(disjoint), shared);
}

TEST(HashEmbedder, SeedChangesVectors) {
  EXPECT_NE(HashEmbedder(32, 0).embed("word"), HashEmbedder(32, 1).embed("word"));
}

TEST(HashEmbedder, RejectsZeroDim) { EXPECT_THROW(HashEmbedder(0), UsageError); }

TEST(Precomputed, LooksUpByTextHash) {
  std::unordered_map<std::string, Vector> table;
  table[text_hash("hello")] = Vector::Ones(3);
  PrecomputedEmbedder e(3, table);
  EXPECT_EQ(e.embed("hello"), Vector::Ones(3));
  EXPECT_EQ(e.embed(""), reserved_empty(3));
  EXPECT_THROW((void)e.embed("missing"), DataError);
}

TEST(Precomputed, FileRoundTrip) {
  const auto dir = temp_dir("roundtrip");
  std::unordered_map<std::string, Vector> table;
  table[text_hash("a")] = (Vector(2) << 0.25, -1.5).finished();
  table[text_hash("b")] = (Vector(2) << 1e-17, 3.0).finished();
  write_embedding_file(dir / "e.txt", table);
  auto loaded = PrecomputedEmbedder::load(dir / "e.txt");
  EXPECT_EQ(loaded.dim(), 2);
  EXPECT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded.embed("a"), table[text_hash("a")]);
  EXPECT_EQ(loaded.embed("b"), table[text_hash("b")]);
}

TEST(Precomputed, BadFilesAreParseErrors) {
  const auto dir = temp_dir("bad");
  std::ofstream(dir / "ragged.txt") << "aa 1 2\nbb 1\n";
  try {
    (void)PrecomputedEmbedder::load(dir / "ragged.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::ofstream(dir / "nan.txt") << "aa 1 x\n";
  EXPECT_THROW((void)PrecomputedEmbedder::load(dir / "nan.txt"), ParseError);
  EXPECT_THROW((void)PrecomputedEmbedder::load(dir / "absent.txt"), DataError);
}

TEST(Caching, CountsMissesAndPreloads) {
  auto inner = std::make_shared<HashEmbedder>(8);
  CachingEmbedder cache(inner);
  (void)cache.embed("a");
  (void)cache.embed("a");
  (void)cache.embed("b");
  EXPECT_EQ(cache.misses(), 2u);
  EXPECT_EQ(cache.cache_size(), 2u);

  const auto dir = temp_dir("cache");
  cache.save(dir / "c.txt");
  CachingEmbedder fresh(inner);
  fresh.preload(PrecomputedEmbedder::load(dir / "c.txt"));
  EXPECT_EQ(fresh.embed("a"), inner->embed("a"));
  EXPECT_EQ(fresh.misses(), 0u);

  CachingEmbedder wide(std::make_shared<HashEmbedder>(4));
  EXPECT_THROW(wide.preload(PrecomputedEmbedder::load(dir / "c.txt")), DataError);
}

class TimeEncoderTest : public ::testing::Test {
 protected:
  nn::ParameterSet params;
  TimeEncoder enc{params, "time", 16};
};

TEST_F(TimeEncoderTest, ZeroDeltaIsOnes) {
  EXPECT_EQ(enc.encode(0.0), Eigen::VectorXd::Ones(16));
}

TEST_F(TimeEncoderTest, FrequenciesGeometricFromSmallToOne) {
  EXPECT_NEAR(enc.omega().value(0, 0), 1e-4, 1e-18);
  EXPECT_NEAR(enc.omega().value(0, 15), 1.0, 1e-15);
  for (int i = 1; i < 16; ++i) {
    EXPECT_NEAR(enc.omega().value(0, i) / enc.omega().value(0, i - 1),
                std::pow(1e4, 1.0 / 15.0), 1e-9);
  }
}

TEST_F(TimeEncoderTest, RangeAndAgreement) {
  const std::vector<double> deltas{0.0, 0.5, 3.0, 1e3, 1e7};
  nn::ParameterScope scope;
  const auto rows = enc(scope, deltas).value();
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const Eigen::VectorXd v = enc.encode(deltas[i]);
    EXPECT_LE(v.cwiseAbs().maxCoeff(), 1.0);
    EXPECT_LT((rows.row(static_cast<Eigen::Index>(i)).transpose() - v).norm(), 1e-12);
  }
}

TEST_F(TimeEncoderTest, NegativeDeltaRejected) {
  nn::ParameterScope scope;
  const std::vector<double> bad{1.0, -0.5};
  EXPECT_THROW(enc(scope, bad), DataError);
  EXPECT_THROW((void)enc.encode(-1.0), DataError);
}

TEST_F(TimeEncoderTest, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(5);
  enc.phase().value = testing::random_matrix(1, 16, rng, 0.3);
  const std::vector<double> deltas{0.0, 1.0, 7.5, 40.0};
  const auto w = testing::random_matrix(4, 16, rng);
  auto r = testing::check_parameters(
      params, [&](nn::ParameterScope& s) { return nn::dot_all(enc(s, deltas), w); }, {}, 20, 9,
      1e-6);
  EXPECT_LT(r.worst_relative, 1e-6);
}

TEST(SemanticInputs, OnlyEntriesBeforeT) {
  extract::SummaryChain chain("u", "base text");
  chain.set(2.0, "themes: a");
  chain.set(5.0, "themes: b");
  HashEmbedder emb(8);
  nn::ParameterSet params;
  TimeEncoder enc(params, "time", 8);

  auto seq = semantic_inputs(chain, 5.0, emb, enc);
  EXPECT_EQ(seq.source_times, (std::vector<double>{0.0, 2.0}));
  ASSERT_EQ(seq.items.rows(), 2);
  ASSERT_EQ(seq.items.cols(), 16);
  EXPECT_EQ(seq.items.row(1).head(8).transpose(), emb.embed("themes: a"));
  EXPECT_EQ(seq.items.row(1).tail(8).transpose(), enc.encode(3.0));

  EXPECT_EQ(semantic_inputs(chain, 0.0, emb, enc).items.rows(), 1);  // base entry only
  EXPECT_EQ(semantic_inputs(chain, 9.0, emb, enc).items.rows(), 3);
}

TEST(SemanticInputs, DimensionMismatch) {
  extract::SummaryChain chain("u", "x");
  HashEmbedder emb(8);
  nn::ParameterSet params;
  TimeEncoder enc(params, "time", 4);
  EXPECT_THROW(semantic_inputs(chain, 1.0, emb, enc), UsageError);
}

TEST(FeatureStore, EmbedsEverythingAndCountsChain) {
  std::istringstream edges("a,b,1,hello\nb,c,2,world\n");
  std::istringstream nodes("a,alpha\nb,beta\nc,gamma\n");
  auto view = graph::ingest(edges, nodes);
  HashEmbedder emb(8);
  std::vector<extract::SummaryChain> chains;
  for (graph::NodeIndex u = 0; u < view.nodes().size(); ++u) {
    chains.emplace_back(view.nodes().id(u), view.nodes().text(u));
  }
  chains[1].set(2.0, "themes: hello");
  FeatureStore store(view, chains, emb);
  EXPECT_EQ(store.dim(), 8);
  EXPECT_EQ(store.node_text().row(0).transpose(), emb.embed("alpha"));
  EXPECT_EQ(store.edge_text().row(1).transpose(), emb.embed("world"));
  EXPECT_EQ(store.max_chain_length(), 2u);
  EXPECT_EQ(store.chain_count_before(1, 2.0), 1u);
  EXPECT_EQ(store.chain_count_before(1, 2.5), 2u);
  EXPECT_EQ(store.chain_count_before(0, 0.0), 1u);

  chains.pop_back();
  EXPECT_THROW(FeatureStore(view, chains, emb), DataError);
}

}  // namespace
}  // namespace cross::embed
