/*
 * Copyright 2026 The styled2t Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "styled2t/data_encoder.hpp"
#include "styled2t/errors.hpp"
#include "styled2t/transformer.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

namespace styled2t {
namespace {

class EncoderTest : public ::testing::Test {
protected:
	void SetUp() override
	{
		for (const char *w : {"color", "red", "size", "large", "brand", "acme", "nova"}) {
			vocab.add(w);
		}
		table = make_embedding_table(set, vocab.size(), shape.dim, 32, 0.5, rng);
		encoder = make_encoder_params(set, "enc", shape, 0.3, rng);
		pairs = {{{"color"}, {"red"}, 1}, {{"size"}, {"large"}, 2}, {{"brand"}, {"acme", "nova"}, 3}};
		ids = pair_token_ids(pairs, vocab);
	}

	Matrix encode(const Plan &plan)
	{
		ad::Tape t(false);
		return encode_planned(t, ids, plan, table, encoder).value();
	}

	TransformerShape shape{8, 1, 2, 16};
	Rng rng{2};
	ParameterSet set;
	Vocabulary vocab;
	EmbeddingTable table;
	EncoderParams encoder;
	std::vector<AttributeValuePair> pairs;
	std::vector<std::vector<int>> ids;
};

TEST_F(EncoderTest, PairIdsInsertSeparatorBetweenAttributeAndValue)
{
	EXPECT_EQ(ids[0], (std::vector<int>{vocab.id("color"), Vocabulary::kSep, vocab.id("red")}));
	EXPECT_EQ(ids[2].size(), 4u);
	const AttributeValuePair unseen{{"weird"}, {"thing"}, 1};
	EXPECT_EQ(pair_token_ids(unseen, vocab), (std::vector<int>{Vocabulary::kUnk, Vocabulary::kSep, Vocabulary::kUnk}));
	for (const auto &p : ids) {
		EXPECT_EQ(std::count(p.begin(), p.end(), Vocabulary::kPad), 0);
	}
}

TEST_F(EncoderTest, EmbedPairsShapesAndDeterminism)
{
	ad::Tape t(false);
	const auto e = embed_pairs(t, ids, table);
	ASSERT_EQ(e.size(), 3u);
	EXPECT_EQ(e[2].rows(), 4);
	EXPECT_EQ(e[2].cols(), shape.dim);
	const auto again = embed_pairs(t, ids, table);
	EXPECT_EQ(e[1].value(), again[1].value());
	const Matrix means = pair_means(e).value();
	EXPECT_EQ(means.rows(), 3);
	EXPECT_LE((means.row(0) - e[0].value().colwise().mean()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST_F(EncoderTest, OutputHasOneRowPerToken)
{
	const Matrix h = encode({{3, 1, 2}});
	EXPECT_EQ(h.rows(), 3 + 3 + 4);
	EXPECT_EQ(h.cols(), shape.dim);
	EXPECT_EQ(planned_ids(ids, {{2, 1}}).size(), 6u);
}

TEST_F(EncoderTest, IdentityPlanMatchesOriginalOrder)
{
	EXPECT_EQ(identity_plan(3).order, (std::vector<int>{1, 2, 3}));
	std::vector<int> flat;
	for (const auto &p : ids) {
		flat.insert(flat.end(), p.begin(), p.end());
	}
	EXPECT_EQ(planned_ids(ids, identity_plan(3)), flat);
	ad::Tape t(false);
	const Matrix direct = encoder_forward(embed_sequence(t, flat, table), encoder).value();
	EXPECT_EQ(encode(identity_plan(3)), direct);
}

TEST_F(EncoderTest, PermutedPlanChangesTheEncoding)
{
	const Matrix a = encode({{1, 2, 3}}), b = encode({{2, 1, 3}});
	EXPECT_GT((a - b).cwiseAbs().maxCoeff(), 1e-6);
}

TEST_F(EncoderTest, ZeroResidualBranchesPassTheEmbeddingThrough)
{
	for (auto &l : encoder.layers) {
		l.attn.wo->value.setZero();
		l.attn.bo->value.setZero();
		l.ffn.w2->value.setZero();
		l.ffn.b2->value.setZero();
	}
	ad::Tape t(false);
	const int id[] = {vocab.id("red")};
	const ad::Var x = embed_sequence(t, id, table);
	EXPECT_EQ(encoder_forward(x, encoder).value(), x.value());
}

TEST_F(EncoderTest, MaskedKeysDoNotInfluenceValidPositions)
{
	ad::Tape t(false);
	const std::vector<int> seq = {5, 6, 7, 0};
	const std::vector<bool> valid = {true, true, true, false};
	Matrix x = embed_sequence(t, seq, table).value();
	const Matrix a = encoder_forward(t.constant(x), encoder, &valid).value();
	x.row(3).setConstant(9.0);
	const Matrix b = encoder_forward(t.constant(x), encoder, &valid).value();
	EXPECT_LE((a.topRows(3) - b.topRows(3)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST_F(EncoderTest, RejectsInvalidShapes)
{
	EXPECT_THROW(validate(TransformerShape{10, 1, 3, 16}), Error);
	EXPECT_THROW(validate(TransformerShape{8, 0, 2, 16}), Error);
	EXPECT_NO_THROW(validate(shape));
}

TEST_F(EncoderTest, GradientsMatchFiniteDifferences)
{
	auto loss = [&](ad::Tape &t) {
		const ad::Var h = encode_planned(t, ids, {{2, 3, 1}}, table, encoder);
		return ad::sum(ad::mul(h, ad::tanh(h)));
	};
	const auto check = testing::grad_check(set, loss);
	EXPECT_LT(check.max_rel, 1e-4) << check.worst;
}

} // namespace
} // namespace styled2t
