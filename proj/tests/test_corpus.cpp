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
#include "styled2t/corpus.hpp"
#include "styled2t/errors.hpp"
#include "styled2t/synthetic.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

namespace styled2t {
namespace {

AttributeValuePair pair(const char *attr, const char *value, int index)
{
	return {tokenize(attr), tokenize(value), index};
}

Triplet with_target(std::vector<AttributeValuePair> data, const char *target)
{
	Triplet t;
	t.data = std::move(data);
	t.style_ref = tokenize("ref text");
	t.target = tokenize(target);
	return t;
}

TEST(Tokenize, SplitsOnWhitespace)
{
	EXPECT_EQ(tokenize("red bag"), (Tokens{"red", "bag"}));
	EXPECT_EQ(tokenize("  a\tb \n c  "), (Tokens{"a", "b", "c"}));
	EXPECT_TRUE(tokenize("").empty());
}

TEST(Vocabulary, ReservedIdsAreFixed)
{
	Vocabulary v;
	EXPECT_EQ(v.id("<pad>"), 0);
	EXPECT_EQ(v.id("<s>"), 1);
	EXPECT_EQ(v.id("</s>"), 2);
	EXPECT_EQ(v.id("<unk>"), 3);
	EXPECT_EQ(v.id("<sep>"), 4);
	EXPECT_EQ(v.size(), 5);
}

TEST(Vocabulary, UnknownTokensMapToUnk)
{
	Vocabulary v;
	v.add("red");
	EXPECT_EQ(v.encode(tokenize("zzz-unseen")), std::vector<int>{Vocabulary::kUnk});
}

TEST(Vocabulary, EncodeDecodeRoundTripsInVocabularyText)
{
	const auto corpus = generate_synthetic_corpus({});
	const Vocabulary v = Vocabulary::build(corpus);
	for (std::size_t i = 0; i < 20; ++i) {
		EXPECT_EQ(v.decode(v.encode(*corpus[i].target)), *corpus[i].target);
	}
}

TEST(Vocabulary, IdsAreDenseAndBijective)
{
	const auto corpus = generate_synthetic_corpus({});
	const Vocabulary v = Vocabulary::build(corpus);
	for (int id = 0; id < v.size(); ++id) {
		EXPECT_EQ(v.id(v.token(id)), id);
	}
}

TEST(Vocabulary, FileRoundTrip)
{
	const auto corpus = generate_synthetic_corpus({});
	const Vocabulary v = Vocabulary::build(corpus);
	const auto dir = testing::scratch_dir("vocab");
	v.save(dir / "vocab.txt");
	EXPECT_EQ(Vocabulary::load(dir / "vocab.txt"), v);
}

TEST(ExtractRanks, OrdersByFirstOccurrence)
{
	const Triplet t = with_target({pair("feature", "bubbler", 1), pair("use", "press", 2)},
		"it has a bubbler inside so you just press it");
	EXPECT_EQ(extract_ranks(t).ranks, (std::vector<int>{1, 2}));
	EXPECT_EQ(extract_plan(t).order, (std::vector<int>{1, 2}));
}

TEST(ExtractRanks, AbsentValueGetsZero)
{
	const Triplet t = with_target({pair("a", "x", 1), pair("b", "missing", 2), pair("c", "y", 3)}, "y then x");
	EXPECT_EQ(extract_ranks(t).ranks, (std::vector<int>{2, 0, 1}));
	EXPECT_EQ(extract_plan(t).order, (std::vector<int>{3, 1}));
}

TEST(ExtractRanks, TiesGoToTheSmallerPairIndex)
{
	// Values of pairs 2 and 3 both start at position 1.
	const Triplet t = with_target({pair("a", "z", 1), pair("b", "red", 2), pair("c", "red bag", 3)}, "a red bag z");
	const RankVector r = extract_ranks(t);
	EXPECT_LT(r.ranks[1], r.ranks[2]);
	EXPECT_EQ(r.ranks, (std::vector<int>{3, 1, 2}));
}

TEST(ExtractRanks, NoValuePresentIsUnderivable)
{
	const Triplet t = with_target({pair("a", "x", 1)}, "nothing here");
	try {
		extract_ranks(t);
		FAIL() << "expected PlanUnderivable";
	} catch (const Error &e) {
		EXPECT_EQ(e.kind(), ErrorKind::PlanUnderivable);
	}
	Triplet no_target = t;
	no_target.target.reset();
	EXPECT_THROW(extract_plan(no_target), Error);
}

TEST(ExtractPlan, DropsZerosAndSortsByRank)
{
	EXPECT_EQ(plan_from_ranks({{2, 1, 0}}).order, (std::vector<int>{2, 1}));
	const Triplet single = with_target({pair("a", "x", 1)}, "x");
	EXPECT_EQ(extract_plan(single).order, std::vector<int>{1});
}

TEST(ExtractPlan, RankOfEachPlanStepEqualsItsPosition)
{
	const auto corpus = generate_synthetic_corpus({});
	for (std::size_t i = 0; i < 200; ++i) {
		const RankVector r = extract_ranks(corpus[i]);
		const Plan p = extract_plan(corpus[i]);
		for (std::size_t t = 0; t < p.order.size(); ++t) {
			EXPECT_EQ(r.ranks[static_cast<std::size_t>(p.order[t] - 1)], static_cast<int>(t) + 1);
		}
		// Nonzero ranks form {1..m}.
		std::vector<int> nz;
		std::copy_if(r.ranks.begin(), r.ranks.end(), std::back_inserter(nz), [](int x) { return x > 0; });
		std::sort(nz.begin(), nz.end());
		for (std::size_t k = 0; k < nz.size(); ++k) {
			EXPECT_EQ(nz[k], static_cast<int>(k) + 1);
		}
	}
}

TEST(Triplet, StyleLabelIsOneHot)
{
	Triplet t;
	t.style = 1;
	t.num_styles = 3;
	EXPECT_EQ(t.style_label(), (std::vector<int>{0, 1, 0}));
}

TEST(Jsonl, ReadsValidRecords)
{
	std::istringstream in(
		R"({"data":[{"attr":"color","value":"red"}],"style_ref":"hey","target":"red one","style":0})"
		"\n\n"
		R"({"data":[{"attr":"size","value":"big"}],"style_ref":"yo","target":null,"style":1})"
		"\n");
	const auto ts = parse_jsonl(in);
	ASSERT_EQ(ts.size(), 2u);
	EXPECT_EQ(ts[0].data[0].value, Tokens{"red"});
	EXPECT_EQ(ts[0].data[0].index, 1);
	EXPECT_FALSE(ts[1].target.has_value());
	EXPECT_EQ(ts[1].style, 1);
}

TEST(Jsonl, MissingStyleReportsTheLine)
{
	std::istringstream in(R"({"data":[{"attr":"a","value":"b"}],"style_ref":"x","target":"b","style":0})"
						  "\n"
						  R"({"data":[{"attr":"a","value":"b"}],"style_ref":"x","target":"b"})"
						  "\n");
	try {
		parse_jsonl(in);
		FAIL() << "expected SchemaError";
	} catch (const SchemaError &e) {
		EXPECT_EQ(e.line(), 2u);
	}
}

TEST(Jsonl, RejectsMalformedRecords)
{
	for (const char *bad : {"not json", R"({"data":[],"style_ref":"x","target":null,"style":0})",
			 R"({"data":[{"attr":"a"}],"style_ref":"x","target":null,"style":0})",
			 R"({"data":[{"attr":"a","value":"b"}],"style_ref":"x","target":null,"style":5})",
			 R"({"data":[{"attr":"a","value":"b"}],"target":null,"style":0})"}) {
		std::istringstream in(bad);
		EXPECT_THROW(parse_jsonl(in), SchemaError) << bad;
	}
}

TEST(Jsonl, WriteThenReadIsIdentity)
{
	const auto corpus = generate_synthetic_corpus({{30, 30}});
	std::stringstream buf;
	write_jsonl(buf, corpus);
	EXPECT_EQ(parse_jsonl(buf), corpus);
}

TEST(Generator, IsDeterministicPerSeed)
{
	GeneratorConfig c;
	c.count_per_style = {50, 50};
	std::stringstream a, b, other;
	write_jsonl(a, generate_synthetic_corpus(c));
	write_jsonl(b, generate_synthetic_corpus(c));
	c.seed = 8;
	write_jsonl(other, generate_synthetic_corpus(c));
	EXPECT_EQ(a.str(), b.str());
	EXPECT_NE(a.str(), other.str());
}

TEST(Generator, RespectsPairRangeAndCoversEveryValue)
{
	GeneratorConfig c;
	c.count_per_style = {200, 200};
	const auto corpus = generate_synthetic_corpus(c);
	std::vector<int> per_style(2, 0);
	for (const Triplet &t : corpus) {
		++per_style[static_cast<std::size_t>(t.style)];
		EXPECT_GE(static_cast<int>(t.data.size()), c.min_pairs);
		EXPECT_LE(static_cast<int>(t.data.size()), c.max_pairs);
		for (const auto &p : t.data) {
			EXPECT_TRUE(find_subsequence(*t.target, p.value).has_value());
		}
		EXPECT_EQ(extract_plan(t).order.size(), t.data.size());
	}
	EXPECT_EQ(per_style, (std::vector<int>{200, 200}));
}

TEST(Generator, StyleReferenceIsAnotherSameStyleTarget)
{
	const auto corpus = generate_synthetic_corpus({{60, 60}});
	for (std::size_t i = 0; i < corpus.size(); ++i) {
		bool found = false;
		for (std::size_t j = 0; j < corpus.size() && !found; ++j) {
			found = j != i && corpus[j].style == corpus[i].style && *corpus[j].target == corpus[i].style_ref;
		}
		EXPECT_TRUE(found) << i;
	}
}

TEST(Generator, StyleMarkersAreDisjoint)
{
	const Tokens a = style_marker_tokens(0), b = style_marker_tokens(1);
	const std::set<std::string> sa(a.begin(), a.end());
	for (const auto &t : b) {
		EXPECT_EQ(sa.count(t), 0u) << t;
	}
}

TEST(Generator, RejectsNonPositiveCounts)
{
	GeneratorConfig c;
	c.count_per_style = {10, 0};
	try {
		generate_synthetic_corpus(c);
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
	}
	c.count_per_style = {10, 10};
	c.min_pairs = 5;
	c.max_pairs = 4;
	EXPECT_THROW(generate_synthetic_corpus(c), Error);
}

TEST(Generator, ContentBiasSkewsAttributesTowardTheStyle)
{
	GeneratorConfig c;
	c.count_per_style = {200, 200};
	c.style_content_bias = 1.0;
	const auto corpus = generate_synthetic_corpus(c);
	// With full bias each style only uses its own half of the attribute pool.
	std::set<std::string> attrs[2];
	for (const Triplet &t : corpus) {
		for (const auto &p : t.data) {
			attrs[t.style].insert(join(p.attribute));
		}
	}
	for (const auto &a : attrs[0]) {
		EXPECT_EQ(attrs[1].count(a), 0u) << a;
	}
}

TEST(Split, HoldsOutTheRequestedCountPerStyle)
{
	const auto corpus = generate_synthetic_corpus({{40, 30}});
	const CorpusSplit s = split_per_style(corpus, 2, 10);
	EXPECT_EQ(s.test.size(), 20u);
	EXPECT_EQ(s.train.size(), 50u);
	const auto by = indices_by_style(s.test, 2);
	EXPECT_EQ(by[0].size(), 10u);
	EXPECT_EQ(by[1].size(), 10u);
}

TEST(IndicesByStyle, MissingStyleIsAnError)
{
	auto corpus = generate_synthetic_corpus({{5, 5}});
	std::erase_if(corpus, [](const Triplet &t) { return t.style == 1; });
	try {
		indices_by_style(corpus, 2);
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.kind(), ErrorKind::DataMissingStyle);
	}
}

} // namespace
} // namespace styled2t
