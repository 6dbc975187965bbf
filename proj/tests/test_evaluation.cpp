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
#include "styled2t/errors.hpp"
#include "styled2t/evaluation.hpp"
#include "styled2t/synthetic.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>

namespace styled2t {
namespace {

std::vector<Tokens> lines(std::initializer_list<const char *> ls)
{
	std::vector<Tokens> out;
	for (const char *l : ls) {
		out.push_back(tokenize(l));
	}
	return out;
}

TEST(RougeL, HandExample)
{
	EXPECT_NEAR(rouge_l(tokenize("a c d"), tokenize("a b c d")), 6.0 / 7.0, 1e-9);
}

TEST(RougeL, IdentityDisjointAndSymmetry)
{
	EXPECT_DOUBLE_EQ(rouge_l(tokenize("x y z"), tokenize("x y z")), 1.0);
	EXPECT_EQ(rouge_l(tokenize("x y"), tokenize("p q r")), 0.0);
	const Tokens a = tokenize("the red bag is very nice"), b = tokenize("a nice red bag");
	EXPECT_DOUBLE_EQ(rouge_l(a, b), rouge_l(b, a));
	EXPECT_THROW(rouge_l({}, a), Error);
	EXPECT_THROW(rouge_l(a, {}), Error);
}

TEST(Bleu4, HandExample)
{
	const auto c = lines({"a b c d e"}), r = lines({"a b c d f"});
	EXPECT_NEAR(bleu_4(c, r), std::pow(0.2, 0.25), 1e-9);
}

TEST(Bleu4, IdentityIsOne)
{
	const auto c = lines({"one two three four five", "six seven eight nine"});
	EXPECT_DOUBLE_EQ(bleu_4(c, c), 1.0);
}

TEST(Bleu4, NoFourGramMatchesGiveZero)
{
	EXPECT_EQ(bleu_4(lines({"a b c x e f g"}), lines({"a b c d e f h"})), 0.0);
	EXPECT_EQ(bleu_4(lines({"p q r s"}), lines({"a b c d"})), 0.0);
}

TEST(Bleu4, ClipsRepeatedNgramsAndPenalisesBrevity)
{
	// Unigram "the" counted at most twice; candidate shorter than reference.
	const auto c = lines({"the the the the cat sat on"}), r = lines({"the cat sat on the mat today"});
	const double p1 = 5.0 / 7.0, p2 = 3.0 / 6.0, p3 = 2.0 / 5.0, p4 = 1.0 / 4.0;
	EXPECT_NEAR(bleu_4(c, r), std::pow(p1 * p2 * p3 * p4, 0.25), 1e-12);
	const auto short_c = lines({"a b c d"}), long_r = lines({"a b c d e f g h"});
	EXPECT_NEAR(bleu_4(short_c, long_r), std::exp(1.0 - 8.0 / 4.0), 1e-12);
}

TEST(Bleu4, CorpusScoreIgnoresPairOrder)
{
	auto c = lines({"a b c d e", "x y z w v u", "m n o p q"});
	auto r = lines({"a b c d f", "x y z w u v", "m n o p q"});
	const double before = bleu_4(c, r);
	std::swap(c[0], c[2]);
	std::swap(r[0], r[2]);
	std::swap(c[1], c[2]);
	std::swap(r[1], r[2]);
	EXPECT_DOUBLE_EQ(bleu_4(c, r), before);
	EXPECT_THROW(bleu_4({}, {}), Error);
	EXPECT_THROW(bleu_4(c, lines({"a"})), Error);
}

class EvaluateTest : public ::testing::Test {
protected:
	static void SetUpTestSuite()
	{
		GeneratorConfig g;
		g.count_per_style = {120, 120};
		split = new CorpusSplit(split_per_style(generate_synthetic_corpus(g), 2, 10));
		std::vector<Tokens> t;
		std::vector<int> l;
		for (const auto &x : split->train) {
			t.push_back(*x.target);
			l.push_back(x.style);
		}
		classifier = new HashClassifier(HashClassifier::train(t, l, 2));
	}
	static void TearDownTestSuite()
	{
		delete split;
		delete classifier;
	}

	static EvaluationReport run(const GenerateFn &fn, std::uint64_t seed = 1)
	{
		return evaluate(split->test, split->train, 2, fn, *classifier, seed);
	}

	static CorpusSplit *split;
	static HashClassifier *classifier;
};

CorpusSplit *EvaluateTest::split = nullptr;
HashClassifier *EvaluateTest::classifier = nullptr;

TEST_F(EvaluateTest, StyleAccuracyIsTheMatchRatio)
{
	std::vector<Tokens> texts;
	std::vector<int> styles;
	for (std::size_t i = 0; i < 4; ++i) {
		texts.push_back(*split->test[i * 5].target);
		styles.push_back(split->test[i * 5].style);
	}
	EXPECT_DOUBLE_EQ(style_accuracy(texts, styles, *classifier), 1.0);
	styles[0] = 1 - styles[0];
	EXPECT_DOUBLE_EQ(style_accuracy(texts, styles, *classifier), 0.75);
	for (int &s : styles) {
		s = 1 - s;
	}
	styles[0] = 1 - styles[0];
	EXPECT_DOUBLE_EQ(style_accuracy(texts, styles, *classifier), 0.0);
	EXPECT_THROW(style_accuracy({}, {}, *classifier), Error);
}

TEST_F(EvaluateTest, GroundTruthCopyScoresPerfectly)
{
	const EvaluationReport r = run([](std::size_t, const Triplet &t, const Tokens &ref, int style) {
		return style == t.style ? *t.target : ref;
	});
	EXPECT_DOUBLE_EQ(r.rouge_l, 1.0);
	EXPECT_DOUBLE_EQ(r.bleu_4, 1.0);
	EXPECT_DOUBLE_EQ(r.style_accuracy, 1.0);
	EXPECT_EQ(r.rows.size(), 2 * split->test.size());
	const auto with_reference = std::count_if(r.rows.begin(), r.rows.end(), [](const auto &row) {
		return row.rouge_l.has_value();
	});
	EXPECT_EQ(static_cast<std::size_t>(with_reference), split->test.size());
}

TEST_F(EvaluateTest, ValueDumpingStubHasFullCoverage)
{
	const EvaluationReport r = run([](std::size_t, const Triplet &t, const Tokens &, int) {
		Tokens out;
		for (const auto &p : t.data) {
			out.insert(out.end(), p.value.begin(), p.value.end());
		}
		return out;
	});
	EXPECT_DOUBLE_EQ(r.coverage, 1.0);
	for (double v : {r.style_accuracy, r.coverage, r.rouge_l, r.bleu_4}) {
		EXPECT_GE(v, 0.0);
		EXPECT_LE(v, 1.0);
	}
}

TEST_F(EvaluateTest, ReferencesHaveTheRequestedStyleAndAreSeeded)
{
	std::vector<std::pair<Tokens, int>> seen_a, seen_b;
	auto capture = [](std::vector<std::pair<Tokens, int>> &out) {
		return [&out](std::size_t, const Triplet &, const Tokens &ref, int style) {
			out.emplace_back(ref, style);
			return ref;
		};
	};
	const EvaluationReport r = run(capture(seen_a), 4);
	run(capture(seen_b), 4);
	EXPECT_EQ(seen_a, seen_b);
	// Every reference is a training target of the requested style.
	for (const auto &[ref, style] : seen_a) {
		const bool found = std::any_of(split->train.begin(), split->train.end(), [&](const Triplet &t) {
			return t.style == style && *t.target == ref;
		});
		EXPECT_TRUE(found);
	}
	EXPECT_DOUBLE_EQ(r.style_accuracy, 1.0);
	ASSERT_EQ(r.style_accuracy_by_style.size(), 2u);
}

TEST_F(EvaluateTest, PerStyleAccuracySeparatesStyles)
{
	// Always emit a style-0 text: perfect on style 0, zero on style 1.
	const Tokens fixed = *std::find_if(split->train.begin(), split->train.end(), [](const Triplet &t) {
		return t.style == 0;
	})->target;
	const EvaluationReport r = run([&](std::size_t, const Triplet &, const Tokens &, int) { return fixed; });
	EXPECT_DOUBLE_EQ(r.style_accuracy_by_style[0], 1.0);
	EXPECT_DOUBLE_EQ(r.style_accuracy_by_style[1], 0.0);
	EXPECT_DOUBLE_EQ(r.style_accuracy, 0.5);
	const auto j = nlohmann::json::parse(r.to_json(false));
	EXPECT_DOUBLE_EQ(j.at("style_accuracy").get<double>(), 50.0);
	EXPECT_FALSE(j.contains("rows"));
}

TEST_F(EvaluateTest, EmptyGenerationsScoreZeroWithoutFailing)
{
	const EvaluationReport r = run([](std::size_t, const Triplet &, const Tokens &, int) { return Tokens{}; });
	EXPECT_EQ(r.coverage, 0.0);
	EXPECT_EQ(r.rouge_l, 0.0);
	EXPECT_EQ(r.bleu_4, 0.0);
}

} // namespace
} // namespace styled2t
