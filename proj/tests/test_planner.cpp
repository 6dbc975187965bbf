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
#include "styled2t/optimizer.hpp"
#include "styled2t/planner.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace styled2t {
namespace {

class PlannerTest : public ::testing::Test {
protected:
	void SetUp() override { p = make_planner_params(set, "planner", kDim, rng); }

	Matrix random(int rows)
	{
		std::normal_distribution<double> n;
		Matrix m(rows, kDim);
		for (Eigen::Index i = 0; i < m.size(); ++i) {
			m.data()[i] = n(rng);
		}
		return m;
	}

	double log_prob(const Matrix &refined, const Plan &plan)
	{
		ad::Tape t(false);
		return plan_log_prob(t.constant(refined), plan, p).scalar();
	}

	static constexpr int kDim = 6;
	Rng rng{17};
	ParameterSet set;
	PlannerParams p;
};

TEST_F(PlannerTest, SingleCandidateHasLogProbZero)
{
	EXPECT_EQ(log_prob(random(1), {{1}}), 0.0);
	ad::Tape t(false);
	EXPECT_EQ(planning_loss(t.constant(random(1)), {{1}}, p).scalar(), 0.0);
}

TEST_F(PlannerTest, ZeroScoringMatrixGivesUniformSteps)
{
	p.w_l->value.setZero();
	EXPECT_NEAR(log_prob(random(4), {{2, 4, 1, 3}}), 4.0 * std::log(0.25), 1e-12);
	ad::Tape t(false);
	EXPECT_NEAR(planning_loss(t.constant(random(4)), {{1, 2, 3, 4}}, p).scalar(), 4.0 * std::log(4.0), 1e-12);
}

TEST_F(PlannerTest, MatchesScalarLoopOracle)
{
	for (int trial = 0; trial < 20; ++trial) {
		const int k = 1 + trial % 6;
		const Matrix refined = random(k);
		Plan plan;
		plan.order.resize(static_cast<std::size_t>(k));
		std::iota(plan.order.begin(), plan.order.end(), 1);
		std::shuffle(plan.order.begin(), plan.order.end(), rng);
		if (trial % 3 == 0 && k > 1) {
			plan.order.pop_back(); // partial plans are allowed
		}
		EXPECT_NEAR(log_prob(refined, plan), oracle::plan_log_prob(refined, plan, p), 1e-10) << trial;
	}
}

TEST_F(PlannerTest, LossIsNonNegativeNegationOfLogProb)
{
	for (int trial = 0; trial < 10; ++trial) {
		const Matrix refined = random(3);
		const Plan plan{{3, 1, 2}};
		ad::Tape t(false);
		const double loss = planning_loss(t.constant(refined), plan, p).scalar();
		EXPECT_GE(loss, 0.0);
		EXPECT_EQ(loss, -log_prob(refined, plan));
	}
}

TEST_F(PlannerTest, RejectsBadInputs)
{
	ad::Tape t(false);
	const ad::Var refined = t.constant(random(3));
	auto kind = [&](const Plan &plan) {
		try {
			plan_log_prob(refined, plan, p);
		} catch (const Error &e) {
			return e.kind();
		}
		return ErrorKind::IoError;
	};
	EXPECT_EQ(kind({}), ErrorKind::EmptyPlan);
	EXPECT_EQ(kind({{4}}), ErrorKind::ShapeMismatch);
	EXPECT_EQ(kind({{0}}), ErrorKind::ShapeMismatch);
	EXPECT_THROW(plan_log_prob(t.constant(Matrix::Zero(3, kDim + 1)), {{1}}, p), Error);
}

TEST_F(PlannerTest, DecodeProducesAPermutation)
{
	EXPECT_EQ(decode_plan(random(1), p).order, std::vector<int>{1});
	for (int k = 2; k <= 8; ++k) {
		std::vector<int> order = decode_plan(random(k), p).order;
		ASSERT_EQ(static_cast<int>(order.size()), k);
		std::sort(order.begin(), order.end());
		for (int i = 0; i < k; ++i) {
			EXPECT_EQ(order[static_cast<std::size_t>(i)], i + 1);
		}
	}
}

TEST_F(PlannerTest, DecodeTiesGoToTheSmallestIndex)
{
	p.w_l->value.setZero();
	EXPECT_EQ(decode_plan(random(4), p).order, (std::vector<int>{1, 2, 3, 4}));
}

TEST_F(PlannerTest, DecodeIsDeterministic)
{
	const Matrix refined = random(5);
	EXPECT_EQ(decode_plan(refined, p), decode_plan(refined, p));
}

TEST_F(PlannerTest, GradientsMatchFiniteDifferences)
{
	ParameterSet grads;
	Rng local(3);
	PlannerParams q = make_planner_params(grads, "planner", 8, local);
	auto &refined = grads.add_normal("refined", 4, 8, 1.0, local);
	auto loss = [&](ad::Tape &t) { return planning_loss(t.parameter(refined), {{3, 1, 4, 2}}, q); };
	const auto check = testing::grad_check(grads, loss);
	EXPECT_LT(check.max_rel, 1e-4) << check.worst;
}

TEST_F(PlannerTest, TrainingOnOneInstanceMakesDecodeRecoverItsPlan)
{
	auto &refined = set.add_normal("refined", 5, kDim, 1.0, rng);
	const Plan target{{4, 2, 5, 1, 3}};
	Adam opt(set, {0.05, 0.9, 0.999, 1e-8, 1.0});
	for (int step = 0; step < 300; ++step) {
		set.zero_grad();
		ad::Tape t;
		t.backward(planning_loss(t.parameter(refined), target, p));
		opt.step();
	}
	EXPECT_EQ(decode_plan(refined.value, p), target);
}

} // namespace
} // namespace styled2t
