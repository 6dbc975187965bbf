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
#include "styled2t/planner.hpp"

#include "styled2t/errors.hpp"

#include <cmath>
#include <limits>

namespace styled2t {

PlannerParams make_planner_params(ParameterSet &set, const std::string &prefix, int dim, Rng &rng)
{
	const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
	PlannerParams p;
	p.dim = dim;
	p.w_ih = &set.add_uniform(prefix + ".gru.w_ih", 3 * dim, dim, bound, rng);
	p.w_hh = &set.add_uniform(prefix + ".gru.w_hh", 3 * dim, dim, bound, rng);
	p.b_ih = &set.add_uniform(prefix + ".gru.b_ih", 1, 3 * dim, bound, rng);
	p.b_hh = &set.add_uniform(prefix + ".gru.b_hh", 1, 3 * dim, bound, rng);
	p.q0 = &set.add_uniform(prefix + ".q0", 1, dim, bound, rng);
	p.w_l = &set.add_uniform(prefix + ".w_l", dim, dim, bound, rng);
	return p;
}

ad::Var gru_cell(ad::Var input, ad::Var hidden, const PlannerParams &params)
{
	ad::Tape &tape = *input.tape();
	const int d = params.dim;
	const ad::Var gi = ad::linear(input, tape.parameter(*params.w_ih), tape.parameter(*params.b_ih));
	const ad::Var gh = ad::linear(hidden, tape.parameter(*params.w_hh), tape.parameter(*params.b_hh));
	const ad::Var r = ad::sigmoid(ad::add(ad::cols(gi, 0, d), ad::cols(gh, 0, d)));
	const ad::Var z = ad::sigmoid(ad::add(ad::cols(gi, d, d), ad::cols(gh, d, d)));
	const ad::Var n = ad::tanh(ad::add(ad::cols(gi, 2 * d, d), ad::mul(r, ad::cols(gh, 2 * d, d))));
	// h' = (1 - z) * n + z * h
	return ad::add(n, ad::mul(z, ad::sub(hidden, n)));
}

namespace {

void check_refined(ad::Var refined, const PlannerParams &params)
{
	if (refined.cols() != params.dim || refined.rows() == 0) {
		throw Error(ErrorKind::ShapeMismatch, "planner: refined embeddings must be K x d with K >= 1");
	}
}

ad::Var step_scores(ad::Var output, ad::Var candidates, const PlannerParams &params)
{
	ad::Tape &tape = *output.tape();
	return ad::matmul_bt(ad::matmul(output, tape.parameter(*params.w_l)), candidates);
}

} // namespace

ad::Var plan_log_prob(ad::Var refined, const Plan &plan, const PlannerParams &params)
{
	check_refined(refined, params);
	if (plan.order.empty()) {
		throw Error(ErrorKind::EmptyPlan, "plan_log_prob: empty plan");
	}
	ad::Tape &tape = *refined.tape();
	const auto k = static_cast<int>(refined.rows());
	ad::Var hidden = ad::mean_rows(refined);
	ad::Var query = tape.parameter(*params.q0);
	std::vector<int> targets(1);
	ad::Var nll;
	for (int m : plan.order) {
		if (m < 1 || m > k) {
			throw Error(ErrorKind::ShapeMismatch, "plan_log_prob: pair index out of range");
		}
		hidden = gru_cell(query, hidden, params);
		targets[0] = m - 1;
		const ad::Var step = ad::cross_entropy(step_scores(hidden, refined, params), targets);
		nll = nll.valid() ? ad::add(nll, step) : step;
		query = ad::rows(refined, m - 1, 1);
	}
	return ad::scale(nll, -1.0);
}

ad::Var planning_loss(ad::Var refined, const Plan &plan, const PlannerParams &params)
{
	return ad::scale(plan_log_prob(refined, plan, params), -1.0);
}

Plan decode_plan(const Matrix &refined, const PlannerParams &params)
{
	ad::Tape tape(false);
	const ad::Var cand = tape.constant(refined);
	check_refined(cand, params);
	const auto k = static_cast<int>(refined.rows());
	ad::Var hidden = ad::mean_rows(cand);
	ad::Var query = tape.parameter(*params.q0);
	std::vector<bool> used(static_cast<std::size_t>(k), false);
	Plan plan;
	for (int step = 0; step < k; ++step) {
		hidden = gru_cell(query, hidden, params);
		const Matrix &scores = step_scores(hidden, cand, params).value();
		int best = -1;
		double best_score = -std::numeric_limits<double>::infinity();
		for (int i = 0; i < k; ++i) {
			if (!used[static_cast<std::size_t>(i)] && (best < 0 || scores(0, i) > best_score)) {
				best = i;
				best_score = scores(0, i);
			}
		}
		used[static_cast<std::size_t>(best)] = true;
		plan.order.push_back(best + 1);
		query = ad::rows(cand, best, 1);
	}
	return plan;
}

} // namespace styled2t
