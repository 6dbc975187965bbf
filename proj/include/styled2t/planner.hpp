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
#pragma once

#include "styled2t/ad.hpp"
#include "styled2t/corpus.hpp"
#include "styled2t/params.hpp"

namespace styled2t {

/// GRU cell (input and hidden width `dim`, gate order r, z, n) plus the
/// start query q0 and the bilinear scoring matrix W_L.
struct PlannerParams {
	ad::Parameter *w_ih = nullptr; // 3d x d
	ad::Parameter *w_hh = nullptr; // 3d x d
	ad::Parameter *b_ih = nullptr; // 1 x 3d
	ad::Parameter *b_hh = nullptr; // 1 x 3d
	ad::Parameter *q0 = nullptr;   // 1 x d
	ad::Parameter *w_l = nullptr;  // d x d
	int dim = 0;
};

PlannerParams make_planner_params(ParameterSet &set, const std::string &prefix, int dim, Rng &rng);

ad::Var gru_cell(ad::Var input, ad::Var hidden, const PlannerParams &params);

/// log P(plan | pairs) under teacher forcing. Each step is a softmax over
/// all K candidates; visited pairs are not masked.
ad::Var plan_log_prob(ad::Var refined, const Plan &plan, const PlannerParams &params);
ad::Var planning_loss(ad::Var refined, const Plan &plan, const PlannerParams &params);

/// Greedy decoding over not-yet-chosen pairs; always a full permutation.
Plan decode_plan(const Matrix &refined, const PlannerParams &params);

} // namespace styled2t
