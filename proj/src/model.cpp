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
#include "styled2t/model.hpp"

#include "styled2t/errors.hpp"

#include <algorithm>
#include <cmath>

namespace styled2t {

void ModelConfig::validate() const
{
	styled2t::validate(shape);
	if (gcn_layers < 1) {
		throw Error(ErrorKind::ConfigInvalid, "gcn_layers must be at least 1");
	}
	if (max_positions < 1) {
		throw Error(ErrorKind::ConfigInvalid, "max_positions must be positive");
	}
	if (num_styles < 2) {
		throw Error(ErrorKind::ConfigInvalid, "num_styles must be at least 2");
	}
	if (!(init_std > 0.0)) {
		throw Error(ErrorKind::ConfigInvalid, "init_std must be positive");
	}
}

void AblationFlags::validate() const
{
	if (fixed_style && learnable_style) {
		throw Error(ErrorKind::ConfigInvalid, "fixed_style and learnable_style are mutually exclusive");
	}
}

Model::Model(Vocabulary vocab, const ModelConfig &config, const AblationFlags &flags)
	: vocab_(std::move(vocab)), config_(config), flags_(flags)
{
	config_.validate();
	flags_.validate();
	Rng rng(config_.seed);
	const int d = config_.shape.dim;
	const double init = config_.init_std;
	table = make_embedding_table(params_, vocab_.size(), d, config_.max_positions, init, rng);
	data_encoder = make_encoder_params(params_, "data_encoder", config_.shape, init, rng);
	style_encoder = make_encoder_params(params_, "style_encoder", config_.shape, init, rng);
	decoder = make_decoder_params(params_, "decoder", config_.shape, vocab_.size(), init, rng);
	gcn = make_gcn_params(params_, "gcn", d, config_.gcn_layers, rng);
	planner = make_planner_params(params_, "planner", d, rng);
	style_head = make_style_head_params(params_, "style_head", d, config_.num_styles, init, rng);
	if (flags_.learnable_style) {
		style_vectors = &params_.add_normal("style_vectors", config_.num_styles, d, 1.0 / std::sqrt(d), rng);
	}
}

PreparedInstance Model::prepare(const Triplet &triplet, CorpusIndex &index) const
{
	PreparedInstance p;
	p.pairs = triplet.data;
	p.pair_ids = pair_token_ids(triplet.data, vocab_);
	p.graph = index.graph_for(triplet.data);
	if (triplet.target) {
		// A target that mentions no value still trains the decoder, just not the planner.
		const RankVector ranks = ranks_in_text(triplet.data, *triplet.target);
		if (std::any_of(ranks.ranks.begin(), ranks.ranks.end(), [](int r) { return r > 0; })) {
			p.plan = plan_from_ranks(ranks);
		}
		p.target_ids = vocab_.encode(*triplet.target);
	}
	p.ref_tokens = triplet.style_ref;
	p.ref_ids = vocab_.encode(triplet.style_ref);
	p.style = triplet.style;
	return p;
}

LogicGraph Model::effective_graph(const LogicGraph &graph) const
{
	return flags_.no_weight ? LogicGraph::uniform(graph.num_nodes()) : graph;
}

ad::Var Model::refine(ad::Tape &tape, const PreparedInstance &inst) const
{
	const std::vector<ad::Var> pairs = embed_pairs(tape, inst.pair_ids, table);
	const ad::Var inits = pair_means(pairs);
	if (flags_.no_graph) {
		return inits;
	}
	return gcn_propagate(inits, effective_graph(inst.graph), gcn);
}

Plan Model::plan_for(const PreparedInstance &inst, const Matrix &refined) const
{
	if (flags_.no_planner || flags_.no_gru) {
		return identity_plan(inst.pairs.size());
	}
	return decode_plan(refined, planner);
}

ad::Var Model::encode(ad::Tape &tape, const PreparedInstance &inst, const Plan &plan) const
{
	return encode_planned(tape, inst.pair_ids, plan, table, data_encoder);
}

StyleEmbedding Model::style(ad::Tape &tape, std::span<const int> ref_ids, int ref_style) const
{
	if (flags_.fixed_style || flags_.learnable_style) {
		if (ref_style < 0 || ref_style >= config_.num_styles) {
			throw Error(ErrorKind::ConfigInvalid, "style id out of range");
		}
		StyleEmbedding out;
		out.style = flags_.fixed_style
			? tape.constant(fixed_style_vector(ref_style, config_.shape.dim))
			: ad::rows(tape.parameter(*style_vectors), ref_style, 1);
		return out;
	}
	return embed_style(tape, ref_ids, table, style_encoder, style_head, !flags_.no_style);
}

Plan Model::predict_plan(const PreparedInstance &inst) const
{
	ad::Tape tape(false);
	return plan_for(inst, refine(tape, inst).value());
}

Matrix Model::memory(const PreparedInstance &inst, std::span<const int> ref_ids, int ref_style) const
{
	ad::Tape tape(false);
	const Plan plan = plan_for(inst, refine(tape, inst).value());
	const ad::Var h = encode(tape, inst, plan);
	return style_memory(h, style(tape, ref_ids, ref_style).style).value();
}

GreedyResult Model::generate(const PreparedInstance &inst, std::span<const int> ref_ids, int ref_style,
	int max_len) const
{
	return greedy_decode(memory(inst, ref_ids, ref_style), table, decoder, max_len);
}

} // namespace styled2t
