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

#include "styled2t/data_encoder.hpp"
#include "styled2t/generator.hpp"
#include "styled2t/logic_graph.hpp"
#include "styled2t/planner.hpp"
#include "styled2t/style_embedder.hpp"

#include <cstdint>

namespace styled2t {

struct ModelConfig {
	TransformerShape shape;
	int gcn_layers = 1;
	int max_positions = 256;
	int num_styles = 2;
	double init_std = 0.02;
	std::uint64_t seed = 13;

	void validate() const;
};

/// Module switches for the ablation variants. All off is the full model.
struct AblationFlags {
	bool no_style = false;             // s = mean of the reference encoding, no mask
	bool no_style_constraints = false; // classifier and clustering weights forced to 0
	bool no_planner = false;           // pairs encoded in input order
	bool no_graph = false;             // planner reads the unrefined pair means
	bool no_pseudo = false;            // no pseudo triplets
	bool no_weight = false;            // every off-diagonal edge weight is 1
	bool no_gru = false;               // no planner at all: no planning loss, input order
	bool fixed_style = false;          // s is a constant one-hot per style
	bool learnable_style = false;      // s is a free vector per style

	void validate() const;
	bool operator==(const AblationFlags &) const = default;
};

/// Everything a forward pass needs from one triplet, computed once.
struct PreparedInstance {
	std::vector<AttributeValuePair> pairs;
	std::vector<std::vector<int>> pair_ids;
	LogicGraph graph;
	std::optional<Plan> plan; // ground truth; absent without a target
	std::vector<int> target_ids;
	std::vector<int> ref_ids;
	Tokens ref_tokens;
	int style = 0;
};

class Model {
public:
	Model(Vocabulary vocab, const ModelConfig &config, const AblationFlags &flags);
	Model(const Model &) = delete;
	Model &operator=(const Model &) = delete;

	const Vocabulary &vocab() const { return vocab_; }
	const ModelConfig &config() const { return config_; }
	const AblationFlags &flags() const { return flags_; }
	ParameterSet &params() { return params_; }
	const ParameterSet &params() const { return params_; }

	PreparedInstance prepare(const Triplet &triplet, CorpusIndex &index) const;

	/// Graph after the edge-weight ablation is applied.
	LogicGraph effective_graph(const LogicGraph &graph) const;
	/// Refined pair embeddings (K x d); the unrefined means under no_graph.
	ad::Var refine(ad::Tape &tape, const PreparedInstance &inst) const;
	/// Greedy plan, or the input order when the planner is ablated.
	Plan plan_for(const PreparedInstance &inst, const Matrix &refined) const;
	ad::Var encode(ad::Tape &tape, const PreparedInstance &inst, const Plan &plan) const;
	/// Style vector of a reference; `ref_style` is only read by the fixed and learnable variants.
	StyleEmbedding style(ad::Tape &tape, std::span<const int> ref_ids, int ref_style) const;

	Plan predict_plan(const PreparedInstance &inst) const;
	/// Decoder memory for generating `inst` in the style of the given reference.
	Matrix memory(const PreparedInstance &inst, std::span<const int> ref_ids, int ref_style) const;
	GreedyResult generate(const PreparedInstance &inst, std::span<const int> ref_ids, int ref_style,
		int max_len) const;

	EmbeddingTable table;
	EncoderParams data_encoder;
	EncoderParams style_encoder;
	DecoderParams decoder;
	GcnParams gcn;
	PlannerParams planner;
	StyleHeadParams style_head;
	ad::Parameter *style_vectors = nullptr; // N_s x d, learnable variant only

private:
	Vocabulary vocab_;
	ModelConfig config_;
	AblationFlags flags_;
	ParameterSet params_;
};

} // namespace styled2t
