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

#include <map>

namespace styled2t {

/// Directed mention-order graph over the pairs of one instance.
/// weights(i, j) sums 1 / (r_j - r_i) over corpus texts where pair i is
/// mentioned before pair j.
struct LogicGraph {
	Matrix weights;

	int num_nodes() const { return static_cast<int>(weights.rows()); }
	/// Every off-diagonal weight set to 1 (the unweighted ablation).
	static LogicGraph uniform(int num_nodes);

	std::string to_json(std::span<const AttributeValuePair> pairs) const;
	std::string to_dot(std::span<const AttributeValuePair> pairs) const;
};

LogicGraph build_logic_graph(std::span<const AttributeValuePair> pairs, std::span<const RankVector> corpus_ranks);

/*
 * Caches, per distinct value string, the first mention position in each
 * corpus text. Ranking an instance's pairs against the whole corpus then
 * needs no further text scans.
 */
class CorpusIndex {
public:
	explicit CorpusIndex(std::vector<Tokens> texts);

	std::size_t size() const { return texts_.size(); }
	std::span<const Tokens> texts() const { return texts_; }

	/// ranks_in_text(pairs, text) for every corpus text.
	std::vector<RankVector> corpus_ranks(std::span<const AttributeValuePair> pairs);
	LogicGraph graph_for(std::span<const AttributeValuePair> pairs);

private:
	const std::vector<int> &first_positions(const Tokens &value);

	std::vector<Tokens> texts_;
	std::map<Tokens, std::vector<int>> positions_;
};

struct GcnLayerParams {
	ad::Parameter *w_a = nullptr;
	ad::Parameter *w_b = nullptr;
	ad::Parameter *w_c = nullptr;
	ad::Parameter *b_c = nullptr;
};

struct GcnParams {
	std::vector<GcnLayerParams> layers;
	int dim = 0;
};

GcnParams make_gcn_params(ParameterSet &set, const std::string &prefix, int dim, int layers, Rng &rng);

/// Row-normalised neighbour weights: e_ij / e_i* over j != i with e_ij > 0.
Matrix normalized_neighbors(const LogicGraph &graph);

/// Logical context propagation with tanh activation; rows are pair embeddings.
ad::Var gcn_propagate(ad::Var node_inits, const LogicGraph &graph, const GcnParams &params);

} // namespace styled2t
