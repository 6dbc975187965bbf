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
#include "styled2t/logic_graph.hpp"

#include "styled2t/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace styled2t {

LogicGraph LogicGraph::uniform(int num_nodes)
{
	LogicGraph g;
	g.weights = Matrix::Ones(num_nodes, num_nodes);
	g.weights.diagonal().setZero();
	return g;
}

std::string LogicGraph::to_json(std::span<const AttributeValuePair> pairs) const
{
	nlohmann::ordered_json j;
	j["nodes"] = nlohmann::ordered_json::array();
	for (const auto &p : pairs) {
		j["nodes"].push_back(join(p.attribute) + ": " + join(p.value));
	}
	j["weights"] = nlohmann::ordered_json::array();
	for (Eigen::Index i = 0; i < weights.rows(); ++i) {
		nlohmann::ordered_json row = nlohmann::ordered_json::array();
		for (Eigen::Index k = 0; k < weights.cols(); ++k) {
			row.push_back(weights(i, k));
		}
		j["weights"].push_back(std::move(row));
	}
	return j.dump();
}

std::string LogicGraph::to_dot(std::span<const AttributeValuePair> pairs) const
{
	std::ostringstream out;
	out << "digraph logic {\n";
	for (std::size_t i = 0; i < pairs.size(); ++i) {
		out << "  n" << i + 1 << " [label=\"" << join(pairs[i].attribute) << ": " << join(pairs[i].value) << "\"];\n";
	}
	for (Eigen::Index i = 0; i < weights.rows(); ++i) {
		for (Eigen::Index k = 0; k < weights.cols(); ++k) {
			if (weights(i, k) > 0.0) {
				out << "  n" << i + 1 << " -> n" << k + 1 << " [label=\"" << weights(i, k) << "\"];\n";
			}
		}
	}
	out << "}\n";
	return out.str();
}

LogicGraph build_logic_graph(std::span<const AttributeValuePair> pairs, std::span<const RankVector> corpus_ranks)
{
	const auto k = static_cast<Eigen::Index>(pairs.size());
	LogicGraph g;
	g.weights = Matrix::Zero(k, k);
	for (const RankVector &r : corpus_ranks) {
		if (static_cast<Eigen::Index>(r.ranks.size()) != k) {
			throw Error(ErrorKind::ShapeMismatch, "rank vector length differs from pair count");
		}
		for (Eigen::Index i = 0; i < k; ++i) {
			const int ri = r.ranks[static_cast<std::size_t>(i)];
			if (ri <= 0) {
				continue;
			}
			for (Eigen::Index j = 0; j < k; ++j) {
				const int rj = r.ranks[static_cast<std::size_t>(j)];
				if (rj > ri) {
					g.weights(i, j) += 1.0 / static_cast<double>(rj - ri);
				}
			}
		}
	}
	return g;
}

CorpusIndex::CorpusIndex(std::vector<Tokens> texts) : texts_(std::move(texts)) {}

const std::vector<int> &CorpusIndex::first_positions(const Tokens &value)
{
	auto it = positions_.find(value);
	if (it != positions_.end()) {
		return it->second;
	}
	std::vector<int> pos(texts_.size(), -1);
	for (std::size_t t = 0; t < texts_.size(); ++t) {
		if (auto p = find_subsequence(texts_[t], value)) {
			pos[t] = static_cast<int>(*p);
		}
	}
	return positions_.emplace(value, std::move(pos)).first->second;
}

std::vector<RankVector> CorpusIndex::corpus_ranks(std::span<const AttributeValuePair> pairs)
{
	std::vector<const std::vector<int> *> cols;
	for (const auto &p : pairs) {
		cols.push_back(&first_positions(p.value));
	}
	std::vector<RankVector> out;
	out.reserve(texts_.size());
	std::vector<std::pair<int, std::size_t>> found;
	for (std::size_t t = 0; t < texts_.size(); ++t) {
		found.clear();
		for (std::size_t i = 0; i < pairs.size(); ++i) {
			const int p = (*cols[i])[t];
			if (p >= 0) {
				found.emplace_back(p, i);
			}
		}
		std::sort(found.begin(), found.end());
		RankVector r{std::vector<int>(pairs.size(), 0)};
		for (std::size_t n = 0; n < found.size(); ++n) {
			r.ranks[found[n].second] = static_cast<int>(n) + 1;
		}
		out.push_back(std::move(r));
	}
	return out;
}

LogicGraph CorpusIndex::graph_for(std::span<const AttributeValuePair> pairs)
{
	const auto ranks = corpus_ranks(pairs);
	return build_logic_graph(pairs, ranks);
}

GcnParams make_gcn_params(ParameterSet &set, const std::string &prefix, int dim, int layers, Rng &rng)
{
	if (layers < 1) {
		throw Error(ErrorKind::ConfigInvalid, "GCN needs at least one layer");
	}
	GcnParams p;
	p.dim = dim;
	const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
	for (int l = 0; l < layers; ++l) {
		const std::string base = prefix + ".l" + std::to_string(l);
		GcnLayerParams layer;
		layer.w_a = &set.add_uniform(base + ".w_a", dim, dim, bound, rng);
		layer.w_b = &set.add_uniform(base + ".w_b", dim, dim, bound, rng);
		layer.w_c = &set.add_uniform(base + ".w_c", dim, dim, bound, rng);
		layer.b_c = &set.add_uniform(base + ".b_c", 1, dim, bound, rng);
		p.layers.push_back(layer);
	}
	return p;
}

Matrix normalized_neighbors(const LogicGraph &graph)
{
	const Matrix &e = graph.weights;
	Matrix n = Matrix::Zero(e.rows(), e.cols());
	for (Eigen::Index i = 0; i < e.rows(); ++i) {
		double total = 0.0;
		for (Eigen::Index j = 0; j < e.cols(); ++j) {
			if (j != i && e(i, j) > 0.0) {
				total += e(i, j);
			}
		}
		if (total <= 0.0) {
			continue;
		}
		for (Eigen::Index j = 0; j < e.cols(); ++j) {
			if (j != i && e(i, j) > 0.0) {
				n(i, j) = e(i, j) / total;
			}
		}
	}
	return n;
}

ad::Var gcn_propagate(ad::Var node_inits, const LogicGraph &graph, const GcnParams &params)
{
	if (node_inits.cols() != params.dim) {
		throw Error(ErrorKind::ShapeMismatch, "gcn_propagate: node width differs from GCN width");
	}
	if (node_inits.rows() != graph.num_nodes()) {
		throw Error(ErrorKind::ShapeMismatch, "gcn_propagate: node count differs from graph size");
	}
	ad::Tape &tape = *node_inits.tape();
	const ad::Var neighbors = tape.constant(normalized_neighbors(graph));
	ad::Var z = node_inits;
	for (const GcnLayerParams &l : params.layers) {
		const ad::Var aggregated = ad::matmul(neighbors, ad::matmul_bt(z, tape.parameter(*l.w_a)));
		const ad::Var self = ad::matmul_bt(z, tape.parameter(*l.w_b));
		z = ad::tanh(ad::linear(ad::add(aggregated, self), tape.parameter(*l.w_c), tape.parameter(*l.b_c)));
	}
	return z;
}

} // namespace styled2t
