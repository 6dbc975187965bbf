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

#include <numeric>

namespace styled2t {

EmbeddingTable make_embedding_table(ParameterSet &set, int vocab_size, int dim, int max_positions,
	double init_std, Rng &rng)
{
	EmbeddingTable t;
	t.tokens = &set.add_normal("embed.tokens", vocab_size, dim, init_std, rng);
	t.positions = &set.add_normal("embed.positions", max_positions, dim, init_std, rng);
	return t;
}

std::vector<int> pair_token_ids(const AttributeValuePair &pair, const Vocabulary &vocab)
{
	std::vector<int> ids = vocab.encode(pair.attribute);
	ids.push_back(Vocabulary::kSep);
	for (int id : vocab.encode(pair.value)) {
		ids.push_back(id);
	}
	return ids;
}

std::vector<std::vector<int>> pair_token_ids(std::span<const AttributeValuePair> pairs, const Vocabulary &vocab)
{
	std::vector<std::vector<int>> out;
	for (const auto &p : pairs) {
		out.push_back(pair_token_ids(p, vocab));
	}
	return out;
}

std::vector<ad::Var> embed_pairs(ad::Tape &tape, const std::vector<std::vector<int>> &pair_ids,
	const EmbeddingTable &table)
{
	const ad::Var tokens = tape.parameter(*table.tokens);
	std::vector<ad::Var> out;
	for (const auto &ids : pair_ids) {
		out.push_back(ad::gather_rows(tokens, ids));
	}
	return out;
}

ad::Var pair_means(std::span<const ad::Var> pair_embeddings)
{
	std::vector<ad::Var> rows;
	for (const ad::Var &e : pair_embeddings) {
		rows.push_back(ad::mean_rows(e));
	}
	return ad::concat_rows(rows);
}

ad::Var embed_sequence(ad::Tape &tape, std::span<const int> ids, const EmbeddingTable &table, int first_position)
{
	const auto n = static_cast<int>(ids.size());
	if (n == 0 || first_position + n > table.max_positions()) {
		throw Error(ErrorKind::ShapeMismatch, "sequence of length " + std::to_string(n) +
			" does not fit the position table");
	}
	std::vector<int> pos(static_cast<std::size_t>(n));
	std::iota(pos.begin(), pos.end(), first_position);
	return ad::add(ad::gather_rows(tape.parameter(*table.tokens), ids),
		ad::gather_rows(tape.parameter(*table.positions), pos));
}

std::vector<int> planned_ids(const std::vector<std::vector<int>> &pair_ids, const Plan &plan)
{
	std::vector<int> ids;
	std::vector<bool> seen(pair_ids.size(), false);
	for (int m : plan.order) {
		if (m < 1 || m > static_cast<int>(pair_ids.size()) || seen[static_cast<std::size_t>(m - 1)]) {
			throw Error(ErrorKind::ShapeMismatch, "plan index invalid or repeated");
		}
		seen[static_cast<std::size_t>(m - 1)] = true;
		const auto &p = pair_ids[static_cast<std::size_t>(m - 1)];
		ids.insert(ids.end(), p.begin(), p.end());
	}
	return ids;
}

ad::Var encode_planned(ad::Tape &tape, const std::vector<std::vector<int>> &pair_ids, const Plan &plan,
	const EmbeddingTable &table, const EncoderParams &params)
{
	const std::vector<int> ids = planned_ids(pair_ids, plan);
	return encoder_forward(embed_sequence(tape, ids, table), params);
}

Plan identity_plan(std::size_t k)
{
	Plan p;
	p.order.resize(k);
	std::iota(p.order.begin(), p.order.end(), 1);
	return p;
}

} // namespace styled2t
