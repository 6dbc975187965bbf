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
#include "styled2t/transformer.hpp"

namespace styled2t {

/// Trainable token table shared by pairs, references and decoder inputs,
/// plus learned absolute positions.
struct EmbeddingTable {
	ad::Parameter *tokens = nullptr;    // |V| x d
	ad::Parameter *positions = nullptr; // max_positions x d

	int dim() const { return static_cast<int>(tokens->value.cols()); }
	int max_positions() const { return static_cast<int>(positions->value.rows()); }
};

EmbeddingTable make_embedding_table(ParameterSet &set, int vocab_size, int dim, int max_positions,
	double init_std, Rng &rng);

/// Token ids of one pair: attribute tokens, SEP, value tokens.
std::vector<int> pair_token_ids(const AttributeValuePair &pair, const Vocabulary &vocab);
std::vector<std::vector<int>> pair_token_ids(std::span<const AttributeValuePair> pairs, const Vocabulary &vocab);

/// Token embeddings (no positions) of each pair: t_k x d.
std::vector<ad::Var> embed_pairs(ad::Tape &tape, const std::vector<std::vector<int>> &pair_ids,
	const EmbeddingTable &table);

/// Mean token embedding of every pair, K x d (GCN node inputs).
ad::Var pair_means(std::span<const ad::Var> pair_embeddings);

/// Token plus position embeddings for a flat id sequence.
ad::Var embed_sequence(ad::Tape &tape, std::span<const int> ids, const EmbeddingTable &table, int first_position = 0);

/// Pair ids concatenated in plan order (no separator between pairs).
std::vector<int> planned_ids(const std::vector<std::vector<int>> &pair_ids, const Plan &plan);

/// H_o: the encoder over the pairs' tokens concatenated in plan order, T x d.
ad::Var encode_planned(ad::Tape &tape, const std::vector<std::vector<int>> &pair_ids, const Plan &plan,
	const EmbeddingTable &table, const EncoderParams &params);

/// Identity plan [1..K].
Plan identity_plan(std::size_t k);

} // namespace styled2t
