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

namespace styled2t {

struct DecoderParams {
	DecoderStackParams stack;
	ad::Parameter *w_y = nullptr; // |V| x d
	ad::Parameter *b_y = nullptr; // 1 x |V|
};

DecoderParams make_decoder_params(ParameterSet &set, const std::string &prefix, const TransformerShape &shape,
	int vocab_size, double init_std, Rng &rng);

/// Memory for the decoder: H_o with the style vector appended as one extra row.
ad::Var style_memory(ad::Var data_encoding, ad::Var style);

/// Logits (len(prev_tokens) x |V|); row t sees prev_tokens[0..t] and the whole memory.
ad::Var decode_step_logits(ad::Var memory, std::span<const int> prev_tokens, const EmbeddingTable &table,
	const DecoderParams &params);

/// Sum over target tokens and the closing EOS of -log P(token | prefix, memory).
ad::Var generation_loss(ad::Var memory, std::span<const int> target, const EmbeddingTable &table,
	const DecoderParams &params);

struct GreedyResult {
	std::vector<int> tokens; // without BOS/EOS
	bool truncated = false;  // stopped at max_len without EOS
};

/// Argmax decoding (ties to the smallest id) until EOS or `max_len` tokens.
GreedyResult greedy_decode(const Matrix &memory, const EmbeddingTable &table, const DecoderParams &params,
	int max_len);

} // namespace styled2t
