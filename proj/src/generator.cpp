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
#include "styled2t/generator.hpp"

#include "styled2t/errors.hpp"

namespace styled2t {

DecoderParams make_decoder_params(ParameterSet &set, const std::string &prefix, const TransformerShape &shape,
	int vocab_size, double init_std, Rng &rng)
{
	DecoderParams p;
	p.stack = make_decoder_stack_params(set, prefix, shape, init_std, rng);
	p.w_y = &set.add_normal(prefix + ".w_y", vocab_size, shape.dim, init_std, rng);
	p.b_y = &set.add_constant(prefix + ".b_y", 1, vocab_size, 0.0);
	return p;
}

ad::Var style_memory(ad::Var data_encoding, ad::Var style)
{
	const ad::Var parts[] = {data_encoding, style};
	return ad::concat_rows(parts);
}

ad::Var decode_step_logits(ad::Var memory, std::span<const int> prev_tokens, const EmbeddingTable &table,
	const DecoderParams &params)
{
	ad::Tape &tape = *memory.tape();
	const ad::Var hidden = decoder_forward(embed_sequence(tape, prev_tokens, table), memory, params.stack);
	return ad::linear(hidden, tape.parameter(*params.w_y), tape.parameter(*params.b_y));
}

ad::Var generation_loss(ad::Var memory, std::span<const int> target, const EmbeddingTable &table,
	const DecoderParams &params)
{
	std::vector<int> inputs{Vocabulary::kBos};
	inputs.insert(inputs.end(), target.begin(), target.end());
	std::vector<int> outputs(target.begin(), target.end());
	outputs.push_back(Vocabulary::kEos);
	return ad::cross_entropy(decode_step_logits(memory, inputs, table, params), outputs);
}

GreedyResult greedy_decode(const Matrix &memory, const EmbeddingTable &table, const DecoderParams &params,
	int max_len)
{
	if (max_len < 1) {
		throw Error(ErrorKind::ConfigInvalid, "max_len must be at least 1");
	}
	if (max_len > table.max_positions()) {
		throw Error(ErrorKind::ShapeMismatch, "max_len exceeds the position table");
	}
	IncrementalDecoder decoder(params.stack, memory);
	const Matrix &tokens = table.tokens->value;
	const Matrix &positions = table.positions->value;
	const Matrix &w_y = params.w_y->value;
	const Matrix &b_y = params.b_y->value;
	GreedyResult out;
	int prev = Vocabulary::kBos;
	for (int t = 0; t < max_len; ++t) {
		const Matrix input = tokens.row(prev) + positions.row(t);
		const Matrix hidden = decoder.step(input);
		const Matrix logits = hidden * w_y.transpose() + b_y;
		int best = 0;
		for (Eigen::Index v = 1; v < logits.cols(); ++v) {
			if (logits(0, v) > logits(0, best)) {
				best = static_cast<int>(v);
			}
		}
		if (best == Vocabulary::kEos) {
			return out;
		}
		out.tokens.push_back(best);
		prev = best;
	}
	out.truncated = true;
	return out;
}

} // namespace styled2t
