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
#include "styled2t/params.hpp"

namespace styled2t {

struct TransformerShape {
	int dim = 32;
	int layers = 2;
	int heads = 4;
	int ffn_dim = 64;
};

void validate(const TransformerShape &shape);

struct LayerNormParams {
	ad::Parameter *gain = nullptr;
	ad::Parameter *bias = nullptr;
};

struct AttentionParams {
	ad::Parameter *wq = nullptr, *bq = nullptr;
	ad::Parameter *wk = nullptr, *bk = nullptr;
	ad::Parameter *wv = nullptr, *bv = nullptr;
	ad::Parameter *wo = nullptr, *bo = nullptr;
};

struct FeedForwardParams {
	ad::Parameter *w1 = nullptr, *b1 = nullptr;
	ad::Parameter *w2 = nullptr, *b2 = nullptr;
};

struct EncoderLayerParams {
	LayerNormParams ln1;
	AttentionParams attn;
	LayerNormParams ln2;
	FeedForwardParams ffn;
};

/// Pre-norm encoder stack; the residual stream is returned without a final norm.
struct EncoderParams {
	TransformerShape shape;
	std::vector<EncoderLayerParams> layers;
};

struct DecoderLayerParams {
	LayerNormParams ln1;
	AttentionParams self_attn;
	LayerNormParams ln2;
	AttentionParams cross_attn;
	LayerNormParams ln3;
	FeedForwardParams ffn;
};

/// Pre-norm decoder stack with causal self-attention, cross-attention and a final norm.
struct DecoderStackParams {
	TransformerShape shape;
	std::vector<DecoderLayerParams> layers;
	LayerNormParams final_ln;
};

EncoderParams make_encoder_params(ParameterSet &set, const std::string &prefix, const TransformerShape &shape,
	double init_std, Rng &rng);
DecoderStackParams make_decoder_stack_params(ParameterSet &set, const std::string &prefix,
	const TransformerShape &shape, double init_std, Rng &rng);

/// `key_valid`, when given, masks invalid (padding) key positions.
ad::Var encoder_forward(ad::Var x, const EncoderParams &params, const std::vector<bool> *key_valid = nullptr);
ad::Var decoder_forward(ad::Var x, ad::Var memory, const DecoderStackParams &params);

/// Additive causal mask: 0 on and below the diagonal, -inf above.
Matrix causal_mask(Eigen::Index n);

/*
 * Incremental decoder: feeds one input row at a time and keeps per-layer
 * self-attention keys/values, so greedy decoding costs one row per step.
 * Produces the same rows as decoder_forward over the full prefix.
 */
class IncrementalDecoder {
public:
	IncrementalDecoder(const DecoderStackParams &params, const Matrix &memory);

	/// Input row (1 x d) for the next position; returns the final-norm output row.
	Matrix step(const Matrix &input_row);

private:
	const DecoderStackParams &params_;
	std::vector<Matrix> self_k_, self_v_;
	std::vector<Matrix> cross_k_, cross_v_;
};

} // namespace styled2t
