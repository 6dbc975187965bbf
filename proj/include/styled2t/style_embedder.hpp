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

#include <optional>

namespace styled2t {

struct StyleHeadParams {
	ad::Parameter *w_m = nullptr;  // d x d
	ad::Parameter *b_m = nullptr;  // 1 x d
	ad::Parameter *w_s1 = nullptr; // d x d
	ad::Parameter *b_s1 = nullptr; // 1 x d
	ad::Parameter *w_s2 = nullptr; // d x N_s
	ad::Parameter *b_s2 = nullptr; // 1 x N_s
};

StyleHeadParams make_style_head_params(ParameterSet &set, const std::string &prefix, int dim, int num_styles,
	double init_std, Rng &rng);

struct StyleEmbedding {
	ad::Var encoded; // H_X, Q x d
	ad::Var mask;    // M, Q x d (invalid when the mask is disabled)
	ad::Var style;   // s, 1 x d
};

/// s = mean over positions of sigmoid(H_X W_m + b_m) * H_X. With
/// `use_mask` false, s is the plain mean of H_X.
StyleEmbedding embed_style(ad::Tape &tape, std::span<const int> ref_ids, const EmbeddingTable &table,
	const EncoderParams &encoder, const StyleHeadParams &head, bool use_mask = true);

/// softmax(tanh(s W_s1^T + b_s1) W_s2 + b_s2), 1 x N_s.
ad::Var classify_style(ad::Var style, const StyleHeadParams &head);

/// Probabilities below this are clamped before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

/// -log g_hat[style].
ad::Var style_cla_loss(ad::Var g_hat, int style);

using StyleCenters = std::vector<std::optional<Matrix>>;

/// Mean style vector per style; empty where a style has no sample.
StyleCenters style_centers(std::span<const Matrix> styles, std::span<const int> labels, int num_styles);

/// ||s - c_u||^2 + (1/N_s) sum_{v != u} exp(-||s - c_v||^2); centers are constants.
ad::Var style_clu_loss(ad::Var style, int true_style, const StyleCenters &centers, int num_styles);

/// One-hot of the style id padded to width `dim`.
Matrix fixed_style_vector(int style, int dim);

} // namespace styled2t
