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
#include "styled2t/style_embedder.hpp"

#include "styled2t/errors.hpp"

#include <cmath>

namespace styled2t {

StyleHeadParams make_style_head_params(ParameterSet &set, const std::string &prefix, int dim, int num_styles,
	double init_std, Rng &rng)
{
	const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
	StyleHeadParams p;
	p.w_m = &set.add_normal(prefix + ".w_m", dim, dim, init_std, rng);
	p.b_m = &set.add_constant(prefix + ".b_m", 1, dim, 0.0);
	p.w_s1 = &set.add_uniform(prefix + ".w_s1", dim, dim, bound, rng);
	p.b_s1 = &set.add_constant(prefix + ".b_s1", 1, dim, 0.0);
	p.w_s2 = &set.add_uniform(prefix + ".w_s2", dim, num_styles, bound, rng);
	p.b_s2 = &set.add_constant(prefix + ".b_s2", 1, num_styles, 0.0);
	return p;
}

StyleEmbedding embed_style(ad::Tape &tape, std::span<const int> ref_ids, const EmbeddingTable &table,
	const EncoderParams &encoder, const StyleHeadParams &head, bool use_mask)
{
	if (ref_ids.empty()) {
		throw Error(ErrorKind::EmptyReference, "style reference text is empty");
	}
	StyleEmbedding out;
	out.encoded = encoder_forward(embed_sequence(tape, ref_ids, table), encoder);
	if (!use_mask) {
		out.style = ad::mean_rows(out.encoded);
		return out;
	}
	out.mask = ad::sigmoid(ad::add_row(ad::matmul(out.encoded, tape.parameter(*head.w_m)), tape.parameter(*head.b_m)));
	out.style = ad::mean_rows(ad::mul(out.mask, out.encoded));
	return out;
}

ad::Var classify_style(ad::Var style, const StyleHeadParams &head)
{
	ad::Tape &tape = *style.tape();
	const ad::Var hidden = ad::tanh(ad::linear(style, tape.parameter(*head.w_s1), tape.parameter(*head.b_s1)));
	return ad::softmax_rows(ad::add_row(ad::matmul(hidden, tape.parameter(*head.w_s2)), tape.parameter(*head.b_s2)));
}

ad::Var style_cla_loss(ad::Var g_hat, int style)
{
	if (style < 0 || style >= g_hat.cols()) {
		throw Error(ErrorKind::ShapeMismatch, "style id out of range");
	}
	return ad::scale(ad::log_clamped(ad::pick(g_hat, 0, style), kProbabilityFloor), -1.0);
}

StyleCenters style_centers(std::span<const Matrix> styles, std::span<const int> labels, int num_styles)
{
	StyleCenters centers(static_cast<std::size_t>(num_styles));
	std::vector<int> counts(static_cast<std::size_t>(num_styles), 0);
	for (std::size_t i = 0; i < styles.size(); ++i) {
		auto &c = centers.at(static_cast<std::size_t>(labels[i]));
		if (!c) {
			c = Matrix::Zero(styles[i].rows(), styles[i].cols());
		}
		*c += styles[i];
		++counts[static_cast<std::size_t>(labels[i])];
	}
	for (std::size_t u = 0; u < centers.size(); ++u) {
		if (centers[u]) {
			*centers[u] /= static_cast<double>(counts[u]);
		}
	}
	return centers;
}

ad::Var style_clu_loss(ad::Var style, int true_style, const StyleCenters &centers, int num_styles)
{
	ad::Tape &tape = *style.tape();
	auto center = [&](int v) -> const Matrix & {
		if (v >= static_cast<int>(centers.size()) || !centers[static_cast<std::size_t>(v)]) {
			throw Error(ErrorKind::MissingCenter, "no batch samples for style " + std::to_string(v));
		}
		return *centers[static_cast<std::size_t>(v)];
	};
	ad::Var loss = ad::squared_norm(ad::sub(style, tape.constant(center(true_style))));
	for (int v = 0; v < num_styles; ++v) {
		if (v == true_style) {
			continue;
		}
		const ad::Var d2 = ad::squared_norm(ad::sub(style, tape.constant(center(v))));
		loss = ad::add(loss, ad::scale(ad::exp(ad::scale(d2, -1.0)), 1.0 / num_styles));
	}
	return loss;
}

Matrix fixed_style_vector(int style, int dim)
{
	Matrix v = Matrix::Zero(1, dim);
	v(0, style % dim) = 1.0;
	return v;
}

} // namespace styled2t
