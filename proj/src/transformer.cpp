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
#include "styled2t/transformer.hpp"

#include "styled2t/errors.hpp"

#include <limits>

namespace styled2t {

void validate(const TransformerShape &s)
{
	if (s.dim <= 0 || s.layers <= 0 || s.heads <= 0 || s.ffn_dim <= 0) {
		throw Error(ErrorKind::ConfigInvalid, "transformer sizes must be positive");
	}
	if (s.dim % s.heads != 0) {
		throw Error(ErrorKind::ConfigInvalid, "model width must be divisible by the head count");
	}
}

namespace {

LayerNormParams make_ln(ParameterSet &set, const std::string &name, int dim)
{
	return {&set.add_constant(name + ".gain", 1, dim, 1.0), &set.add_constant(name + ".bias", 1, dim, 0.0)};
}

AttentionParams make_attn(ParameterSet &set, const std::string &name, int dim, double std, Rng &rng)
{
	AttentionParams a;
	a.wq = &set.add_normal(name + ".wq", dim, dim, std, rng);
	a.bq = &set.add_constant(name + ".bq", 1, dim, 0.0);
	a.wk = &set.add_normal(name + ".wk", dim, dim, std, rng);
	a.bk = &set.add_constant(name + ".bk", 1, dim, 0.0);
	a.wv = &set.add_normal(name + ".wv", dim, dim, std, rng);
	a.bv = &set.add_constant(name + ".bv", 1, dim, 0.0);
	a.wo = &set.add_normal(name + ".wo", dim, dim, std, rng);
	a.bo = &set.add_constant(name + ".bo", 1, dim, 0.0);
	return a;
}

FeedForwardParams make_ffn(ParameterSet &set, const std::string &name, int dim, int hidden, double std, Rng &rng)
{
	FeedForwardParams f;
	f.w1 = &set.add_normal(name + ".w1", hidden, dim, std, rng);
	f.b1 = &set.add_constant(name + ".b1", 1, hidden, 0.0);
	f.w2 = &set.add_normal(name + ".w2", dim, hidden, std, rng);
	f.b2 = &set.add_constant(name + ".b2", 1, dim, 0.0);
	return f;
}

ad::Var norm(ad::Var x, const LayerNormParams &p)
{
	ad::Tape &t = *x.tape();
	return ad::layer_norm(x, t.parameter(*p.gain), t.parameter(*p.bias));
}

ad::Var project(ad::Var x, ad::Parameter *w, ad::Parameter *b)
{
	ad::Tape &t = *x.tape();
	return ad::linear(x, t.parameter(*w), t.parameter(*b));
}

ad::Var attend(ad::Var queries_from, ad::Var keys_from, const AttentionParams &p, int heads, const Matrix &mask)
{
	const ad::Var q = project(queries_from, p.wq, p.bq);
	const ad::Var k = project(keys_from, p.wk, p.bk);
	const ad::Var v = project(keys_from, p.wv, p.bv);
	return project(ad::attention(q, k, v, heads, mask), p.wo, p.bo);
}

ad::Var feed_forward(ad::Var x, const FeedForwardParams &p)
{
	return project(ad::gelu(project(x, p.w1, p.b1)), p.w2, p.b2);
}

} // namespace

EncoderParams make_encoder_params(ParameterSet &set, const std::string &prefix, const TransformerShape &shape,
	double init_std, Rng &rng)
{
	validate(shape);
	EncoderParams p;
	p.shape = shape;
	for (int l = 0; l < shape.layers; ++l) {
		const std::string base = prefix + ".l" + std::to_string(l);
		EncoderLayerParams layer;
		layer.ln1 = make_ln(set, base + ".ln1", shape.dim);
		layer.attn = make_attn(set, base + ".attn", shape.dim, init_std, rng);
		layer.ln2 = make_ln(set, base + ".ln2", shape.dim);
		layer.ffn = make_ffn(set, base + ".ffn", shape.dim, shape.ffn_dim, init_std, rng);
		p.layers.push_back(layer);
	}
	return p;
}

DecoderStackParams make_decoder_stack_params(ParameterSet &set, const std::string &prefix,
	const TransformerShape &shape, double init_std, Rng &rng)
{
	validate(shape);
	DecoderStackParams p;
	p.shape = shape;
	for (int l = 0; l < shape.layers; ++l) {
		const std::string base = prefix + ".l" + std::to_string(l);
		DecoderLayerParams layer;
		layer.ln1 = make_ln(set, base + ".ln1", shape.dim);
		layer.self_attn = make_attn(set, base + ".self_attn", shape.dim, init_std, rng);
		layer.ln2 = make_ln(set, base + ".ln2", shape.dim);
		layer.cross_attn = make_attn(set, base + ".cross_attn", shape.dim, init_std, rng);
		layer.ln3 = make_ln(set, base + ".ln3", shape.dim);
		layer.ffn = make_ffn(set, base + ".ffn", shape.dim, shape.ffn_dim, init_std, rng);
		p.layers.push_back(layer);
	}
	p.final_ln = make_ln(set, prefix + ".final_ln", shape.dim);
	return p;
}

Matrix causal_mask(Eigen::Index n)
{
	Matrix m = Matrix::Zero(n, n);
	for (Eigen::Index i = 0; i < n; ++i) {
		for (Eigen::Index j = i + 1; j < n; ++j) {
			m(i, j) = -std::numeric_limits<double>::infinity();
		}
	}
	return m;
}

ad::Var encoder_forward(ad::Var x, const EncoderParams &params, const std::vector<bool> *key_valid)
{
	if (x.cols() != params.shape.dim) {
		throw Error(ErrorKind::ShapeMismatch, "encoder: input width differs from model width");
	}
	Matrix mask;
	if (key_valid) {
		if (static_cast<Eigen::Index>(key_valid->size()) != x.rows()) {
			throw Error(ErrorKind::ShapeMismatch, "encoder: key mask length differs from sequence length");
		}
		mask = Matrix::Zero(x.rows(), x.rows());
		for (Eigen::Index j = 0; j < x.rows(); ++j) {
			if (!(*key_valid)[static_cast<std::size_t>(j)]) {
				mask.col(j).setConstant(-std::numeric_limits<double>::infinity());
			}
		}
	}
	ad::Var h = x;
	for (const EncoderLayerParams &l : params.layers) {
		const ad::Var a = norm(h, l.ln1);
		h = ad::add(h, attend(a, a, l.attn, params.shape.heads, mask));
		h = ad::add(h, feed_forward(norm(h, l.ln2), l.ffn));
	}
	return h;
}

ad::Var decoder_forward(ad::Var x, ad::Var memory, const DecoderStackParams &params)
{
	if (x.cols() != params.shape.dim || memory.cols() != params.shape.dim) {
		throw Error(ErrorKind::ShapeMismatch, "decoder: input or memory width differs from model width");
	}
	const Matrix causal = causal_mask(x.rows());
	const Matrix none;
	ad::Var h = x;
	for (const DecoderLayerParams &l : params.layers) {
		const ad::Var a = norm(h, l.ln1);
		h = ad::add(h, attend(a, a, l.self_attn, params.shape.heads, causal));
		h = ad::add(h, attend(norm(h, l.ln2), memory, l.cross_attn, params.shape.heads, none));
		h = ad::add(h, feed_forward(norm(h, l.ln3), l.ffn));
	}
	return norm(h, params.final_ln);
}

IncrementalDecoder::IncrementalDecoder(const DecoderStackParams &params, const Matrix &memory) : params_(params)
{
	ad::Tape tape(false);
	const ad::Var mem = tape.constant(memory);
	for (const DecoderLayerParams &l : params_.layers) {
		cross_k_.push_back(project(mem, l.cross_attn.wk, l.cross_attn.bk).value());
		cross_v_.push_back(project(mem, l.cross_attn.wv, l.cross_attn.bv).value());
		self_k_.emplace_back(0, params_.shape.dim);
		self_v_.emplace_back(0, params_.shape.dim);
	}
}

Matrix IncrementalDecoder::step(const Matrix &input_row)
{
	ad::Tape tape(false);
	const Matrix none;
	const int heads = params_.shape.heads;
	ad::Var h = tape.constant(input_row);
	for (std::size_t i = 0; i < params_.layers.size(); ++i) {
		const DecoderLayerParams &l = params_.layers[i];
		const ad::Var a = norm(h, l.ln1);
		const Matrix k_row = project(a, l.self_attn.wk, l.self_attn.bk).value();
		const Matrix v_row = project(a, l.self_attn.wv, l.self_attn.bv).value();
		Matrix &kc = self_k_[i];
		Matrix &vc = self_v_[i];
		kc.conservativeResize(kc.rows() + 1, Eigen::NoChange);
		vc.conservativeResize(vc.rows() + 1, Eigen::NoChange);
		kc.row(kc.rows() - 1) = k_row;
		vc.row(vc.rows() - 1) = v_row;
		const ad::Var q = project(a, l.self_attn.wq, l.self_attn.bq);
		const ad::Var self = ad::attention(q, tape.constant(kc), tape.constant(vc), heads, none);
		h = ad::add(h, project(self, l.self_attn.wo, l.self_attn.bo));
		const ad::Var q2 = project(norm(h, l.ln2), l.cross_attn.wq, l.cross_attn.bq);
		const ad::Var cross = ad::attention(q2, tape.constant(cross_k_[i]), tape.constant(cross_v_[i]), heads, none);
		h = ad::add(h, project(cross, l.cross_attn.wo, l.cross_attn.bo));
		h = ad::add(h, feed_forward(norm(h, l.ln3), l.ffn));
	}
	return norm(h, params_.final_ln).value();
}

} // namespace styled2t
