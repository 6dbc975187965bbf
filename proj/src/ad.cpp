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
#include "styled2t/ad.hpp"

#include "styled2t/errors.hpp"

#include <cmath>
#include <numbers>

namespace styled2t {

std::string_view error_kind_name(ErrorKind kind)
{
	switch (kind) {
	case ErrorKind::PlanUnderivable: return "PlanUnderivable";
	case ErrorKind::SchemaError: return "SchemaError";
	case ErrorKind::ConfigInvalid: return "ConfigInvalid";
	case ErrorKind::ShapeMismatch: return "ShapeMismatch";
	case ErrorKind::EmptyPlan: return "EmptyPlan";
	case ErrorKind::EmptyReference: return "EmptyReference";
	case ErrorKind::MissingCenter: return "MissingCenter";
	case ErrorKind::EmptyCorpus: return "EmptyCorpus";
	case ErrorKind::EmptyText: return "EmptyText";
	case ErrorKind::SingleStyleCorpus: return "SingleStyleCorpus";
	case ErrorKind::EmptyInput: return "EmptyInput";
	case ErrorKind::DataMissingStyle: return "DataMissingStyle";
	case ErrorKind::IoError: return "IoError";
	}
	return "Unknown";
}

namespace ad {

namespace {

void require_same_shape(const Matrix &a, const Matrix &b, const char *op)
{
	if (a.rows() != b.rows() || a.cols() != b.cols()) {
		throw Error(ErrorKind::ShapeMismatch,
			std::string(op) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
				" vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
	}
}

void require(bool ok, const char *what)
{
	if (!ok) {
		throw Error(ErrorKind::ShapeMismatch, what);
	}
}

Tape &tape_of(Var a)
{
	return *a.tape();
}

} // namespace

const Matrix &Var::value() const
{
	return tape_->value(id_);
}

double Var::scalar() const
{
	const Matrix &v = value();
	require(v.size() == 1, "scalar() on a non-scalar node");
	return v(0, 0);
}

Var Tape::constant(Matrix value)
{
	nodes_.push_back(Node{std::move(value), {}, nullptr, false, {}});
	return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::parameter(Parameter &p)
{
	// The value is read through the parameter pointer; no copy is kept.
	nodes_.push_back(Node{{}, {}, &p, record_, {}});
	return Var(this, static_cast<int>(nodes_.size() - 1));
}

const Matrix &Tape::value(int id) const
{
	const Node &n = nodes_[id];
	return n.param ? n.param->value : n.value;
}

Var Tape::record(Matrix value, std::span<const Var> inputs, BackwardFn fn)
{
	bool needs = false;
	if (record_) {
		for (const Var &v : inputs) {
			needs = needs || nodes_[v.id()].requires_grad;
		}
	}
	nodes_.push_back(Node{std::move(value), {}, nullptr, needs, needs ? std::move(fn) : BackwardFn{}});
	return Var(this, static_cast<int>(nodes_.size() - 1));
}

Matrix &Tape::grad_slot(Node &n)
{
	if (n.param) {
		if (n.param->grad.size() == 0) {
			n.param->zero_grad();
		}
		return n.param->grad;
	}
	if (n.grad.size() == 0) {
		n.grad.setZero(n.value.rows(), n.value.cols());
	}
	return n.grad;
}

void Tape::accumulate(int id, const Matrix &g)
{
	Node &n = nodes_[id];
	if (!n.requires_grad) {
		return;
	}
	grad_slot(n) += g;
}

void Tape::accumulate_rows(int id, std::span<const int> rows, const Matrix &g)
{
	Node &n = nodes_[id];
	if (!n.requires_grad) {
		return;
	}
	Matrix &slot = grad_slot(n);
	for (std::size_t i = 0; i < rows.size(); ++i) {
		slot.row(rows[i]) += g.row(static_cast<Eigen::Index>(i));
	}
}

void Tape::backward(Var root, double seed)
{
	require(root.tape() == this, "backward on a foreign node");
	require(value(root.id()).size() == 1, "backward root must be 1x1");
	Node &r = nodes_[root.id()];
	if (!r.requires_grad) {
		return;
	}
	if (r.param) {
		grad_slot(r)(0, 0) += seed;
		return;
	}
	r.grad = Matrix::Constant(1, 1, seed);
	for (int id = root.id(); id >= 0; --id) {
		Node &n = nodes_[id];
		if (n.backward && n.grad.size() != 0) {
			n.backward(*this, n.grad);
			// Intermediate gradients are not needed after propagation.
			n.grad.resize(0, 0);
		}
	}
}

Var add(Var a, Var b)
{
	require_same_shape(a.value(), b.value(), "add");
	const int ia = a.id(), ib = b.id();
	return tape_of(a).record(a.value() + b.value(), {a, b}, [ia, ib](Tape &t, const Matrix &g) {
		t.accumulate(ia, g);
		t.accumulate(ib, g);
	});
}

Var sub(Var a, Var b)
{
	require_same_shape(a.value(), b.value(), "sub");
	const int ia = a.id(), ib = b.id();
	return tape_of(a).record(a.value() - b.value(), {a, b}, [ia, ib](Tape &t, const Matrix &g) {
		t.accumulate(ia, g);
		t.accumulate(ib, -g);
	});
}

Var mul(Var a, Var b)
{
	require_same_shape(a.value(), b.value(), "mul");
	const int ia = a.id(), ib = b.id();
	return tape_of(a).record(a.value().cwiseProduct(b.value()), {a, b}, [ia, ib](Tape &t, const Matrix &g) {
		t.accumulate(ia, g.cwiseProduct(t.value(ib)));
		t.accumulate(ib, g.cwiseProduct(t.value(ia)));
	});
}

Var scale(Var a, double c)
{
	const int ia = a.id();
	return tape_of(a).record(a.value() * c, {a}, [ia, c](Tape &t, const Matrix &g) { t.accumulate(ia, g * c); });
}

Var affine(Var a, double c, double k)
{
	const int ia = a.id();
	Matrix out = (a.value() * c).array() + k;
	return tape_of(a).record(std::move(out), {a}, [ia, c](Tape &t, const Matrix &g) { t.accumulate(ia, g * c); });
}

Var add_row(Var a, Var r)
{
	require(r.rows() == 1 && r.cols() == a.cols(), "add_row: bias must be 1 x cols");
	const int ia = a.id(), ir = r.id();
	Matrix out = a.value().rowwise() + r.value().row(0);
	return tape_of(a).record(std::move(out), {a, r}, [ia, ir](Tape &t, const Matrix &g) {
		t.accumulate(ia, g);
		t.accumulate(ir, g.colwise().sum());
	});
}

Var matmul(Var a, Var b)
{
	require(a.cols() == b.rows(), "matmul: inner dimensions differ");
	const int ia = a.id(), ib = b.id();
	return tape_of(a).record(a.value() * b.value(), {a, b}, [ia, ib](Tape &t, const Matrix &g) {
		if (t.requires_grad(ia)) {
			t.accumulate(ia, g * t.value(ib).transpose());
		}
		if (t.requires_grad(ib)) {
			t.accumulate(ib, t.value(ia).transpose() * g);
		}
	});
}

Var matmul_bt(Var a, Var b)
{
	require(a.cols() == b.cols(), "matmul_bt: inner dimensions differ");
	const int ia = a.id(), ib = b.id();
	return tape_of(a).record(a.value() * b.value().transpose(), {a, b}, [ia, ib](Tape &t, const Matrix &g) {
		if (t.requires_grad(ia)) {
			t.accumulate(ia, g * t.value(ib));
		}
		if (t.requires_grad(ib)) {
			t.accumulate(ib, g.transpose() * t.value(ia));
		}
	});
}

Var linear(Var x, Var w, Var bias)
{
	require(x.cols() == w.cols(), "linear: input width differs from weight columns");
	require(bias.rows() == 1 && bias.cols() == w.rows(), "linear: bias must be 1 x out");
	const int ix = x.id(), iw = w.id(), ib = bias.id();
	Matrix out = x.value() * w.value().transpose();
	out.rowwise() += bias.value().row(0);
	return tape_of(x).record(std::move(out), {x, w, bias}, [ix, iw, ib](Tape &t, const Matrix &g) {
		if (t.requires_grad(ix)) {
			t.accumulate(ix, g * t.value(iw));
		}
		if (t.requires_grad(iw)) {
			t.accumulate(iw, g.transpose() * t.value(ix));
		}
		t.accumulate(ib, g.colwise().sum());
	});
}

Var tanh(Var a)
{
	const int ia = a.id();
	Matrix y = a.value().array().tanh();
	Matrix dy = 1.0 - y.array().square();
	return tape_of(a).record(std::move(y), {a}, [ia, dy = std::move(dy)](Tape &t, const Matrix &g) {
		t.accumulate(ia, g.cwiseProduct(dy));
	});
}

Var sigmoid(Var a)
{
	const int ia = a.id();
	Matrix y = (1.0 + (-a.value().array()).exp()).inverse();
	Matrix dy = y.array() * (1.0 - y.array());
	return tape_of(a).record(std::move(y), {a}, [ia, dy = std::move(dy)](Tape &t, const Matrix &g) {
		t.accumulate(ia, g.cwiseProduct(dy));
	});
}

Var gelu(Var a)
{
	constexpr double k = 0.7978845608028654; // sqrt(2/pi)
	constexpr double c = 0.044715;
	const int ia = a.id();
	const auto x = a.value().array();
	Eigen::ArrayXXd th = (k * (x + c * x.cube())).tanh();
	Matrix y = 0.5 * x * (1.0 + th);
	Matrix dy = 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th.square()) * k * (1.0 + 3.0 * c * x.square());
	return tape_of(a).record(std::move(y), {a}, [ia, dy = std::move(dy)](Tape &t, const Matrix &g) {
		t.accumulate(ia, g.cwiseProduct(dy));
	});
}

Var exp(Var a)
{
	const int ia = a.id();
	Matrix y = a.value().array().exp();
	Matrix keep = y;
	return tape_of(a).record(std::move(y), {a}, [ia, keep = std::move(keep)](Tape &t, const Matrix &g) {
		t.accumulate(ia, g.cwiseProduct(keep));
	});
}

Var log_clamped(Var a, double floor)
{
	const int ia = a.id();
	const Matrix &x = a.value();
	Matrix y = x.cwiseMax(floor).array().log();
	Matrix dy = (x.array() > floor).select(x.array().inverse(), 0.0);
	return tape_of(a).record(std::move(y), {a}, [ia, dy = std::move(dy)](Tape &t, const Matrix &g) {
		t.accumulate(ia, g.cwiseProduct(dy));
	});
}

Var sum(Var a)
{
	const int ia = a.id();
	const Eigen::Index r = a.rows(), c = a.cols();
	return tape_of(a).record(Matrix::Constant(1, 1, a.value().sum()), {a}, [ia, r, c](Tape &t, const Matrix &g) {
		t.accumulate(ia, Matrix::Constant(r, c, g(0, 0)));
	});
}

Var mean_rows(Var a)
{
	require(a.rows() > 0, "mean_rows of an empty matrix");
	const int ia = a.id();
	const Eigen::Index n = a.rows();
	Matrix out = a.value().colwise().mean();
	return tape_of(a).record(std::move(out), {a}, [ia, n](Tape &t, const Matrix &g) {
		t.accumulate(ia, g.replicate(n, 1) / static_cast<double>(n));
	});
}

Var squared_norm(Var a)
{
	const int ia = a.id();
	return tape_of(a).record(Matrix::Constant(1, 1, a.value().squaredNorm()), {a}, [ia](Tape &t, const Matrix &g) {
		t.accumulate(ia, 2.0 * g(0, 0) * t.value(ia));
	});
}

Var pick(Var a, Eigen::Index row, Eigen::Index col)
{
	require(row >= 0 && row < a.rows() && col >= 0 && col < a.cols(), "pick: index out of range");
	const int ia = a.id();
	const Eigen::Index r = a.rows(), c = a.cols();
	return tape_of(a).record(Matrix::Constant(1, 1, a.value()(row, col)), {a},
		[ia, r, c, row, col](Tape &t, const Matrix &g) {
			Matrix full = Matrix::Zero(r, c);
			full(row, col) = g(0, 0);
			t.accumulate(ia, full);
		});
}

Var rows(Var a, Eigen::Index begin, Eigen::Index count)
{
	require(begin >= 0 && count >= 0 && begin + count <= a.rows(), "rows: range out of bounds");
	const int ia = a.id();
	const Eigen::Index r = a.rows(), c = a.cols();
	return tape_of(a).record(a.value().middleRows(begin, count), {a}, [ia, r, c, begin, count](Tape &t, const Matrix &g) {
		Matrix full = Matrix::Zero(r, c);
		full.middleRows(begin, count) = g;
		t.accumulate(ia, full);
	});
}

Var cols(Var a, Eigen::Index begin, Eigen::Index count)
{
	require(begin >= 0 && count >= 0 && begin + count <= a.cols(), "cols: range out of bounds");
	const int ia = a.id();
	const Eigen::Index r = a.rows(), c = a.cols();
	return tape_of(a).record(a.value().middleCols(begin, count), {a}, [ia, r, c, begin, count](Tape &t, const Matrix &g) {
		Matrix full = Matrix::Zero(r, c);
		full.middleCols(begin, count) = g;
		t.accumulate(ia, full);
	});
}

Var concat_rows(std::span<const Var> parts)
{
	require(!parts.empty(), "concat_rows: no parts");
	const Eigen::Index c = parts.front().cols();
	Eigen::Index total = 0;
	for (const Var &p : parts) {
		require(p.cols() == c, "concat_rows: column counts differ");
		total += p.rows();
	}
	Matrix out(total, c);
	std::vector<std::pair<int, Eigen::Index>> spans;
	Eigen::Index at = 0;
	for (const Var &p : parts) {
		out.middleRows(at, p.rows()) = p.value();
		spans.emplace_back(p.id(), p.rows());
		at += p.rows();
	}
	return tape_of(parts.front()).record(std::move(out), parts, [spans = std::move(spans)](Tape &t, const Matrix &g) {
		Eigen::Index off = 0;
		for (const auto &[id, n] : spans) {
			if (t.requires_grad(id)) {
				t.accumulate(id, g.middleRows(off, n));
			}
			off += n;
		}
	});
}

Var gather_rows(Var table, std::span<const int> ids)
{
	const Matrix &tv = table.value();
	Matrix out(static_cast<Eigen::Index>(ids.size()), tv.cols());
	for (std::size_t i = 0; i < ids.size(); ++i) {
		require(ids[i] >= 0 && ids[i] < tv.rows(), "gather_rows: id out of range");
		out.row(static_cast<Eigen::Index>(i)) = tv.row(ids[i]);
	}
	const int it = table.id();
	std::vector<int> keep(ids.begin(), ids.end());
	return tape_of(table).record(std::move(out), {table}, [it, keep = std::move(keep)](Tape &t, const Matrix &g) {
		t.accumulate_rows(it, keep, g);
	});
}

namespace {

Matrix softmax_of(const Matrix &x)
{
	Matrix y = x.colwise() - x.rowwise().maxCoeff();
	y = y.array().exp();
	y.array().colwise() /= y.rowwise().sum().array();
	return y;
}

} // namespace

Var softmax_rows(Var a)
{
	const int ia = a.id();
	Matrix y = softmax_of(a.value());
	Matrix keep = y;
	return tape_of(a).record(std::move(y), {a}, [ia, keep = std::move(keep)](Tape &t, const Matrix &g) {
		Matrix gy = g.cwiseProduct(keep);
		Matrix gx = gy - keep.cwiseProduct(gy.rowwise().sum().replicate(1, keep.cols()));
		t.accumulate(ia, gx);
	});
}

Var layer_norm(Var x, Var gamma, Var beta, double eps)
{
	const Matrix &xv = x.value();
	const Eigen::Index d = xv.cols();
	require(gamma.rows() == 1 && gamma.cols() == d && beta.rows() == 1 && beta.cols() == d,
		"layer_norm: gain and bias must be 1 x width");
	Eigen::VectorXd mu = xv.rowwise().mean();
	Matrix centered = xv.colwise() - mu;
	Eigen::VectorXd inv_std = ((centered.array().square().rowwise().sum() / static_cast<double>(d)) + eps).rsqrt();
	Matrix xhat = centered.array().colwise() * inv_std.array();
	Matrix out = xhat.array().rowwise() * gamma.value().row(0).array();
	out.rowwise() += beta.value().row(0);
	const int ix = x.id(), ig = gamma.id(), ib = beta.id();
	return tape_of(x).record(std::move(out), {x, gamma, beta},
		[ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape &t, const Matrix &g) {
			const Eigen::Index width = xhat.cols();
			t.accumulate(ig, g.cwiseProduct(xhat).colwise().sum());
			t.accumulate(ib, g.colwise().sum());
			if (!t.requires_grad(ix)) {
				return;
			}
			Matrix gxhat = g.array().rowwise() * t.value(ig).row(0).array();
			Eigen::VectorXd m1 = gxhat.rowwise().mean();
			Eigen::VectorXd m2 = gxhat.cwiseProduct(xhat).rowwise().sum() / static_cast<double>(width);
			Matrix gx = gxhat.colwise() - m1;
			gx.array() -= xhat.array().colwise() * m2.array();
			gx = gx.array().colwise() * inv_std.array();
			t.accumulate(ix, gx);
		});
}

Var cross_entropy(Var logits, std::span<const int> targets)
{
	const Matrix &lv = logits.value();
	require(static_cast<Eigen::Index>(targets.size()) == lv.rows(), "cross_entropy: one target per row");
	Matrix p = softmax_of(lv);
	double loss = 0.0;
	for (std::size_t i = 0; i < targets.size(); ++i) {
		const auto r = static_cast<Eigen::Index>(i);
		require(targets[i] >= 0 && targets[i] < lv.cols(), "cross_entropy: target out of range");
		// log-sum-exp form keeps tiny probabilities exact
		const double mx = lv.row(r).maxCoeff();
		const double lse = mx + std::log((lv.row(r).array() - mx).exp().sum());
		loss += lse - lv(r, targets[i]);
	}
	for (std::size_t i = 0; i < targets.size(); ++i) {
		p(static_cast<Eigen::Index>(i), targets[i]) -= 1.0;
	}
	const int il = logits.id();
	return tape_of(logits).record(Matrix::Constant(1, 1, loss), {logits}, [il, p = std::move(p)](Tape &t, const Matrix &g) {
		t.accumulate(il, p * g(0, 0));
	});
}

Var attention(Var q, Var k, Var v, int heads, const Matrix &mask)
{
	const Matrix &qv = q.value();
	const Matrix &kv = k.value();
	const Matrix &vv = v.value();
	const Eigen::Index n = qv.rows(), m = kv.rows(), d = qv.cols();
	require(heads > 0 && d % heads == 0, "attention: width not divisible by heads");
	require(kv.cols() == d && vv.cols() == d && vv.rows() == m, "attention: q/k/v shapes disagree");
	require(mask.size() == 0 || (mask.rows() == n && mask.cols() == m), "attention: mask must be n x m");
	const Eigen::Index dh = d / heads;
	const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

	Matrix out(n, d);
	std::vector<Matrix> probs(static_cast<std::size_t>(heads));
	for (int h = 0; h < heads; ++h) {
		const Eigen::Index c0 = h * dh;
		Matrix scores = (qv.middleCols(c0, dh) * kv.middleCols(c0, dh).transpose()) * inv_sqrt;
		if (mask.size() != 0) {
			scores += mask;
		}
		probs[h] = softmax_of(scores);
		out.middleCols(c0, dh) = probs[h] * vv.middleCols(c0, dh);
	}
	const int iq = q.id(), ik = k.id(), iv = v.id();
	return tape_of(q).record(std::move(out), {q, k, v},
		[iq, ik, iv, heads, dh, inv_sqrt, probs = std::move(probs)](Tape &t, const Matrix &g) {
			const Matrix &qv = t.value(iq);
			const Matrix &kv = t.value(ik);
			const Matrix &vv = t.value(iv);
			Matrix gq = Matrix::Zero(qv.rows(), qv.cols());
			Matrix gk = Matrix::Zero(kv.rows(), kv.cols());
			Matrix gv = Matrix::Zero(vv.rows(), vv.cols());
			for (int h = 0; h < heads; ++h) {
				const Eigen::Index c0 = h * dh;
				const Matrix &p = probs[h];
				const auto go = g.middleCols(c0, dh);
				gv.middleCols(c0, dh) = p.transpose() * go;
				Matrix gp = go * vv.middleCols(c0, dh).transpose();
				Matrix gs = p.cwiseProduct(gp.colwise() - gp.cwiseProduct(p).rowwise().sum());
				gs *= inv_sqrt;
				gq.middleCols(c0, dh) = gs * kv.middleCols(c0, dh);
				gk.middleCols(c0, dh) = gs.transpose() * qv.middleCols(c0, dh);
			}
			t.accumulate(iq, gq);
			t.accumulate(ik, gk);
			t.accumulate(iv, gv);
		});
}

} // namespace ad
} // namespace styled2t
