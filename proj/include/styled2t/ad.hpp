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

#include <Eigen/Dense>

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace styled2t {

using Matrix = Eigen::MatrixXd;

namespace ad {

/// A trainable tensor. Gradients from every tape that references the
/// parameter are summed into `grad`.
struct Parameter {
	std::string name;
	Matrix value;
	Matrix grad;

	void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while its tape lives.
class Var {
public:
	Var() = default;

	Tape *tape() const { return tape_; }
	int id() const { return id_; }
	bool valid() const { return tape_ != nullptr; }

	const Matrix &value() const;
	Eigen::Index rows() const { return value().rows(); }
	Eigen::Index cols() const { return value().cols(); }
	/// Value of a 1x1 node.
	double scalar() const;

private:
	friend class Tape;
	Var(Tape *tape, int id) : tape_(tape), id_(id) {}

	Tape *tape_ = nullptr;
	int id_ = -1;
};

/*
 * Reverse-mode tape. Nodes are appended in evaluation order, so a reverse
 * sweep over node ids is a valid topological order for backpropagation.
 * With recording disabled the tape only keeps forward values.
 */
class Tape {
public:
	using BackwardFn = std::function<void(Tape &, const Matrix &)>;

	explicit Tape(bool record_gradients = true) : record_(record_gradients) {}
	Tape(const Tape &) = delete;
	Tape &operator=(const Tape &) = delete;

	bool recording() const { return record_; }
	std::size_t size() const { return nodes_.size(); }

	Var constant(Matrix value);
	Var parameter(Parameter &p);

	const Matrix &value(int id) const;
	bool requires_grad(int id) const { return nodes_[id].requires_grad; }

	/// Appends an op output. `fn` receives the output gradient and must
	/// push contributions into the inputs via accumulate().
	Var record(Matrix value, std::span<const Var> inputs, BackwardFn fn);
	Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn)
	{
		return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(fn));
	}

	void accumulate(int id, const Matrix &g);
	/// grad.row(rows[i]) += g.row(i)
	void accumulate_rows(int id, std::span<const int> rows, const Matrix &g);

	/// Backpropagates from a 1x1 node with seed gradient `seed`.
	void backward(Var root, double seed = 1.0);

private:
	struct Node {
		Matrix value;
		Matrix grad;
		Parameter *param = nullptr;
		bool requires_grad = false;
		BackwardFn backward;
	};

	Matrix &grad_slot(Node &n);

	std::deque<Node> nodes_;
	bool record_;
};

// Elementwise and shape ops.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double c);
/// c * a + k, elementwise.
Var affine(Var a, double c, double k);
/// a (n x m) plus row vector r (1 x m) added to every row.
Var add_row(Var a, Var r);
Var matmul(Var a, Var b);
/// a * b^T
Var matmul_bt(Var a, Var b);
/// a * W^T + bias, the usual dense layer with W stored as out x in.
Var linear(Var x, Var w, Var bias);

Var tanh(Var a);
Var sigmoid(Var a);
Var gelu(Var a);
Var exp(Var a);
/// log(max(a, floor)); gradient is zero where the floor is active.
Var log_clamped(Var a, double floor);

Var sum(Var a);
Var mean_rows(Var a);
Var squared_norm(Var a);
Var pick(Var a, Eigen::Index row, Eigen::Index col);

Var rows(Var a, Eigen::Index begin, Eigen::Index count);
Var cols(Var a, Eigen::Index begin, Eigen::Index count);
Var concat_rows(std::span<const Var> parts);
Var gather_rows(Var table, std::span<const int> ids);

Var softmax_rows(Var a);
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);

/// Sum over rows of -log softmax(logits.row(i))[targets[i]].
Var cross_entropy(Var logits, std::span<const int> targets);

/*
 * Multi-head scaled dot-product attention. q is n x d, k and v are m x d,
 * d divisible by heads. `mask` is either empty or n x m and is added to the
 * scores before the softmax (use -infinity to block a position).
 */
Var attention(Var q, Var k, Var v, int heads, const Matrix &mask);

} // namespace ad
} // namespace styled2t
