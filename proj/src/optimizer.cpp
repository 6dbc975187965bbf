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
#include "styled2t/optimizer.hpp"

#include <cmath>

namespace styled2t {

Adam::Adam(ParameterSet &params, AdamOptions options) : params_(params), opt_(options)
{
	for (std::size_t i = 0; i < params_.size(); ++i) {
		const Matrix &v = params_[i].value;
		m_.push_back(Matrix::Zero(v.rows(), v.cols()));
		v_.push_back(Matrix::Zero(v.rows(), v.cols()));
	}
}

double Adam::step()
{
	const double norm = params_.grad_norm();
	double factor = 1.0;
	if (opt_.clip_norm > 0.0 && norm > opt_.clip_norm) {
		factor = opt_.clip_norm / norm;
	}
	++t_;
	const double bc1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
	const double bc2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
	for (std::size_t i = 0; i < params_.size(); ++i) {
		ad::Parameter &p = params_[i];
		if (p.grad.size() == 0) {
			continue;
		}
		const Matrix g = p.grad * factor;
		m_[i] = opt_.beta1 * m_[i] + (1.0 - opt_.beta1) * g;
		v_[i] = opt_.beta2 * v_[i] + (1.0 - opt_.beta2) * g.cwiseAbs2();
		p.value.array() -= opt_.learning_rate * (m_[i].array() / bc1) /
			((v_[i].array() / bc2).sqrt() + opt_.epsilon);
	}
	return norm;
}

} // namespace styled2t
