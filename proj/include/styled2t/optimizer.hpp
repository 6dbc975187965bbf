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

#include "styled2t/params.hpp"

namespace styled2t {

struct AdamOptions {
	double learning_rate = 1e-4;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double epsilon = 1e-8;
	/// Global gradient-norm clip; <= 0 disables clipping.
	double clip_norm = 1.0;
};

class Adam {
public:
	Adam(ParameterSet &params, AdamOptions options);

	/// Applies one update from the gradients currently stored in the set.
	/// Returns the pre-clip gradient norm.
	double step();

	long steps() const { return t_; }

private:
	ParameterSet &params_;
	AdamOptions opt_;
	std::vector<Matrix> m_, v_;
	long t_ = 0;
};

} // namespace styled2t
