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

#include "styled2t/corpus.hpp"

#include <cstdint>

namespace styled2t {

/*
 * Two-style product-description corpus. Style 0 is formal, style 1 is
 * informal; the two styles share no marker token and use different sentence
 * templates. Every value of an instance is mentioned in its target, in one
 * global attribute precedence order, so ground-truth plans are full
 * permutations that depend on the data alone.
 */
struct GeneratorConfig {
	std::vector<int> count_per_style{1000, 1000};
	int num_attributes = 16;
	int values_per_attribute = 6;
	int min_pairs = 3;
	int max_pairs = 6;
	/// Probability that an attribute is drawn from the style's own half of
	/// the pool rather than the whole pool. 0 makes content style-independent.
	double style_content_bias = 0.0;
	std::uint64_t seed = 7;
};

std::vector<Triplet> generate_synthetic_corpus(const GeneratorConfig &config);

/// Marker tokens used by the templates of one style.
Tokens style_marker_tokens(int style);

struct CorpusSplit {
	std::vector<Triplet> train;
	std::vector<Triplet> test;
};

/// Moves the last `test_per_style` samples of each style into the test split.
CorpusSplit split_per_style(const std::vector<Triplet> &corpus, int num_styles, int test_per_style);

} // namespace styled2t
