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

#include "styled2t/gate.hpp"

#include <functional>

namespace styled2t {

/// Fraction of texts whose predicted style equals the intended one.
double style_accuracy(std::span<const Tokens> texts, std::span<const int> intended, const HashClassifier &classifier);

/// LCS-based F1 between two non-empty sequences.
double rouge_l(const Tokens &candidate, const Tokens &reference);

/// Corpus-level BLEU-4: uniform weights, clipped counts, brevity penalty, no smoothing.
double bleu_4(std::span<const Tokens> candidates, std::span<const Tokens> references);

struct EvaluationRow {
	std::size_t instance = 0;
	int style = 0;             // intended style of this generation
	bool ground_truth = false; // style matches the instance's own target
	Tokens text;
	int predicted_style = -1;
	double coverage = 0.0;
	std::optional<double> rouge_l;
};

struct EvaluationReport {
	double style_accuracy = 0.0;
	double coverage = 0.0;
	double rouge_l = 0.0;
	double bleu_4 = 0.0;
	/// Style accuracy restricted to generations intended for each style.
	std::vector<double> style_accuracy_by_style;
	std::vector<EvaluationRow> rows;

	/// Aggregates are percent-scaled in the JSON output.
	std::string to_json(bool include_rows = true) const;
};

/// Produces a text for `instance` in the style of `reference` (whose style id is `style`).
using GenerateFn = std::function<Tokens(std::size_t index, const Triplet &instance, const Tokens &reference, int style)>;

/*
 * Generates every test instance once per style. The reference for each style
 * is drawn, seeded, from the training split of that style. ROUGE-L and BLEU-4
 * use only generations in the instance's own style; style accuracy and
 * coverage use all of them.
 */
EvaluationReport evaluate(std::span<const Triplet> test, std::span<const Triplet> train, int num_styles,
	const GenerateFn &generate, const HashClassifier &classifier, std::uint64_t seed);

} // namespace styled2t
