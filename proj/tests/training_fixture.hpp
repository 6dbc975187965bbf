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

#include "styled2t/synthetic.hpp"
#include "styled2t/training.hpp"

#include <limits>
#include <memory>
#include <vector>

namespace styled2t::testing {

/// A tiny model over a small synthetic corpus, for loss and gradient tests.
struct TinySetup {
	std::vector<Triplet> corpus;
	TrainConfig config;
	std::unique_ptr<Model> model;
	std::vector<PreparedInstance> prepared;

	/// `batch_per_style` samples of each style, starting at `offset`.
	std::vector<PreparedInstance> batch(int batch_per_style, int offset = 0) const
	{
		std::vector<PreparedInstance> out;
		for (int style = 0; style < 2; ++style) {
			int taken = 0;
			for (std::size_t i = static_cast<std::size_t>(offset); i < prepared.size() && taken < batch_per_style; ++i) {
				if (prepared[i].style == style) {
					out.push_back(prepared[i]);
					++taken;
				}
			}
		}
		return out;
	}
};

/// d = 8, one encoder and decoder layer, two heads; pairs per instance capped at `max_pairs`.
inline TinySetup make_tiny_setup(const AblationFlags &flags = {}, int max_pairs = 4, int per_style = 12)
{
	TinySetup s;
	GeneratorConfig gen;
	gen.count_per_style = {per_style, per_style};
	gen.min_pairs = max_pairs;
	gen.max_pairs = max_pairs;
	gen.seed = 3;
	s.corpus = generate_synthetic_corpus(gen);
	s.config.model.shape = {8, 1, 2, 16};
	s.config.model.max_positions = 128;
	s.config.model.init_std = 0.3;
	s.config.flags = flags;
	s.model = std::make_unique<Model>(Vocabulary::build(s.corpus), s.config.model, flags);
	CorpusIndex index = make_corpus_index(s.corpus);
	s.prepared = prepare_all(*s.model, s.corpus, index);
	return s;
}

/// A gate that accepts every non-empty candidate: unbounded thresholds and a
/// classifier whose bias sends every text to style 0, so styles always agree.
inline GateArtifacts accept_all_gate(const std::vector<Triplet> &corpus)
{
	std::vector<Tokens> texts;
	std::vector<int> labels;
	for (const Triplet &t : corpus) {
		texts.push_back(*t.target);
		labels.push_back(0);
	}
	labels.back() = 1;
	ClassifierOptions o;
	o.epochs = 1;
	o.learning_rate = 1e-3;
	GateArtifacts g{NgramLM::train(texts), HashClassifier::train(texts, labels, 2, o), {}};
	g.config.min_length = 0;
	g.config.max_length = 1 << 20;
	g.config.max_perplexity = std::numeric_limits<double>::max();
	g.config.min_coverage = -1.0;
	return g;
}

} // namespace styled2t::testing
