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

#include "styled2t/evaluation.hpp"
#include "styled2t/gate.hpp"
#include "styled2t/model.hpp"
#include "styled2t/optimizer.hpp"

#include <functional>
#include <iosfwd>
#include <memory>

namespace styled2t {

struct TrainConfig {
	// Weights of the planning, classifier, clustering and pseudo losses.
	double alpha = 1.0;
	double beta = 1.0;
	double gamma = 1.0;
	double delta = 0.1;
	int batch_per_style = 8;
	int epochs = 10;
	/// Iterations per epoch; 0 means ceil(smallest style count / batch_per_style).
	int iterations = 0;
	double learning_rate = 1e-4;
	double clip_norm = 1.0;
	std::uint64_t seed = 13;
	/// Decoding cap for inference.
	int max_len = 200;

	ModelConfig model;
	AblationFlags flags;

	/// Fit gate thresholds to the training targets instead of using `gate` verbatim.
	bool calibrate_gate = true;
	GateConfig gate;
	ClassifierOptions classifier;

	void validate() const;
	double effective_beta() const { return flags.no_style_constraints ? 0.0 : beta; }
	double effective_gamma() const { return flags.no_style_constraints ? 0.0 : gamma; }
	double effective_delta() const { return flags.no_pseudo ? 0.0 : delta; }
};

struct LossBreakdown {
	double gen = 0.0;
	double plan = 0.0;
	double cla = 0.0;
	double clu = 0.0;
	double pseudo = 0.0;
	double tau_rate = 0.0;
	double total = 0.0;
	int pseudo_candidates = 0;
	int pseudo_accepted = 0;
};

struct BatchLoss {
	ad::Var total;
	LossBreakdown terms;
	StyleCenters centers; // the constants used by the clustering term
};

/// A gated pseudo sample: the instance rendered in the style of `reference`.
struct PseudoTriplet {
	std::vector<int> reference_ids;
	int reference_style = 0;
	std::vector<int> candidate_ids;
	ConfidenceVerdict verdict;
};

/// Greedy generation of `inst` in the style of a reference plus its gate verdict.
PseudoTriplet make_pseudo_triplet(const Model &model, const PreparedInstance &inst, const PreparedInstance &partner,
	const GateArtifacts &gate);

/// The combined objective over one batch; every term is averaged over the batch.
/// `gate` may be null, in which case no pseudo samples are drawn. `rng` picks partners.
/// Clustering centers are batch means unless `centers` supplies them.
BatchLoss total_loss(ad::Tape &tape, const Model &model, std::span<const PreparedInstance> batch,
	const GateArtifacts *gate, const TrainConfig &config, Rng &rng, const StyleCenters *centers = nullptr);

struct StepMetrics {
	long step = 0;
	int epoch = 0;
	LossBreakdown terms;
	double grad_norm = 0.0;
};

std::string to_json_line(const StepMetrics &m);

struct TrainHooks {
	/// Receives one JSON line per iteration.
	std::ostream *metrics = nullptr;
	/// When set, a checkpoint is written here after every epoch.
	std::optional<std::filesystem::path> checkpoint_dir;
	std::function<void(int epoch, const Model &)> on_epoch;
};

struct TrainResult {
	std::unique_ptr<Model> model;
	GateArtifacts gate;
	std::vector<StepMetrics> log;
};

/// Per-style batches, all losses, pseudo triplets and Adam updates for the configured epochs.
TrainResult train(std::span<const Triplet> corpus, const TrainConfig &config, const TrainHooks &hooks = {});

/// Prepares every triplet against a corpus index built from the training targets.
std::vector<PreparedInstance> prepare_all(const Model &model, std::span<const Triplet> corpus,
	CorpusIndex &index);
CorpusIndex make_corpus_index(std::span<const Triplet> training_corpus);

/// Greedy generation over `test` scored by a classifier fit to `train` with seed + 1.
EvaluationReport evaluate_model(const Model &model, const TrainConfig &config, std::span<const Triplet> train,
	std::span<const Triplet> test, int max_len, std::uint64_t seed);

} // namespace styled2t
