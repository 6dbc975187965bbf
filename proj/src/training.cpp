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
#include "styled2t/training.hpp"

#include "styled2t/checkpoint.hpp"
#include "styled2t/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <ostream>

namespace styled2t {

void TrainConfig::validate() const
{
	for (double w : {alpha, beta, gamma, delta}) {
		if (!(w >= 0.0)) {
			throw Error(ErrorKind::ConfigInvalid, "loss weights must be non-negative");
		}
	}
	if (batch_per_style < 1) {
		throw Error(ErrorKind::ConfigInvalid, "batch_per_style must be at least 1");
	}
	if (epochs < 0 || iterations < 0) {
		throw Error(ErrorKind::ConfigInvalid, "epochs and iterations must be non-negative");
	}
	if (!(learning_rate > 0.0)) {
		throw Error(ErrorKind::ConfigInvalid, "learning_rate must be positive");
	}
	if (max_len < 1) {
		throw Error(ErrorKind::ConfigInvalid, "max_len must be at least 1");
	}
	model.validate();
	flags.validate();
	gate.validate();
}

namespace {

// Decodes a candidate from a fixed memory and scores it with the gate.
PseudoTriplet pseudo_from_memory(const Model &model, const Matrix &memory, const PreparedInstance &inst,
	const PreparedInstance &partner, const GateArtifacts &gate)
{
	PseudoTriplet p;
	p.reference_ids = partner.ref_ids;
	p.reference_style = partner.style;
	// Anything at or beyond L_max fails the length condition, so decoding stops there.
	const int cap = std::min(gate.config.max_length, model.config().max_positions - 1);
	p.candidate_ids = greedy_decode(memory, model.table, model.decoder, cap).tokens;
	const Tokens candidate = model.vocab().decode(p.candidate_ids);
	p.verdict = assign_confidence(candidate, partner.ref_tokens, inst.pairs, gate.lm, gate.classifier, gate.config,
		partner.style);
	return p;
}

ad::Var mean_of(ad::Tape &tape, const std::vector<ad::Var> &terms, std::size_t n)
{
	if (terms.empty()) {
		return tape.constant(Matrix::Zero(1, 1));
	}
	ad::Var acc = terms.front();
	for (std::size_t i = 1; i < terms.size(); ++i) {
		acc = ad::add(acc, terms[i]);
	}
	return ad::scale(acc, 1.0 / static_cast<double>(n));
}

} // namespace

PseudoTriplet make_pseudo_triplet(const Model &model, const PreparedInstance &inst, const PreparedInstance &partner,
	const GateArtifacts &gate)
{
	return pseudo_from_memory(model, model.memory(inst, partner.ref_ids, partner.style), inst, partner, gate);
}

BatchLoss total_loss(ad::Tape &tape, const Model &model, std::span<const PreparedInstance> batch,
	const GateArtifacts *gate, const TrainConfig &config, Rng &rng, const StyleCenters *fixed_centers)
{
	if (batch.empty()) {
		throw Error(ErrorKind::EmptyInput, "empty batch");
	}
	const std::size_t n = batch.size();
	const int num_styles = model.config().num_styles;
	const AblationFlags &flags = model.flags();

	std::vector<ad::Var> gen, plan, cla, clu, pseudo;
	std::vector<ad::Var> encoded(n), styles(n);
	std::vector<Matrix> style_values(n);
	std::vector<int> labels(n);
	for (std::size_t i = 0; i < n; ++i) {
		const PreparedInstance &inst = batch[i];
		const ad::Var refined = model.refine(tape, inst);
		if (!flags.no_gru && inst.plan) {
			plan.push_back(planning_loss(refined, *inst.plan, model.planner));
		}
		encoded[i] = model.encode(tape, inst, model.plan_for(inst, refined.value()));
		styles[i] = model.style(tape, inst.ref_ids, inst.style).style;
		style_values[i] = styles[i].value();
		labels[i] = inst.style;
		gen.push_back(generation_loss(style_memory(encoded[i], styles[i]), inst.target_ids, model.table, model.decoder));
		cla.push_back(style_cla_loss(classify_style(styles[i], model.style_head), inst.style));
	}

	// Centers come from this batch and act as constants.
	const StyleCenters centers = fixed_centers ? *fixed_centers : style_centers(style_values, labels, num_styles);
	const bool all_centers = std::all_of(centers.begin(), centers.end(), [](const auto &c) { return c.has_value(); });
	if (all_centers || config.effective_gamma() > 0.0) {
		for (std::size_t i = 0; i < n; ++i) {
			clu.push_back(style_clu_loss(styles[i], labels[i], centers, num_styles));
		}
	}

	LossBreakdown terms;
	if (gate != nullptr && !flags.no_pseudo) {
		for (std::size_t i = 0; i < n; ++i) {
			std::vector<std::size_t> partners;
			for (std::size_t j = 0; j < n; ++j) {
				if (batch[j].style != batch[i].style) {
					partners.push_back(j);
				}
			}
			if (partners.empty()) {
				continue;
			}
			const std::size_t j = partners[std::uniform_int_distribution<std::size_t>(0, partners.size() - 1)(rng)];
			// s of the partner's reference is already on the tape.
			const ad::Var memory = style_memory(encoded[i], styles[j]);
			const PseudoTriplet p = pseudo_from_memory(model, memory.value(), batch[i], batch[j], *gate);
			++terms.pseudo_candidates;
			if (p.verdict.tau) {
				++terms.pseudo_accepted;
				pseudo.push_back(generation_loss(memory, p.candidate_ids, model.table, model.decoder));
			}
		}
	}

	const ad::Var l_gen = mean_of(tape, gen, n);
	const ad::Var l_plan = mean_of(tape, plan, n);
	const ad::Var l_cla = mean_of(tape, cla, n);
	const ad::Var l_clu = mean_of(tape, clu, n);
	const ad::Var l_pseudo = mean_of(tape, pseudo, n);
	ad::Var total = l_gen;
	const std::pair<ad::Var, double> weighted[] = {{l_plan, config.alpha}, {l_cla, config.effective_beta()},
		{l_clu, config.effective_gamma()}, {l_pseudo, config.effective_delta()}};
	for (const auto &[term, w] : weighted) {
		if (w != 0.0) {
			total = ad::add(total, ad::scale(term, w));
		}
	}

	terms.gen = l_gen.scalar();
	terms.plan = l_plan.scalar();
	terms.cla = l_cla.scalar();
	terms.clu = l_clu.scalar();
	terms.pseudo = l_pseudo.scalar();
	terms.total = total.scalar();
	terms.tau_rate = terms.pseudo_candidates == 0
		? 0.0
		: static_cast<double>(terms.pseudo_accepted) / static_cast<double>(terms.pseudo_candidates);
	return {total, terms, centers};
}

std::string to_json_line(const StepMetrics &m)
{
	nlohmann::ordered_json j;
	j["step"] = m.step;
	j["epoch"] = m.epoch;
	j["L_gen"] = m.terms.gen;
	j["L_plan"] = m.terms.plan;
	j["L_cla"] = m.terms.cla;
	j["L_clu"] = m.terms.clu;
	j["L_pseudo"] = m.terms.pseudo;
	j["tau_rate"] = m.terms.tau_rate;
	j["total"] = m.terms.total;
	j["grad_norm"] = m.grad_norm;
	return j.dump();
}

CorpusIndex make_corpus_index(std::span<const Triplet> training_corpus)
{
	std::vector<Tokens> texts;
	for (const Triplet &t : training_corpus) {
		if (t.target) {
			texts.push_back(*t.target);
		}
	}
	return CorpusIndex(std::move(texts));
}

std::vector<PreparedInstance> prepare_all(const Model &model, std::span<const Triplet> corpus, CorpusIndex &index)
{
	std::vector<PreparedInstance> out;
	out.reserve(corpus.size());
	for (const Triplet &t : corpus) {
		out.push_back(model.prepare(t, index));
	}
	return out;
}

TrainResult train(std::span<const Triplet> corpus, const TrainConfig &config, const TrainHooks &hooks)
{
	config.validate();
	if (corpus.empty()) {
		throw Error(ErrorKind::EmptyCorpus, "training corpus is empty");
	}
	const int num_styles = config.model.num_styles;
	for (const Triplet &t : corpus) {
		if (!t.target) {
			throw Error(ErrorKind::PlanUnderivable, "every training triplet needs a target");
		}
	}
	const auto by_style = indices_by_style(corpus, num_styles);

	TrainResult result;
	result.model = std::make_unique<Model>(Vocabulary::build(corpus), config.model, config.flags);
	Model &model = *result.model;
	CorpusIndex index = make_corpus_index(corpus);
	const std::vector<PreparedInstance> prepared = prepare_all(model, corpus, index);
	result.gate = GateArtifacts::fit(corpus, num_styles, config.classifier, config.calibrate_gate, config.gate);

	Adam optimizer(model.params(), {config.learning_rate, 0.9, 0.999, 1e-8, config.clip_norm});
	Rng rng(config.seed);
	std::size_t smallest = corpus.size();
	for (const auto &ids : by_style) {
		smallest = std::min(smallest, ids.size());
	}
	const auto b = static_cast<std::size_t>(config.batch_per_style);
	const int iterations = config.iterations > 0 ? config.iterations : static_cast<int>((smallest + b - 1) / b);

	long step = 0;
	std::vector<std::vector<std::size_t>> order = by_style;
	std::vector<PreparedInstance> batch;
	for (int epoch = 0; epoch < config.epochs; ++epoch) {
		for (auto &o : order) {
			std::shuffle(o.begin(), o.end(), rng);
		}
		for (int it = 0; it < iterations; ++it) {
			batch.clear();
			for (const auto &o : order) {
				for (std::size_t k = 0; k < b; ++k) {
					batch.push_back(prepared[o[(static_cast<std::size_t>(it) * b + k) % o.size()]]);
				}
			}
			model.params().zero_grad();
			ad::Tape tape;
			const BatchLoss loss = total_loss(tape, model, batch, &result.gate, config, rng);
			tape.backward(loss.total);
			StepMetrics m;
			m.step = step++;
			m.epoch = epoch;
			m.terms = loss.terms;
			m.grad_norm = optimizer.step();
			if (hooks.metrics != nullptr) {
				*hooks.metrics << to_json_line(m) << '\n';
			}
			result.log.push_back(m);
		}
		if (hooks.checkpoint_dir) {
			save_checkpoint(*hooks.checkpoint_dir, model, config, result.gate, corpus);
		}
		if (hooks.on_epoch) {
			hooks.on_epoch(epoch, model);
		}
	}
	return result;
}

EvaluationReport evaluate_model(const Model &model, const TrainConfig &config, std::span<const Triplet> train,
	std::span<const Triplet> test, int max_len, std::uint64_t seed)
{
	const int num_styles = config.model.num_styles;
	std::vector<Tokens> texts;
	std::vector<int> labels;
	for (const Triplet &t : train) {
		texts.push_back(*t.target);
		labels.push_back(t.style);
	}
	// A separate fit from the gate's classifier.
	ClassifierOptions opts = config.classifier;
	opts.seed += 1;
	const HashClassifier classifier = HashClassifier::train(texts, labels, num_styles, opts);
	CorpusIndex index = make_corpus_index(train);
	const std::vector<PreparedInstance> prepared = prepare_all(model, test, index);
	const GenerateFn gen = [&](std::size_t i, const Triplet &, const Tokens &reference, int style) {
		return model.vocab().decode(model.generate(prepared[i], model.vocab().encode(reference), style, max_len).tokens);
	};
	return evaluate(test, train, num_styles, gen, classifier, seed);
}

} // namespace styled2t
