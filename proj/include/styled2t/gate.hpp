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

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <unordered_map>

namespace styled2t {

/*
 * Interpolated 5-gram model. Orders 2..5 are maximum-likelihood estimates,
 * the unigram is add-one smoothed over the vocabulary (training types plus
 * EOS and UNK). Histories are padded with BOS. An order whose context was
 * never seen contributes nothing and its weight is redistributed over the
 * remaining orders, so P(. | context) always sums to one.
 */
class NgramLM {
public:
	static constexpr int kOrder = 5;
	static constexpr const char *kBos = "<s>";
	static constexpr const char *kEos = "</s>";
	static constexpr const char *kUnk = "<unk>";

	static NgramLM train(std::span<const Tokens> targets);

	/// P(word | history); `history` holds the preceding tokens without padding.
	double prob(std::span<const std::string> history, const std::string &word) const;
	/// exp of the mean negative log probability over the tokens and the closing EOS.
	double perplexity(const Tokens &text) const;

	/// Size of the predicted vocabulary, including EOS and UNK.
	int vocab_size() const { return static_cast<int>(vocab_.size()); }
	const std::vector<std::string> &vocabulary() const { return vocab_; }
	const std::array<double, kOrder> &lambdas() const { return lambdas_; }
	long long token_count() const { return total_; }

	void save(const std::filesystem::path &path) const;
	static NgramLM load(const std::filesystem::path &path);

private:
	void add_count(int order, const std::string &key, long long n);
	void finalize();

	std::array<double, kOrder> lambdas_{0.2, 0.2, 0.2, 0.2, 0.2};
	// counts_[n-1]: n-gram counts; contexts_[n-1]: counts of the (n-1)-token histories.
	std::array<std::unordered_map<std::string, long long>, kOrder> counts_;
	std::array<std::unordered_map<std::string, long long>, kOrder> contexts_;
	std::vector<std::string> vocab_;
	long long total_ = 0;
};

struct ClassifierOptions {
	int buckets = 1 << 16;
	bool bigrams = true;
	int epochs = 10;
	double learning_rate = 0.5;
	std::uint64_t seed = 1;
};

/// Multinomial logistic regression over averaged hashed 1-/2-gram features.
class HashClassifier {
public:
	static HashClassifier train(std::span<const Tokens> texts, std::span<const int> labels, int num_styles,
		const ClassifierOptions &options = {});

	std::vector<double> predict_proba(const Tokens &text) const;
	int predict(const Tokens &text) const;
	int num_styles() const { return static_cast<int>(weights_.rows()); }
	const ClassifierOptions &options() const { return options_; }

	void save(const std::filesystem::path &path) const;
	static HashClassifier load(const std::filesystem::path &path);

private:
	std::vector<int> features(const Tokens &text) const;
	Eigen::VectorXd logits(const std::vector<int> &features) const;

	ClassifierOptions options_;
	Eigen::MatrixXd weights_; // styles x buckets
	Eigen::VectorXd bias_;
};

/// Fraction of pairs whose value occurs contiguously in `text`.
double coverage(std::span<const std::string> text, std::span<const AttributeValuePair> pairs);

struct GateConfig {
	int min_length = 60;
	int max_length = 160;
	double max_perplexity = 50.0;
	double min_coverage = 0.95;
	/// Compare against the reference's known label instead of classifying it.
	bool use_reference_label = false;

	void validate() const;
};

struct GateScores {
	int length = 0;
	double perplexity = 0.0;
	int candidate_style = -1;
	int reference_style = -1;
	double coverage = 0.0;
};

struct ConfidenceVerdict {
	bool tau = false;
	bool length_ok = false;
	bool ppl_ok = false;
	bool style_ok = false;
	bool coverage_ok = false;
	GateScores scores;
};

/// The conjunction of strict conditions on already computed scores.
ConfidenceVerdict decide(const GateScores &scores, const GateConfig &config);

ConfidenceVerdict assign_confidence(const Tokens &candidate, const Tokens &reference,
	std::span<const AttributeValuePair> pairs, const NgramLM &lm, const HashClassifier &classifier,
	const GateConfig &config, std::optional<int> reference_label = std::nullopt);

/// Length bounds bracketing the central 99% of training lengths, perplexity
/// threshold at the 95th percentile of training perplexity; coverage is kept.
GateConfig calibrate_gate(std::span<const Tokens> targets, const NgramLM &lm, const GateConfig &base = {});

/// LM, classifier and thresholds used by the pseudo-triplet gate.
struct GateArtifacts {
	NgramLM lm;
	HashClassifier classifier;
	GateConfig config;

	static GateArtifacts fit(std::span<const Triplet> corpus, int num_styles, const ClassifierOptions &options,
		bool calibrate, const GateConfig &base = {});
	void save(const std::filesystem::path &dir) const;
	static GateArtifacts load(const std::filesystem::path &dir);
};

} // namespace styled2t
