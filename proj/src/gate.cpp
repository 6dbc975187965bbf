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
#include "styled2t/gate.hpp"

#include "styled2t/errors.hpp"
#include "styled2t/params.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace styled2t {

namespace {

std::string key_of(std::span<const std::string> tokens)
{
	std::string k;
	for (std::size_t i = 0; i < tokens.size(); ++i) {
		if (i) {
			k += ' ';
		}
		k += tokens[i];
	}
	return k;
}

template <class Map>
long long lookup(const Map &m, const std::string &key)
{
	auto it = m.find(key);
	return it == m.end() ? 0 : it->second;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull)
{
	for (unsigned char c : s) {
		h ^= c;
		h *= 1099511628211ull;
	}
	return h;
}

// Nearest-rank quantile of sorted data.
template <class T>
T quantile(const std::vector<T> &sorted, double q)
{
	const auto n = static_cast<double>(sorted.size());
	auto idx = static_cast<std::size_t>(std::ceil(q * n));
	idx = std::clamp<std::size_t>(idx, 1, sorted.size()) - 1;
	return sorted[idx];
}

} // namespace

void NgramLM::add_count(int order, const std::string &key, long long n)
{
	counts_[static_cast<std::size_t>(order - 1)][key] += n;
}

void NgramLM::finalize()
{
	for (auto &c : contexts_) {
		c.clear();
	}
	std::set<std::string> types;
	total_ = 0;
	for (int n = 1; n <= kOrder; ++n) {
		for (const auto &[key, count] : counts_[static_cast<std::size_t>(n - 1)]) {
			const auto cut = key.rfind(' ');
			const std::string ctx = (n == 1 || cut == std::string::npos) ? std::string() : key.substr(0, cut);
			contexts_[static_cast<std::size_t>(n - 1)][ctx] += count;
			if (n == 1) {
				types.insert(key);
				total_ += count;
			}
		}
	}
	types.insert(kEos);
	types.insert(kUnk);
	vocab_.assign(types.begin(), types.end());
}

NgramLM NgramLM::train(std::span<const Tokens> targets)
{
	if (targets.empty()) {
		throw Error(ErrorKind::EmptyCorpus, "language model needs at least one training text");
	}
	NgramLM lm;
	for (const Tokens &t : targets) {
		std::vector<std::string> padded(kOrder - 1, kBos);
		padded.insert(padded.end(), t.begin(), t.end());
		padded.emplace_back(kEos);
		for (std::size_t i = kOrder - 1; i < padded.size(); ++i) {
			for (int n = 1; n <= kOrder; ++n) {
				const std::span<const std::string> gram(padded.data() + i - (n - 1), static_cast<std::size_t>(n));
				lm.add_count(n, key_of(gram), 1);
			}
		}
	}
	lm.finalize();
	return lm;
}

double NgramLM::prob(std::span<const std::string> history, const std::string &word) const
{
	const std::string &w = lookup(counts_[0], word) > 0 || word == kEos ? word : std::string(kUnk);
	std::vector<std::string> padded(kOrder - 1, kBos);
	const std::size_t take = std::min<std::size_t>(history.size(), kOrder - 1);
	for (std::size_t i = history.size() - take; i < history.size(); ++i) {
		padded.push_back(lookup(counts_[0], history[i]) > 0 ? history[i] : std::string(kUnk));
	}
	const double unigram = (static_cast<double>(lookup(counts_[0], w)) + 1.0) /
		(static_cast<double>(total_) + static_cast<double>(vocab_.size()));
	double mass = lambdas_[0] * unigram;
	double weight = lambdas_[0];
	for (int n = 2; n <= kOrder; ++n) {
		const std::span<const std::string> ctx(padded.data() + padded.size() - (n - 1), static_cast<std::size_t>(n - 1));
		const std::string ctx_key = key_of(ctx);
		const long long c = lookup(contexts_[static_cast<std::size_t>(n - 1)], ctx_key);
		if (c == 0) {
			continue;
		}
		const long long cw = lookup(counts_[static_cast<std::size_t>(n - 1)], ctx_key + ' ' + w);
		mass += lambdas_[static_cast<std::size_t>(n - 1)] * static_cast<double>(cw) / static_cast<double>(c);
		weight += lambdas_[static_cast<std::size_t>(n - 1)];
	}
	return mass / weight;
}

double NgramLM::perplexity(const Tokens &text) const
{
	if (text.empty()) {
		throw Error(ErrorKind::EmptyText, "perplexity of an empty text");
	}
	double nll = 0.0;
	const std::span<const std::string> all(text);
	for (std::size_t i = 0; i <= text.size(); ++i) {
		const std::string &w = i < text.size() ? text[i] : std::string(kEos);
		nll -= std::log(prob(all.first(i), w));
	}
	return std::exp(nll / static_cast<double>(text.size() + 1));
}

void NgramLM::save(const std::filesystem::path &path) const
{
	std::ofstream out(path);
	if (!out) {
		throw Error(ErrorKind::IoError, "cannot write " + path.string());
	}
	out.precision(17);
	out << "lambdas";
	for (double l : lambdas_) {
		out << '\t' << l;
	}
	out << '\n';
	for (int n = 1; n <= kOrder; ++n) {
		const auto &m = counts_[static_cast<std::size_t>(n - 1)];
		std::map<std::string, long long> sorted(m.begin(), m.end());
		for (const auto &[key, count] : sorted) {
			out << n << '\t' << key << '\t' << count << '\n';
		}
	}
}

NgramLM NgramLM::load(const std::filesystem::path &path)
{
	std::ifstream in(path);
	if (!in) {
		throw Error(ErrorKind::IoError, "cannot read " + path.string());
	}
	NgramLM lm;
	std::string line;
	std::size_t lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		std::istringstream fields(line);
		std::string head;
		std::getline(fields, head, '\t');
		if (head == "lambdas") {
			for (double &l : lm.lambdas_) {
				fields >> l;
			}
			continue;
		}
		std::string key, count;
		if (!std::getline(fields, key, '\t') || !std::getline(fields, count)) {
			throw SchemaError(lineno, "malformed n-gram count line");
		}
		lm.add_count(std::stoi(head), key, std::stoll(count));
	}
	lm.finalize();
	return lm;
}

std::vector<int> HashClassifier::features(const Tokens &text) const
{
	const auto buckets = static_cast<std::uint64_t>(options_.buckets);
	std::vector<int> f;
	for (std::size_t i = 0; i < text.size(); ++i) {
		f.push_back(static_cast<int>(fnv1a(text[i]) % buckets));
		if (options_.bigrams && i + 1 < text.size()) {
			const std::uint64_t h = fnv1a(text[i + 1], fnv1a("\x01", fnv1a(text[i])));
			f.push_back(static_cast<int>(h % buckets));
		}
	}
	return f;
}

Eigen::VectorXd HashClassifier::logits(const std::vector<int> &f) const
{
	Eigen::VectorXd z = bias_;
	if (!f.empty()) {
		Eigen::VectorXd acc = Eigen::VectorXd::Zero(bias_.size());
		for (int b : f) {
			acc += weights_.col(b);
		}
		z += acc / static_cast<double>(f.size());
	}
	return z;
}

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd &z)
{
	Eigen::VectorXd p = (z.array() - z.maxCoeff()).exp();
	return p / p.sum();
}

} // namespace

HashClassifier HashClassifier::train(std::span<const Tokens> texts, std::span<const int> labels, int num_styles,
	const ClassifierOptions &options)
{
	if (texts.empty()) {
		throw Error(ErrorKind::EmptyCorpus, "classifier needs training texts");
	}
	if (std::set<int>(labels.begin(), labels.end()).size() < 2) {
		throw Error(ErrorKind::SingleStyleCorpus, "classifier needs at least two styles");
	}
	HashClassifier c;
	c.options_ = options;
	c.weights_ = Eigen::MatrixXd::Zero(num_styles, options.buckets);
	c.bias_ = Eigen::VectorXd::Zero(num_styles);

	std::vector<std::vector<int>> feats;
	for (const Tokens &t : texts) {
		feats.push_back(c.features(t));
	}
	Rng rng(options.seed);
	std::vector<std::size_t> order(texts.size());
	std::iota(order.begin(), order.end(), 0);
	const double total = static_cast<double>(options.epochs) * static_cast<double>(texts.size());
	double seen = 0.0;
	for (int e = 0; e < options.epochs; ++e) {
		std::shuffle(order.begin(), order.end(), rng);
		for (std::size_t i : order) {
			const double lr = options.learning_rate * (1.0 - seen / total);
			seen += 1.0;
			Eigen::VectorXd g = softmax(c.logits(feats[i]));
			g(labels[i]) -= 1.0;
			c.bias_ -= lr * g;
			if (!feats[i].empty()) {
				const Eigen::VectorXd step = (lr / static_cast<double>(feats[i].size())) * g;
				for (int b : feats[i]) {
					c.weights_.col(b) -= step;
				}
			}
		}
	}
	return c;
}

std::vector<double> HashClassifier::predict_proba(const Tokens &text) const
{
	const Eigen::VectorXd p = softmax(logits(features(text)));
	return {p.data(), p.data() + p.size()};
}

int HashClassifier::predict(const Tokens &text) const
{
	const Eigen::VectorXd z = logits(features(text));
	int best = 0;
	for (Eigen::Index i = 1; i < z.size(); ++i) {
		if (z(i) > z(best)) {
			best = static_cast<int>(i);
		}
	}
	return best;
}

void HashClassifier::save(const std::filesystem::path &path) const
{
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw Error(ErrorKind::IoError, "cannot write " + path.string());
	}
	const std::int64_t header[3] = {weights_.rows(), options_.buckets, options_.bigrams ? 1 : 0};
	out.write(reinterpret_cast<const char *>(header), sizeof header);
	out.write(reinterpret_cast<const char *>(bias_.data()), static_cast<std::streamsize>(sizeof(double) * bias_.size()));
	for (Eigen::Index r = 0; r < weights_.rows(); ++r) {
		for (Eigen::Index b = 0; b < weights_.cols(); ++b) {
			const double v = weights_(r, b);
			out.write(reinterpret_cast<const char *>(&v), sizeof v);
		}
	}
}

HashClassifier HashClassifier::load(const std::filesystem::path &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw Error(ErrorKind::IoError, "cannot read " + path.string());
	}
	std::int64_t header[3] = {0, 0, 0};
	in.read(reinterpret_cast<char *>(header), sizeof header);
	if (!in || header[0] <= 0 || header[1] <= 0) {
		throw Error(ErrorKind::IoError, "corrupt classifier file " + path.string());
	}
	HashClassifier c;
	c.options_.buckets = static_cast<int>(header[1]);
	c.options_.bigrams = header[2] != 0;
	c.bias_ = Eigen::VectorXd::Zero(header[0]);
	c.weights_ = Eigen::MatrixXd::Zero(header[0], header[1]);
	in.read(reinterpret_cast<char *>(c.bias_.data()), static_cast<std::streamsize>(sizeof(double) * c.bias_.size()));
	for (Eigen::Index r = 0; r < c.weights_.rows(); ++r) {
		for (Eigen::Index b = 0; b < c.weights_.cols(); ++b) {
			double v = 0.0;
			in.read(reinterpret_cast<char *>(&v), sizeof v);
			c.weights_(r, b) = v;
		}
	}
	if (!in) {
		throw Error(ErrorKind::IoError, "truncated classifier file " + path.string());
	}
	return c;
}

double coverage(std::span<const std::string> text, std::span<const AttributeValuePair> pairs)
{
	if (pairs.empty()) {
		throw Error(ErrorKind::EmptyInput, "coverage needs at least one pair");
	}
	std::size_t hit = 0;
	for (const auto &p : pairs) {
		if (find_subsequence(text, p.value)) {
			++hit;
		}
	}
	return static_cast<double>(hit) / static_cast<double>(pairs.size());
}

void GateConfig::validate() const
{
	if (!(0 < min_length && min_length < max_length)) {
		throw Error(ErrorKind::ConfigInvalid, "gate: need 0 < min_length < max_length");
	}
	if (!(max_perplexity > 1.0)) {
		throw Error(ErrorKind::ConfigInvalid, "gate: perplexity threshold must exceed 1");
	}
	if (min_coverage < 0.0 || min_coverage > 1.0) {
		throw Error(ErrorKind::ConfigInvalid, "gate: coverage threshold must be in [0, 1]");
	}
}

ConfidenceVerdict decide(const GateScores &s, const GateConfig &config)
{
	ConfidenceVerdict v;
	v.scores = s;
	v.length_ok = s.length > config.min_length && s.length < config.max_length;
	v.ppl_ok = s.perplexity < config.max_perplexity;
	v.style_ok = s.candidate_style == s.reference_style;
	v.coverage_ok = s.coverage > config.min_coverage;
	v.tau = v.length_ok && v.ppl_ok && v.style_ok && v.coverage_ok;
	return v;
}

ConfidenceVerdict assign_confidence(const Tokens &candidate, const Tokens &reference,
	std::span<const AttributeValuePair> pairs, const NgramLM &lm, const HashClassifier &classifier,
	const GateConfig &config, std::optional<int> reference_label)
{
	GateScores s;
	s.length = static_cast<int>(candidate.size());
	s.perplexity = candidate.empty() ? std::numeric_limits<double>::infinity() : lm.perplexity(candidate);
	s.candidate_style = classifier.predict(candidate);
	s.reference_style = (config.use_reference_label && reference_label) ? *reference_label : classifier.predict(reference);
	s.coverage = coverage(candidate, pairs);
	return decide(s, config);
}

GateConfig calibrate_gate(std::span<const Tokens> targets, const NgramLM &lm, const GateConfig &base)
{
	if (targets.empty()) {
		throw Error(ErrorKind::EmptyCorpus, "gate calibration needs training targets");
	}
	std::vector<int> lengths;
	std::vector<double> ppl;
	for (const Tokens &t : targets) {
		lengths.push_back(static_cast<int>(t.size()));
		if (!t.empty()) {
			ppl.push_back(lm.perplexity(t));
		}
	}
	std::sort(lengths.begin(), lengths.end());
	std::sort(ppl.begin(), ppl.end());
	GateConfig c = base;
	c.min_length = std::max(1, quantile(lengths, 0.005) - 1);
	c.max_length = std::max(c.min_length + 1, quantile(lengths, 0.995) + 1);
	c.max_perplexity = ppl.empty() ? base.max_perplexity : std::max(1.0 + 1e-9, quantile(ppl, 0.95));
	c.validate();
	return c;
}

GateArtifacts GateArtifacts::fit(std::span<const Triplet> corpus, int num_styles, const ClassifierOptions &options,
	bool calibrate, const GateConfig &base)
{
	std::vector<Tokens> targets;
	std::vector<int> labels;
	for (const Triplet &t : corpus) {
		if (t.target) {
			targets.push_back(*t.target);
			labels.push_back(t.style);
		}
	}
	NgramLM lm = NgramLM::train(targets);
	HashClassifier cls = HashClassifier::train(targets, labels, num_styles, options);
	GateConfig cfg = calibrate ? calibrate_gate(targets, lm, base) : base;
	cfg.validate();
	return {std::move(lm), std::move(cls), cfg};
}

void GateArtifacts::save(const std::filesystem::path &dir) const
{
	std::filesystem::create_directories(dir);
	lm.save(dir / "lm.counts");
	classifier.save(dir / "classifier.bin");
	nlohmann::ordered_json j;
	j["min_length"] = config.min_length;
	j["max_length"] = config.max_length;
	j["max_perplexity"] = config.max_perplexity;
	j["min_coverage"] = config.min_coverage;
	j["use_reference_label"] = config.use_reference_label;
	std::ofstream out(dir / "gate.json");
	out << j.dump(1) << '\n';
}

GateArtifacts GateArtifacts::load(const std::filesystem::path &dir)
{
	std::ifstream in(dir / "gate.json");
	if (!in) {
		throw Error(ErrorKind::IoError, "missing " + (dir / "gate.json").string());
	}
	const auto j = nlohmann::json::parse(in);
	GateConfig cfg;
	cfg.min_length = j.at("min_length");
	cfg.max_length = j.at("max_length");
	cfg.max_perplexity = j.at("max_perplexity");
	cfg.min_coverage = j.at("min_coverage");
	cfg.use_reference_label = j.at("use_reference_label");
	return {NgramLM::load(dir / "lm.counts"), HashClassifier::load(dir / "classifier.bin"), cfg};
}

} // namespace styled2t
