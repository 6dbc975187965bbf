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
#include "styled2t/evaluation.hpp"

#include "styled2t/errors.hpp"
#include "styled2t/params.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace styled2t {

double style_accuracy(std::span<const Tokens> texts, std::span<const int> intended, const HashClassifier &classifier)
{
	if (texts.empty() || texts.size() != intended.size()) {
		throw Error(ErrorKind::EmptyInput, "style accuracy needs paired, non-empty inputs");
	}
	std::size_t hit = 0;
	for (std::size_t i = 0; i < texts.size(); ++i) {
		hit += classifier.predict(texts[i]) == intended[i] ? 1 : 0;
	}
	return static_cast<double>(hit) / static_cast<double>(texts.size());
}

double rouge_l(const Tokens &candidate, const Tokens &reference)
{
	if (candidate.empty() || reference.empty()) {
		throw Error(ErrorKind::EmptyInput, "ROUGE-L needs non-empty sequences");
	}
	std::vector<int> prev(reference.size() + 1, 0), cur(reference.size() + 1, 0);
	for (const auto &c : candidate) {
		for (std::size_t j = 1; j <= reference.size(); ++j) {
			cur[j] = c == reference[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
		}
		std::swap(prev, cur);
	}
	const double lcs = prev.back();
	if (lcs == 0.0) {
		return 0.0;
	}
	const double p = lcs / static_cast<double>(candidate.size());
	const double r = lcs / static_cast<double>(reference.size());
	return 2.0 * p * r / (p + r);
}

double bleu_4(std::span<const Tokens> candidates, std::span<const Tokens> references)
{
	if (candidates.empty() || candidates.size() != references.size()) {
		throw Error(ErrorKind::EmptyInput, "BLEU needs paired, non-empty inputs");
	}
	std::array<double, 4> matched{}, total{};
	double cand_len = 0.0, ref_len = 0.0;
	for (std::size_t i = 0; i < candidates.size(); ++i) {
		const Tokens &c = candidates[i];
		const Tokens &r = references[i];
		cand_len += static_cast<double>(c.size());
		ref_len += static_cast<double>(r.size());
		for (std::size_t n = 1; n <= 4; ++n) {
			std::map<std::vector<std::string>, int> ref_counts, cand_counts;
			for (std::size_t k = 0; k + n <= r.size(); ++k) {
				++ref_counts[{r.begin() + static_cast<long>(k), r.begin() + static_cast<long>(k + n)}];
			}
			for (std::size_t k = 0; k + n <= c.size(); ++k) {
				++cand_counts[{c.begin() + static_cast<long>(k), c.begin() + static_cast<long>(k + n)}];
			}
			for (const auto &[gram, count] : cand_counts) {
				auto it = ref_counts.find(gram);
				matched[n - 1] += std::min(count, it == ref_counts.end() ? 0 : it->second);
				total[n - 1] += count;
			}
		}
	}
	double log_sum = 0.0;
	for (std::size_t n = 0; n < 4; ++n) {
		if (matched[n] == 0.0) {
			return 0.0;
		}
		log_sum += std::log(matched[n] / total[n]);
	}
	const double bp = cand_len < ref_len ? std::exp(1.0 - ref_len / cand_len) : 1.0;
	return bp * std::exp(log_sum / 4.0);
}

std::string EvaluationReport::to_json(bool include_rows) const
{
	nlohmann::ordered_json j;
	j["style_accuracy"] = 100.0 * style_accuracy;
	j["coverage"] = 100.0 * coverage;
	j["rouge_l"] = 100.0 * rouge_l;
	j["bleu_4"] = 100.0 * bleu_4;
	auto by = nlohmann::ordered_json::array();
	for (double a : style_accuracy_by_style) {
		by.push_back(100.0 * a);
	}
	j["style_accuracy_by_style"] = by;
	if (include_rows) {
		auto rows_json = nlohmann::ordered_json::array();
		for (const auto &r : rows) {
			nlohmann::ordered_json row;
			row["instance"] = r.instance;
			row["style"] = r.style;
			row["ground_truth"] = r.ground_truth;
			row["text"] = join(r.text);
			row["predicted_style"] = r.predicted_style;
			row["coverage"] = r.coverage;
			row["rouge_l"] = r.rouge_l ? nlohmann::ordered_json(*r.rouge_l) : nlohmann::ordered_json(nullptr);
			rows_json.push_back(std::move(row));
		}
		j["rows"] = std::move(rows_json);
	}
	return j.dump(1);
}

EvaluationReport evaluate(std::span<const Triplet> test, std::span<const Triplet> train, int num_styles,
	const GenerateFn &generate, const HashClassifier &classifier, std::uint64_t seed)
{
	if (test.empty()) {
		throw Error(ErrorKind::EmptyInput, "empty test split");
	}
	const auto by_style = indices_by_style(train, num_styles);
	Rng rng(seed);
	EvaluationReport report;
	std::vector<Tokens> cands, refs;
	std::vector<std::size_t> hits(static_cast<std::size_t>(num_styles), 0), counts(hits.size(), 0);
	double coverage_sum = 0.0, rouge_sum = 0.0;
	std::size_t hit_total = 0;
	for (std::size_t i = 0; i < test.size(); ++i) {
		const Triplet &inst = test[i];
		for (int s = 0; s < num_styles; ++s) {
			const auto &pool = by_style[static_cast<std::size_t>(s)];
			const Triplet &donor = train[pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]];
			const Tokens &reference = donor.target ? *donor.target : donor.style_ref;
			EvaluationRow row;
			row.instance = i;
			row.style = s;
			row.text = generate(i, inst, reference, s);
			row.predicted_style = classifier.predict(row.text);
			row.coverage = coverage(row.text, inst.data);
			row.ground_truth = s == inst.style && inst.target.has_value();
			if (row.ground_truth) {
				row.rouge_l = row.text.empty() ? 0.0 : rouge_l(row.text, *inst.target);
				rouge_sum += *row.rouge_l;
				cands.push_back(row.text);
				refs.push_back(*inst.target);
			}
			coverage_sum += row.coverage;
			const bool ok = row.predicted_style == s;
			hits[static_cast<std::size_t>(s)] += ok ? 1 : 0;
			hit_total += ok ? 1 : 0;
			++counts[static_cast<std::size_t>(s)];
			report.rows.push_back(std::move(row));
		}
	}
	const auto n = static_cast<double>(report.rows.size());
	report.style_accuracy = static_cast<double>(hit_total) / n;
	report.coverage = coverage_sum / n;
	for (std::size_t s = 0; s < hits.size(); ++s) {
		report.style_accuracy_by_style.push_back(static_cast<double>(hits[s]) / static_cast<double>(counts[s]));
	}
	if (!cands.empty()) {
		report.rouge_l = rouge_sum / static_cast<double>(cands.size());
		report.bleu_4 = bleu_4(cands, refs);
	}
	return report;
}

} // namespace styled2t
