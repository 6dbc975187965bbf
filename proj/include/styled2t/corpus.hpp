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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace styled2t {

using Tokens = std::vector<std::string>;

struct AttributeValuePair {
	Tokens attribute;
	Tokens value;
	/// 1-based position within the owning instance.
	int index = 0;

	bool operator==(const AttributeValuePair &) const = default;
};

/// One sample: data pairs, a style reference text, an optional target and its style.
struct Triplet {
	std::vector<AttributeValuePair> data;
	Tokens style_ref;
	std::optional<Tokens> target;
	int style = 0;
	int num_styles = 2;

	std::vector<int> style_label() const;
	bool operator==(const Triplet &) const = default;
};

class Vocabulary {
public:
	static constexpr int kPad = 0;
	static constexpr int kBos = 1;
	static constexpr int kEos = 2;
	static constexpr int kUnk = 3;
	static constexpr int kSep = 4;
	static constexpr int kReserved = 5;

	Vocabulary();

	/// Collects every attribute, value, reference and target token, in first-seen order.
	static Vocabulary build(std::span<const Triplet> corpus);
	static Vocabulary load(const std::filesystem::path &path);
	void save(const std::filesystem::path &path) const;

	int add(const std::string &token);
	/// UNK for tokens outside the vocabulary.
	int id(const std::string &token) const;
	bool contains(const std::string &token) const { return index_.count(token) != 0; }
	const std::string &token(int id) const;
	int size() const { return static_cast<int>(tokens_.size()); }

	std::vector<int> encode(const Tokens &text) const;
	/// Maps ids back to tokens, dropping PAD/BOS/EOS.
	Tokens decode(std::span<const int> ids) const;

	bool operator==(const Vocabulary &o) const { return tokens_ == o.tokens_; }

private:
	std::vector<std::string> tokens_;
	std::unordered_map<std::string, int> index_;
};

Tokens tokenize(std::string_view text);
std::string join(const Tokens &tokens);

/// Position of the first contiguous occurrence of `needle` in `text`.
std::optional<std::size_t> find_subsequence(std::span<const std::string> text, std::span<const std::string> needle);

struct RankVector {
	std::vector<int> ranks;

	bool operator==(const RankVector &) const = default;
};

/// 1-based pair indices in mention order.
struct Plan {
	std::vector<int> order;

	bool operator==(const Plan &) const = default;
};

/// Ranks of `pairs` by first mention in `text`; unmentioned pairs get 0.
/// Equal first positions are ordered by ascending pair index.
RankVector ranks_in_text(std::span<const AttributeValuePair> pairs, std::span<const std::string> text);

/// Ranks against the triplet's own target. Throws PlanUnderivable when no value occurs.
RankVector extract_ranks(const Triplet &triplet);
Plan plan_from_ranks(const RankVector &ranks);
Plan extract_plan(const Triplet &triplet);

std::vector<Triplet> parse_jsonl(std::istream &in, int num_styles = 2);
std::vector<Triplet> read_jsonl(const std::filesystem::path &path, int num_styles = 2);
std::string to_jsonl_line(const Triplet &triplet);
void write_jsonl(std::ostream &out, std::span<const Triplet> triplets);
void write_jsonl(const std::filesystem::path &path, std::span<const Triplet> triplets);

/// Triplets grouped by style id; throws DataMissingStyle if a style has no sample.
std::vector<std::vector<std::size_t>> indices_by_style(std::span<const Triplet> corpus, int num_styles);

} // namespace styled2t
