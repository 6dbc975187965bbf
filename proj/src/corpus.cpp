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
#include "styled2t/corpus.hpp"

#include "styled2t/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace styled2t {

using ojson = nlohmann::ordered_json;

std::vector<int> Triplet::style_label() const
{
	std::vector<int> g(static_cast<std::size_t>(num_styles), 0);
	g.at(static_cast<std::size_t>(style)) = 1;
	return g;
}

Vocabulary::Vocabulary()
{
	for (const char *s : {"<pad>", "<s>", "</s>", "<unk>", "<sep>"}) {
		index_.emplace(s, static_cast<int>(tokens_.size()));
		tokens_.emplace_back(s);
	}
}

int Vocabulary::add(const std::string &token)
{
	auto it = index_.find(token);
	if (it != index_.end()) {
		return it->second;
	}
	const int id = static_cast<int>(tokens_.size());
	index_.emplace(token, id);
	tokens_.push_back(token);
	return id;
}

int Vocabulary::id(const std::string &token) const
{
	auto it = index_.find(token);
	return it == index_.end() ? kUnk : it->second;
}

const std::string &Vocabulary::token(int id) const
{
	return tokens_.at(static_cast<std::size_t>(id));
}

Vocabulary Vocabulary::build(std::span<const Triplet> corpus)
{
	Vocabulary v;
	auto add_all = [&v](const Tokens &ts) {
		for (const auto &t : ts) {
			v.add(t);
		}
	};
	for (const Triplet &t : corpus) {
		for (const auto &p : t.data) {
			add_all(p.attribute);
			add_all(p.value);
		}
		add_all(t.style_ref);
		if (t.target) {
			add_all(*t.target);
		}
	}
	return v;
}

void Vocabulary::save(const std::filesystem::path &path) const
{
	std::ofstream out(path);
	if (!out) {
		throw Error(ErrorKind::IoError, "cannot write " + path.string());
	}
	for (std::size_t i = kReserved; i < tokens_.size(); ++i) {
		out << tokens_[i] << '\n';
	}
}

Vocabulary Vocabulary::load(const std::filesystem::path &path)
{
	std::ifstream in(path);
	if (!in) {
		throw Error(ErrorKind::IoError, "cannot read " + path.string());
	}
	Vocabulary v;
	std::string line;
	std::size_t lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		if (line.empty() || v.contains(line)) {
			throw SchemaError(lineno, "vocabulary lines must be unique non-empty tokens");
		}
		v.add(line);
	}
	return v;
}

std::vector<int> Vocabulary::encode(const Tokens &text) const
{
	std::vector<int> ids;
	ids.reserve(text.size());
	for (const auto &t : text) {
		ids.push_back(id(t));
	}
	return ids;
}

Tokens Vocabulary::decode(std::span<const int> ids) const
{
	Tokens out;
	for (int id : ids) {
		if (id == kPad || id == kBos || id == kEos) {
			continue;
		}
		out.push_back(token(id));
	}
	return out;
}

Tokens tokenize(std::string_view text)
{
	Tokens out;
	std::size_t i = 0;
	auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
	while (i < text.size()) {
		while (i < text.size() && is_space(text[i])) {
			++i;
		}
		std::size_t j = i;
		while (j < text.size() && !is_space(text[j])) {
			++j;
		}
		if (j > i) {
			out.emplace_back(text.substr(i, j - i));
		}
		i = j;
	}
	return out;
}

std::string join(const Tokens &tokens)
{
	std::string out;
	for (std::size_t i = 0; i < tokens.size(); ++i) {
		if (i) {
			out += ' ';
		}
		out += tokens[i];
	}
	return out;
}

std::optional<std::size_t> find_subsequence(std::span<const std::string> text, std::span<const std::string> needle)
{
	if (needle.empty() || needle.size() > text.size()) {
		return std::nullopt;
	}
	auto it = std::search(text.begin(), text.end(), needle.begin(), needle.end());
	if (it == text.end()) {
		return std::nullopt;
	}
	return static_cast<std::size_t>(it - text.begin());
}

RankVector ranks_in_text(std::span<const AttributeValuePair> pairs, std::span<const std::string> text)
{
	std::vector<std::pair<std::size_t, std::size_t>> found; // (position, slot)
	for (std::size_t i = 0; i < pairs.size(); ++i) {
		if (auto pos = find_subsequence(text, pairs[i].value)) {
			found.emplace_back(*pos, i);
		}
	}
	std::sort(found.begin(), found.end());
	RankVector r{std::vector<int>(pairs.size(), 0)};
	for (std::size_t k = 0; k < found.size(); ++k) {
		r.ranks[found[k].second] = static_cast<int>(k) + 1;
	}
	return r;
}

RankVector extract_ranks(const Triplet &triplet)
{
	if (!triplet.target) {
		throw Error(ErrorKind::PlanUnderivable, "triplet has no target text");
	}
	RankVector r = ranks_in_text(triplet.data, *triplet.target);
	if (std::all_of(r.ranks.begin(), r.ranks.end(), [](int x) { return x == 0; })) {
		throw Error(ErrorKind::PlanUnderivable, "no attribute value occurs in the target");
	}
	return r;
}

Plan plan_from_ranks(const RankVector &ranks)
{
	std::vector<std::pair<int, int>> order;
	for (std::size_t i = 0; i < ranks.ranks.size(); ++i) {
		if (ranks.ranks[i] > 0) {
			order.emplace_back(ranks.ranks[i], static_cast<int>(i) + 1);
		}
	}
	std::sort(order.begin(), order.end());
	Plan p;
	for (const auto &[rank, index] : order) {
		p.order.push_back(index);
	}
	return p;
}

Plan extract_plan(const Triplet &triplet)
{
	return plan_from_ranks(extract_ranks(triplet));
}

namespace {

Tokens required_tokens(const ojson &obj, const char *key, std::size_t line)
{
	auto it = obj.find(key);
	if (it == obj.end() || !it->is_string()) {
		throw SchemaError(line, std::string("missing or non-string \"") + key + "\"");
	}
	return tokenize(it->get<std::string>());
}

Triplet parse_record(const std::string &text, std::size_t line, int num_styles)
{
	ojson j;
	try {
		j = ojson::parse(text);
	} catch (const nlohmann::json::parse_error &e) {
		throw SchemaError(line, std::string("invalid JSON: ") + e.what());
	}
	if (!j.is_object()) {
		throw SchemaError(line, "record must be a JSON object");
	}
	Triplet t;
	t.num_styles = num_styles;
	auto data = j.find("data");
	if (data == j.end() || !data->is_array() || data->empty()) {
		throw SchemaError(line, "\"data\" must be a non-empty array");
	}
	int index = 1;
	for (const auto &p : *data) {
		if (!p.is_object()) {
			throw SchemaError(line, "\"data\" entries must be objects");
		}
		AttributeValuePair pair{required_tokens(p, "attr", line), required_tokens(p, "value", line), index++};
		if (pair.attribute.empty() || pair.value.empty()) {
			throw SchemaError(line, "attribute and value must be non-empty");
		}
		t.data.push_back(std::move(pair));
	}
	t.style_ref = required_tokens(j, "style_ref", line);
	auto target = j.find("target");
	if (target == j.end()) {
		throw SchemaError(line, "missing \"target\" (use null when absent)");
	}
	if (target->is_string()) {
		t.target = tokenize(target->get<std::string>());
	} else if (!target->is_null()) {
		throw SchemaError(line, "\"target\" must be a string or null");
	}
	auto style = j.find("style");
	if (style == j.end() || !style->is_number_integer()) {
		throw SchemaError(line, "missing or non-integer \"style\"");
	}
	t.style = style->get<int>();
	if (t.style < 0 || t.style >= num_styles) {
		throw SchemaError(line, "\"style\" out of range");
	}
	return t;
}

} // namespace

std::vector<Triplet> parse_jsonl(std::istream &in, int num_styles)
{
	std::vector<Triplet> out;
	std::string line;
	std::size_t lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		if (line.find_first_not_of(" \t\r") == std::string::npos) {
			continue;
		}
		out.push_back(parse_record(line, lineno, num_styles));
	}
	return out;
}

std::vector<Triplet> read_jsonl(const std::filesystem::path &path, int num_styles)
{
	std::ifstream in(path);
	if (!in) {
		throw Error(ErrorKind::IoError, "cannot read " + path.string());
	}
	return parse_jsonl(in, num_styles);
}

std::string to_jsonl_line(const Triplet &t)
{
	ojson j;
	ojson data = ojson::array();
	for (const auto &p : t.data) {
		data.push_back({{"attr", join(p.attribute)}, {"value", join(p.value)}});
	}
	j["data"] = std::move(data);
	j["style_ref"] = join(t.style_ref);
	j["target"] = t.target ? ojson(join(*t.target)) : ojson(nullptr);
	j["style"] = t.style;
	return j.dump();
}

void write_jsonl(std::ostream &out, std::span<const Triplet> triplets)
{
	for (const auto &t : triplets) {
		out << to_jsonl_line(t) << '\n';
	}
}

void write_jsonl(const std::filesystem::path &path, std::span<const Triplet> triplets)
{
	std::ofstream out(path);
	if (!out) {
		throw Error(ErrorKind::IoError, "cannot write " + path.string());
	}
	write_jsonl(out, triplets);
}

std::vector<std::vector<std::size_t>> indices_by_style(std::span<const Triplet> corpus, int num_styles)
{
	std::vector<std::vector<std::size_t>> by(static_cast<std::size_t>(num_styles));
	for (std::size_t i = 0; i < corpus.size(); ++i) {
		by.at(static_cast<std::size_t>(corpus[i].style)).push_back(i);
	}
	for (int s = 0; s < num_styles; ++s) {
		if (by[static_cast<std::size_t>(s)].empty()) {
			throw Error(ErrorKind::DataMissingStyle, "no training sample for style " + std::to_string(s));
		}
	}
	return by;
}

} // namespace styled2t
