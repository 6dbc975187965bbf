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
#include "styled2t/synthetic.hpp"

#include "styled2t/errors.hpp"
#include "styled2t/params.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace styled2t {

namespace {

struct AttributeEntry {
	const char *name;
	std::array<const char *, 6> values;
};

// Every token below occurs in exactly one value, so value matching is unambiguous.
constexpr std::array<AttributeEntry, 16> kAttributes{{
	{"color", {"crimson", "teal", "ivory", "charcoal", "mint green", "amber"}},
	{"material", {"cotton", "linen", "silk", "wool blend", "denim", "leather"}},
	{"size", {"petite", "oversized", "medium fit", "extra large", "compact", "standard cut"}},
	{"brand", {"acme", "zenith", "nova", "orbit", "lumen", "vertex"}},
	{"pattern", {"striped", "plaid", "floral print", "polka dots", "solid tone", "houndstooth"}},
	{"season", {"summer", "winter", "spring ready", "autumn", "all year", "holiday"}},
	{"sleeve", {"sleeveless", "cap shoulder", "raglan", "bell cuffs", "three quarter", "puffed"}},
	{"collar", {"mandarin", "peter pan", "notched", "crew neck", "v neckline", "hooded"}},
	{"scent", {"lavender", "citrus", "vanilla", "sandalwood", "ocean breeze", "unscented"}},
	{"capacity", {"two liters", "pocket sized", "roomy", "slim profile", "twenty slots", "expandable"}},
	{"weight", {"featherlight", "lightweight", "sturdy heft", "ultralight", "hefty", "balanced"}},
	{"origin", {"italy", "japan", "vietnam", "portugal", "peru", "morocco"}},
	{"texture", {"smooth", "ribbed", "brushed", "quilted", "waffle knit", "velvety"}},
	{"closure", {"zipper", "buttons", "drawstring", "magnetic snap", "hook loop", "velcro"}},
	{"lining", {"fleece", "satin", "mesh", "unlined", "sherpa", "flannel"}},
	{"finish", {"matte", "glossy", "distressed", "waxed", "enzyme washed", "raw edge"}},
}};

struct StyleTemplates {
	const char *opener;
	const char *connector;
	const char *closer;
	// "{a}" and "{v}" are replaced by attribute and value tokens.
	std::array<const char *, 2> mention;
};

constexpr std::array<StyleTemplates, 2> kStyles{{
	{"this product offers the following qualities .", "moreover ,", "overall , it is highly recommended .",
		{"the {a} is {v} .", "its {a} features {v} ."}},
	{"hey guys look at dis !", "also ya", "u gonna love dis lol !", {"wow {v} {a} !", "{a} got {v} vibes ~"}},
}};

void append(Tokens &out, const Tokens &more)
{
	out.insert(out.end(), more.begin(), more.end());
}

Tokens render_mention(const char *pattern, const Tokens &attr, const Tokens &value)
{
	Tokens out;
	for (const auto &tok : tokenize(pattern)) {
		if (tok == "{a}") {
			append(out, attr);
		} else if (tok == "{v}") {
			append(out, value);
		} else {
			out.push_back(tok);
		}
	}
	return out;
}

void validate(const GeneratorConfig &c)
{
	auto bad = [](const std::string &why) { throw Error(ErrorKind::ConfigInvalid, "generator: " + why); };
	if (c.count_per_style.size() != kStyles.size()) {
		bad("exactly two styles are supported");
	}
	for (int n : c.count_per_style) {
		if (n <= 0) {
			bad("counts per style must be positive");
		}
	}
	if (c.num_attributes <= 0 || c.num_attributes > static_cast<int>(kAttributes.size())) {
		bad("attribute pool size must be in [1, 16]");
	}
	if (c.values_per_attribute <= 0 || c.values_per_attribute > 6) {
		bad("values per attribute must be in [1, 6]");
	}
	if (c.min_pairs <= 0 || c.max_pairs < c.min_pairs || c.max_pairs > c.num_attributes) {
		bad("pairs range must satisfy 0 < min <= max <= attribute pool size");
	}
	if (c.style_content_bias < 0.0 || c.style_content_bias > 1.0) {
		bad("style_content_bias must be in [0, 1]");
	}
}

} // namespace

Tokens style_marker_tokens(int style)
{
	const StyleTemplates &t = kStyles.at(static_cast<std::size_t>(style));
	Tokens out;
	for (const char *s : {t.opener, t.connector, t.closer, t.mention[0], t.mention[1]}) {
		for (auto &tok : tokenize(s)) {
			if (tok != "{a}" && tok != "{v}" && std::find(out.begin(), out.end(), tok) == out.end()) {
				out.push_back(tok);
			}
		}
	}
	return out;
}

std::vector<Triplet> generate_synthetic_corpus(const GeneratorConfig &config)
{
	validate(config);
	Rng rng(config.seed);
	const int pool = config.num_attributes;

	// Global mention precedence over the attribute pool, fixed by the seed.
	std::vector<int> precedence(static_cast<std::size_t>(pool));
	std::iota(precedence.begin(), precedence.end(), 0);
	std::shuffle(precedence.begin(), precedence.end(), rng);
	std::vector<int> rank_of(static_cast<std::size_t>(pool));
	for (int r = 0; r < pool; ++r) {
		rank_of[static_cast<std::size_t>(precedence[static_cast<std::size_t>(r)])] = r;
	}

	std::vector<Triplet> corpus;
	for (int style = 0; style < static_cast<int>(kStyles.size()); ++style) {
		const StyleTemplates &tpl = kStyles[static_cast<std::size_t>(style)];
		std::vector<int> own;
		for (int a = 0; a < pool; ++a) {
			if (a % 2 == style) {
				own.push_back(a);
			}
		}
		for (int n = 0; n < config.count_per_style[static_cast<std::size_t>(style)]; ++n) {
			const int k = std::uniform_int_distribution<int>(config.min_pairs, config.max_pairs)(rng);
			std::vector<int> chosen;
			std::bernoulli_distribution biased(config.style_content_bias);
			while (static_cast<int>(chosen.size()) < k) {
				std::vector<int> candidates;
				const bool from_own = biased(rng);
				for (int a : (from_own ? own : precedence)) {
					if (std::find(chosen.begin(), chosen.end(), a) == chosen.end()) {
						candidates.push_back(a);
					}
				}
				if (candidates.empty()) {
					continue;
				}
				std::sort(candidates.begin(), candidates.end());
				chosen.push_back(candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)]);
			}

			Triplet t;
			t.style = style;
			t.num_styles = static_cast<int>(kStyles.size());
			std::uniform_int_distribution<int> pick_value(0, config.values_per_attribute - 1);
			std::vector<std::pair<int, AttributeValuePair>> mentions;
			for (int a : chosen) {
				const AttributeEntry &e = kAttributes[static_cast<std::size_t>(a)];
				AttributeValuePair p{tokenize(e.name), tokenize(e.values[static_cast<std::size_t>(pick_value(rng))]), 0};
				mentions.emplace_back(a, p);
			}
			// Data order is random; the target follows the global precedence.
			std::shuffle(mentions.begin(), mentions.end(), rng);
			for (std::size_t i = 0; i < mentions.size(); ++i) {
				mentions[i].second.index = static_cast<int>(i) + 1;
				t.data.push_back(mentions[i].second);
			}
			std::vector<std::pair<int, AttributeValuePair>> ordered = mentions;
			std::sort(ordered.begin(), ordered.end(), [&rank_of](const auto &x, const auto &y) {
				return rank_of[static_cast<std::size_t>(x.first)] < rank_of[static_cast<std::size_t>(y.first)];
			});
			Tokens target = tokenize(tpl.opener);
			for (std::size_t i = 0; i < ordered.size(); ++i) {
				if (i > 0) {
					append(target, tokenize(tpl.connector));
				}
				const auto &[a, p] = ordered[i];
				append(target, render_mention(tpl.mention[static_cast<std::size_t>(a % 2)], p.attribute, p.value));
			}
			append(target, tokenize(tpl.closer));
			t.target = std::move(target);
			corpus.push_back(std::move(t));
		}
	}

	// Style references: the target of another sample of the same style.
	for (int style = 0; style < static_cast<int>(kStyles.size()); ++style) {
		std::vector<std::size_t> same;
		for (std::size_t i = 0; i < corpus.size(); ++i) {
			if (corpus[i].style == style) {
				same.push_back(i);
			}
		}
		for (std::size_t i : same) {
			std::size_t j = i;
			if (same.size() > 1) {
				while (j == i) {
					j = same[std::uniform_int_distribution<std::size_t>(0, same.size() - 1)(rng)];
				}
			}
			corpus[i].style_ref = *corpus[j].target;
		}
	}
	std::shuffle(corpus.begin(), corpus.end(), rng);
	return corpus;
}

CorpusSplit split_per_style(const std::vector<Triplet> &corpus, int num_styles, int test_per_style)
{
	CorpusSplit out;
	std::vector<int> remaining(static_cast<std::size_t>(num_styles), test_per_style);
	std::vector<bool> to_test(corpus.size(), false);
	for (std::size_t i = corpus.size(); i-- > 0;) {
		int &left = remaining.at(static_cast<std::size_t>(corpus[i].style));
		if (left > 0) {
			to_test[i] = true;
			--left;
		}
	}
	for (std::size_t i = 0; i < corpus.size(); ++i) {
		(to_test[i] ? out.test : out.train).push_back(corpus[i]);
	}
	return out;
}

} // namespace styled2t
