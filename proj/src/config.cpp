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
#include "styled2t/config.hpp"

#include "styled2t/errors.hpp"

#include <charconv>
#include <functional>
#include <fstream>
#include <sstream>

namespace styled2t {

namespace {

std::string trim(const std::string &s)
{
	const auto b = s.find_first_not_of(" \t\r");
	if (b == std::string::npos) {
		return {};
	}
	const auto e = s.find_last_not_of(" \t\r");
	return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string &key, const std::string &value)
{
	throw Error(ErrorKind::ConfigInvalid, "invalid value for " + key + ": '" + value + "'");
}

template <class T>
T parse_number(const std::string &key, const std::string &value)
{
	T out{};
	if constexpr (std::is_floating_point_v<T>) {
		try {
			std::size_t used = 0;
			out = static_cast<T>(std::stod(value, &used));
			if (used != value.size()) {
				bad_value(key, value);
			}
		} catch (const std::logic_error &) {
			bad_value(key, value);
		}
	} else {
		const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
		if (ec != std::errc() || ptr != value.data() + value.size()) {
			bad_value(key, value);
		}
	}
	return out;
}

bool parse_bool(const std::string &key, const std::string &value)
{
	if (value == "1" || value == "true") {
		return true;
	}
	if (value == "0" || value == "false") {
		return false;
	}
	bad_value(key, value);
}

std::string format_double(double v)
{
	std::ostringstream s;
	s.precision(17);
	s << v;
	return s.str();
}

struct Field {
	const char *key;
	std::function<void(TrainConfig &, const std::string &, const std::string &)> set;
	std::function<std::string(const TrainConfig &)> get;
};

template <class T>
Field number(const char *key, T TrainConfig::*member)
{
	return {key, [member](TrainConfig &c, const std::string &k, const std::string &v) { c.*member = parse_number<T>(k, v); },
		[member](const TrainConfig &c) {
			if constexpr (std::is_floating_point_v<T>) {
				return format_double(c.*member);
			} else {
				return std::to_string(c.*member);
			}
		}};
}

Field flag(const char *key, bool TrainConfig::*member)
{
	return {key, [member](TrainConfig &c, const std::string &k, const std::string &v) { c.*member = parse_bool(k, v); },
		[member](const TrainConfig &c) { return std::string(c.*member ? "true" : "false"); }};
}

template <class Owner, class T>
Field nested_number(const char *key, Owner TrainConfig::*owner, T Owner::*member)
{
	return {key,
		[owner, member](TrainConfig &c, const std::string &k, const std::string &v) {
			(c.*owner).*member = parse_number<T>(k, v);
		},
		[owner, member](const TrainConfig &c) {
			if constexpr (std::is_floating_point_v<T>) {
				return format_double((c.*owner).*member);
			} else {
				return std::to_string((c.*owner).*member);
			}
		}};
}

template <class Owner>
Field nested_bool(const char *key, Owner TrainConfig::*owner, bool Owner::*member)
{
	return {key,
		[owner, member](TrainConfig &c, const std::string &k, const std::string &v) {
			(c.*owner).*member = parse_bool(k, v);
		},
		[owner, member](const TrainConfig &c) { return std::string((c.*owner).*member ? "true" : "false"); }};
}

Field shape_field(const char *key, int TransformerShape::*member)
{
	return {key, [member](TrainConfig &c, const std::string &k, const std::string &v) {
		c.model.shape.*member = parse_number<int>(k, v);
	}, [member](const TrainConfig &c) { return std::to_string(c.model.shape.*member); }};
}

const std::vector<Field> &fields()
{
	static const std::vector<Field> f = {
		number("alpha", &TrainConfig::alpha),
		number("beta", &TrainConfig::beta),
		number("gamma", &TrainConfig::gamma),
		number("delta", &TrainConfig::delta),
		number("batch_per_style", &TrainConfig::batch_per_style),
		number("epochs", &TrainConfig::epochs),
		number("iterations", &TrainConfig::iterations),
		number("learning_rate", &TrainConfig::learning_rate),
		number("clip_norm", &TrainConfig::clip_norm),
		number("seed", &TrainConfig::seed),
		number("max_len", &TrainConfig::max_len),
		shape_field("dim", &TransformerShape::dim),
		shape_field("layers", &TransformerShape::layers),
		shape_field("heads", &TransformerShape::heads),
		shape_field("ffn_dim", &TransformerShape::ffn_dim),
		nested_number("gcn_layers", &TrainConfig::model, &ModelConfig::gcn_layers),
		nested_number("max_positions", &TrainConfig::model, &ModelConfig::max_positions),
		nested_number("num_styles", &TrainConfig::model, &ModelConfig::num_styles),
		nested_number("init_std", &TrainConfig::model, &ModelConfig::init_std),
		nested_number("model_seed", &TrainConfig::model, &ModelConfig::seed),
		nested_bool("no_style", &TrainConfig::flags, &AblationFlags::no_style),
		nested_bool("no_style_constraints", &TrainConfig::flags, &AblationFlags::no_style_constraints),
		nested_bool("no_planner", &TrainConfig::flags, &AblationFlags::no_planner),
		nested_bool("no_graph", &TrainConfig::flags, &AblationFlags::no_graph),
		nested_bool("no_pseudo", &TrainConfig::flags, &AblationFlags::no_pseudo),
		nested_bool("no_weight", &TrainConfig::flags, &AblationFlags::no_weight),
		nested_bool("no_gru", &TrainConfig::flags, &AblationFlags::no_gru),
		nested_bool("fixed_style", &TrainConfig::flags, &AblationFlags::fixed_style),
		nested_bool("learnable_style", &TrainConfig::flags, &AblationFlags::learnable_style),
		flag("calibrate_gate", &TrainConfig::calibrate_gate),
		nested_number("gate_min_length", &TrainConfig::gate, &GateConfig::min_length),
		nested_number("gate_max_length", &TrainConfig::gate, &GateConfig::max_length),
		nested_number("gate_max_perplexity", &TrainConfig::gate, &GateConfig::max_perplexity),
		nested_number("gate_min_coverage", &TrainConfig::gate, &GateConfig::min_coverage),
		nested_bool("gate_use_reference_label", &TrainConfig::gate, &GateConfig::use_reference_label),
		nested_number("classifier_buckets", &TrainConfig::classifier, &ClassifierOptions::buckets),
		nested_bool("classifier_bigrams", &TrainConfig::classifier, &ClassifierOptions::bigrams),
		nested_number("classifier_epochs", &TrainConfig::classifier, &ClassifierOptions::epochs),
		nested_number("classifier_learning_rate", &TrainConfig::classifier, &ClassifierOptions::learning_rate),
		nested_number("classifier_seed", &TrainConfig::classifier, &ClassifierOptions::seed),
	};
	return f;
}

} // namespace

KeyValues parse_key_values(std::istream &in)
{
	KeyValues out;
	std::string line;
	std::size_t lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		const std::string t = trim(line);
		if (t.empty() || t.front() == '#') {
			continue;
		}
		const auto eq = t.find('=');
		if (eq == std::string::npos) {
			throw Error(ErrorKind::ConfigInvalid, "config line " + std::to_string(lineno) + ": expected key = value");
		}
		out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
	}
	return out;
}

KeyValues read_key_values(const std::filesystem::path &path)
{
	std::ifstream in(path);
	if (!in) {
		throw Error(ErrorKind::IoError, "cannot read " + path.string());
	}
	return parse_key_values(in);
}

void apply_setting(TrainConfig &config, const std::string &key, const std::string &value)
{
	for (const Field &f : fields()) {
		if (key == f.key) {
			f.set(config, key, value);
			return;
		}
	}
	throw Error(ErrorKind::ConfigInvalid, "unknown config key: " + key);
}

void apply_settings(TrainConfig &config, const KeyValues &settings)
{
	for (const auto &[k, v] : settings) {
		apply_setting(config, k, v);
	}
}

KeyValues to_key_values(const TrainConfig &config)
{
	KeyValues out;
	for (const Field &f : fields()) {
		out[f.key] = f.get(config);
	}
	return out;
}

std::string format_key_values(const KeyValues &settings)
{
	std::string out;
	for (const auto &[k, v] : settings) {
		out += k + " = " + v + "\n";
	}
	return out;
}

} // namespace styled2t
