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
#include "styled2t/cli.hpp"

#include "styled2t/checkpoint.hpp"
#include "styled2t/config.hpp"
#include "styled2t/errors.hpp"
#include "styled2t/evaluation.hpp"
#include "styled2t/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace styled2t {

namespace {

using ojson = nlohmann::ordered_json;

// Seed used when neither a flag nor a config file sets one.
std::optional<std::uint64_t> env_seed()
{
	const char *v = std::getenv("STYLED2T_SEED");
	if (v == nullptr || *v == '\0') {
		return std::nullopt;
	}
	char *end = nullptr;
	const unsigned long long s = std::strtoull(v, &end, 10);
	if (*end != '\0') {
		throw Error(ErrorKind::ConfigInvalid, "STYLED2T_SEED must be an unsigned integer");
	}
	return s;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t> &flag, std::uint64_t fallback)
{
	if (flag) {
		return *flag;
	}
	return env_seed().value_or(fallback);
}

std::ofstream open_out(const std::string &path)
{
	std::ofstream out(path);
	if (!out) {
		throw Error(ErrorKind::IoError, "cannot write " + path);
	}
	return out;
}

int exit_code_for(ErrorKind kind)
{
	switch (kind) {
	case ErrorKind::ConfigInvalid:
		return kExitUsage;
	case ErrorKind::SchemaError:
	case ErrorKind::PlanUnderivable:
	case ErrorKind::EmptyCorpus:
	case ErrorKind::EmptyText:
	case ErrorKind::EmptyInput:
	case ErrorKind::EmptyReference:
	case ErrorKind::SingleStyleCorpus:
	case ErrorKind::DataMissingStyle:
	case ErrorKind::IoError:
		return kExitData;
	default:
		return kExitRuntime;
	}
}

struct GenDataArgs {
	std::optional<std::uint64_t> seed;
	std::string out;
	std::vector<int> counts{1000, 1000};
	int attributes = 16;
	int values = 6;
	int min_pairs = 3;
	int max_pairs = 6;
	double content_bias = 0.0;
	int test_per_style = 0;
	std::string test_out;
};

int cmd_gen_data(const GenDataArgs &a, std::ostream &out)
{
	GeneratorConfig g;
	g.seed = resolve_seed(a.seed, g.seed);
	g.count_per_style = a.counts;
	g.num_attributes = a.attributes;
	g.values_per_attribute = a.values;
	g.min_pairs = a.min_pairs;
	g.max_pairs = a.max_pairs;
	g.style_content_bias = a.content_bias;
	const std::vector<Triplet> corpus = generate_synthetic_corpus(g);
	if (a.test_per_style > 0) {
		if (a.test_out.empty()) {
			throw Error(ErrorKind::ConfigInvalid, "--test-per-style requires --test-out");
		}
		const CorpusSplit split = split_per_style(corpus, static_cast<int>(a.counts.size()), a.test_per_style);
		write_jsonl(a.out, split.train);
		write_jsonl(a.test_out, split.test);
		out << "wrote " << split.train.size() << " training and " << split.test.size() << " test triplets\n";
	} else {
		write_jsonl(a.out, corpus);
		out << "wrote " << corpus.size() << " triplets\n";
	}
	return kExitOk;
}

struct GraphArgs {
	std::string corpus;
	std::string input;
	std::string out;
	std::string format = "json";
	bool uniform = false;
	int num_styles = 2;
};

int cmd_build_graphs(const GraphArgs &a)
{
	const std::vector<Triplet> corpus = read_jsonl(a.corpus, a.num_styles);
	const std::vector<Triplet> inputs = a.input.empty() ? corpus : read_jsonl(a.input, a.num_styles);
	CorpusIndex index = make_corpus_index(corpus);
	std::ofstream out = open_out(a.out);
	for (const Triplet &t : inputs) {
		const LogicGraph g = a.uniform ? LogicGraph::uniform(static_cast<int>(t.data.size())) : index.graph_for(t.data);
		if (a.format == "dot") {
			out << g.to_dot(t.data) << '\n';
		} else {
			out << g.to_json(t.data) << '\n';
		}
	}
	return kExitOk;
}

struct TrainArgs {
	std::string data;
	std::string config;
	std::string out;
	std::string metrics;
	std::vector<std::string> settings;
	std::optional<std::uint64_t> seed;
	std::optional<int> epochs;
	std::optional<double> learning_rate;
	std::optional<int> batch;
	bool quiet = false;
};

int cmd_train(const TrainArgs &a, std::ostream &out)
{
	TrainConfig config;
	KeyValues file;
	if (!a.config.empty()) {
		file = read_key_values(a.config);
	}
	// Precedence: flag, then config file, then environment seed, then default.
	if (file.count("seed") == 0 && !a.seed) {
		if (auto s = env_seed()) {
			config.seed = *s;
		}
	}
	apply_settings(config, file);
	for (const std::string &kv : a.settings) {
		const auto eq = kv.find('=');
		if (eq == std::string::npos) {
			throw Error(ErrorKind::ConfigInvalid, "--set expects key=value, got " + kv);
		}
		apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
	}
	if (a.seed) {
		config.seed = *a.seed;
	}
	if (a.epochs) {
		config.epochs = *a.epochs;
	}
	if (a.learning_rate) {
		config.learning_rate = *a.learning_rate;
	}
	if (a.batch) {
		config.batch_per_style = *a.batch;
	}
	config.validate();

	const std::vector<Triplet> corpus = read_jsonl(a.data, config.model.num_styles);
	std::ofstream metrics;
	TrainHooks hooks;
	if (!a.metrics.empty()) {
		metrics = open_out(a.metrics);
		hooks.metrics = &metrics;
	}
	hooks.checkpoint_dir = a.out;
	if (!a.quiet) {
		hooks.on_epoch = [&out](int epoch, const Model &) { out << "epoch " << epoch + 1 << " done\n" << std::flush; };
	}
	const TrainResult result = train(corpus, config, hooks);
	// A zero-epoch run still leaves a usable checkpoint behind.
	if (config.epochs == 0) {
		save_checkpoint(a.out, *result.model, config, result.gate, corpus);
	}
	if (!result.log.empty()) {
		const LossBreakdown &last = result.log.back().terms;
		out << "final L_gen " << last.gen << " total " << last.total << " tau_rate " << last.tau_rate << '\n';
	}
	return kExitOk;
}

struct InferArgs {
	std::string checkpoint;
	std::string input;
	std::string out;
	std::optional<int> style;
	std::string reference;
	std::optional<int> max_len;
	std::optional<std::uint64_t> seed;
};

// Prepares inputs against the checkpoint's training corpus.
std::vector<PreparedInstance> prepare_inputs(const Checkpoint &c, const std::vector<Triplet> &inputs)
{
	CorpusIndex index = make_corpus_index(c.corpus);
	return prepare_all(*c.model, inputs, index);
}

int cmd_plan(const std::string &checkpoint, const std::string &input, const std::string &out_path)
{
	const Checkpoint c = load_checkpoint(checkpoint);
	const std::vector<Triplet> inputs = read_jsonl(input, c.config.model.num_styles);
	std::ofstream out = open_out(out_path);
	for (const PreparedInstance &p : prepare_inputs(c, inputs)) {
		out << ojson(c.model->predict_plan(p).order).dump() << '\n';
	}
	return kExitOk;
}

int cmd_infer(const InferArgs &a)
{
	const Checkpoint c = load_checkpoint(a.checkpoint);
	const int num_styles = c.config.model.num_styles;
	if (a.style && (*a.style < 0 || *a.style >= num_styles)) {
		throw Error(ErrorKind::ConfigInvalid, "--style out of range");
	}
	std::vector<Triplet> inputs = read_jsonl(a.input, num_styles);
	const auto by_style = indices_by_style(c.corpus, num_styles);
	Rng rng(resolve_seed(a.seed, c.config.seed));
	std::ofstream out = open_out(a.out);
	const int max_len = a.max_len.value_or(c.config.max_len);
	CorpusIndex index = make_corpus_index(c.corpus);
	for (Triplet t : inputs) {
		int style = t.style;
		Tokens reference = t.style_ref;
		if (!a.reference.empty()) {
			reference = tokenize(a.reference);
			style = a.style.value_or(t.style);
		} else if (a.style) {
			style = *a.style;
			const auto &pool = by_style[static_cast<std::size_t>(style)];
			const Triplet &donor = c.corpus[pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]];
			reference = donor.target ? *donor.target : donor.style_ref;
		}
		const PreparedInstance p = c.model->prepare(t, index);
		const GreedyResult g = c.model->generate(p, c.model->vocab().encode(reference), style, max_len);
		t.style = style;
		t.style_ref = reference;
		t.target = c.model->vocab().decode(g.tokens);
		ojson j = ojson::parse(to_jsonl_line(t));
		j["truncated"] = g.truncated;
		out << j.dump() << '\n';
	}
	return kExitOk;
}

int cmd_gate(const std::string &checkpoint, const std::string &input, const std::string &out_path)
{
	const GateArtifacts gate = GateArtifacts::load(std::filesystem::path(checkpoint) / "gate");
	// Candidates reuse the triplet schema: "target" is Y', "style_ref" is X', "style" is X''s label.
	const std::vector<Triplet> inputs = read_jsonl(input, gate.classifier.num_styles());
	std::ofstream out = open_out(out_path);
	for (const Triplet &t : inputs) {
		const Tokens candidate = t.target.value_or(Tokens{});
		const ConfidenceVerdict v =
			assign_confidence(candidate, t.style_ref, t.data, gate.lm, gate.classifier, gate.config, t.style);
		ojson j;
		j["tau"] = v.tau ? 1 : 0;
		j["length_ok"] = v.length_ok;
		j["ppl_ok"] = v.ppl_ok;
		j["style_ok"] = v.style_ok;
		j["coverage_ok"] = v.coverage_ok;
		j["length"] = v.scores.length;
		j["perplexity"] = std::isfinite(v.scores.perplexity) ? ojson(v.scores.perplexity) : ojson(nullptr);
		j["candidate_style"] = v.scores.candidate_style;
		j["reference_style"] = v.scores.reference_style;
		j["coverage"] = v.scores.coverage;
		out << j.dump() << '\n';
	}
	return kExitOk;
}

struct EvalArgs {
	std::string checkpoint;
	std::string test;
	std::string out;
	std::optional<int> max_len;
	std::optional<std::uint64_t> seed;
	bool rows = true;
};

int cmd_evaluate(const EvalArgs &a, std::ostream &out)
{
	const Checkpoint c = load_checkpoint(a.checkpoint);
	const std::vector<Triplet> test = read_jsonl(a.test, c.config.model.num_styles);
	const EvaluationReport report = evaluate_model(*c.model, c.config, c.corpus, test,
		a.max_len.value_or(c.config.max_len), resolve_seed(a.seed, c.config.seed));
	std::ofstream f = open_out(a.out);
	f << report.to_json(a.rows) << '\n';
	out << std::fixed << std::setprecision(2) << "style_accuracy " << 100.0 * report.style_accuracy << " coverage "
		<< 100.0 * report.coverage << " rouge_l " << 100.0 * report.rouge_l << " bleu_4 " << 100.0 * report.bleu_4
		<< '\n';
	return kExitOk;
}

int cmd_stats(const std::string &data, int num_styles, std::ostream &out)
{
	const std::vector<Triplet> corpus = read_jsonl(data, num_styles);
	if (corpus.empty()) {
		throw Error(ErrorKind::EmptyCorpus, "no triplets in " + data);
	}
	std::vector<std::size_t> count(static_cast<std::size_t>(num_styles), 0);
	std::vector<double> pairs(count.size(), 0.0), length(count.size(), 0.0);
	for (const Triplet &t : corpus) {
		const auto s = static_cast<std::size_t>(t.style);
		++count[s];
		pairs[s] += static_cast<double>(t.data.size());
		length[s] += t.target ? static_cast<double>(t.target->size()) : 0.0;
	}
	out << std::left << std::setw(8) << "Style" << std::setw(10) << "#Samples" << std::setw(14) << "#Avg Attr-val"
		<< "#Avg Len\n";
	std::size_t all = 0;
	double all_pairs = 0.0, all_len = 0.0;
	for (std::size_t s = 0; s < count.size(); ++s) {
		const double n = count[s] == 0 ? 1.0 : static_cast<double>(count[s]);
		out << std::setw(8) << s << std::setw(10) << count[s] << std::setw(14) << std::fixed << std::setprecision(2)
			<< pairs[s] / n << length[s] / n << '\n';
		all += count[s];
		all_pairs += pairs[s];
		all_len += length[s];
	}
	const auto n = static_cast<double>(all);
	out << std::setw(8) << "all" << std::setw(10) << all << std::setw(14) << all_pairs / n << all_len / n << '\n';
	return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
	CLI::App app{"Stylized data-to-text generation with logic planning and pseudo triplets", "styled2t"};
	app.require_subcommand(1);

	GenDataArgs gen;
	auto *gen_cmd = app.add_subcommand("gen-data", "Generate the synthetic two-style corpus as JSONL");
	gen_cmd->add_option("--out", gen.out, "Output JSONL path")->required();
	gen_cmd->add_option("--seed", gen.seed, "Generator seed (falls back to STYLED2T_SEED, then 7)");
	gen_cmd->add_option("--counts", gen.counts, "Triplets per style, e.g. --counts 1000 1000")->expected(2);
	gen_cmd->add_option("--attributes", gen.attributes, "Attribute pool size (1..16)");
	gen_cmd->add_option("--values", gen.values, "Values per attribute (1..6)");
	gen_cmd->add_option("--min-pairs", gen.min_pairs, "Fewest pairs per instance");
	gen_cmd->add_option("--max-pairs", gen.max_pairs, "Most pairs per instance");
	gen_cmd->add_option("--content-bias", gen.content_bias, "Probability of drawing style-specific attributes");
	gen_cmd->add_option("--test-per-style", gen.test_per_style, "Hold out this many triplets per style");
	gen_cmd->add_option("--test-out", gen.test_out, "Output path of the held-out split");

	GraphArgs graph;
	auto *graph_cmd = app.add_subcommand("build-graphs", "Export per-instance logic graphs");
	graph_cmd->add_option("--corpus", graph.corpus, "Training JSONL whose targets supply the statistics")->required();
	graph_cmd->add_option("--input", graph.input, "Instances to build graphs for (default: the corpus)");
	graph_cmd->add_option("--out", graph.out, "Output path, one graph per line")->required();
	graph_cmd->add_option("--format", graph.format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
	graph_cmd->add_flag("--uniform", graph.uniform, "Set every off-diagonal weight to 1");
	graph_cmd->add_option("--num-styles", graph.num_styles, "Number of styles in the data");

	TrainArgs tr;
	auto *train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint directory");
	train_cmd->add_option("--data", tr.data, "Training JSONL")->required();
	train_cmd->add_option("--out", tr.out, "Checkpoint directory")->required();
	train_cmd->add_option("--config", tr.config, "key = value config file");
	train_cmd->add_option("--metrics", tr.metrics, "Per-iteration metrics JSONL");
	train_cmd->add_option("--set", tr.settings, "Override a config key, e.g. --set no_pseudo=true");
	train_cmd->add_option("--seed", tr.seed, "Training seed");
	train_cmd->add_option("--epochs", tr.epochs, "Number of epochs");
	train_cmd->add_option("--lr", tr.learning_rate, "Learning rate");
	train_cmd->add_option("--batch", tr.batch, "Batch size per style");
	train_cmd->add_flag("--quiet", tr.quiet, "No per-epoch progress lines");

	std::string plan_ckpt, plan_in, plan_out;
	auto *plan_cmd = app.add_subcommand("plan", "Predict pair orders as JSON lists of 1-based indices");
	plan_cmd->add_option("--checkpoint", plan_ckpt, "Checkpoint directory")->required();
	plan_cmd->add_option("--input", plan_in, "Instances JSONL")->required();
	plan_cmd->add_option("--out", plan_out, "Output path")->required();

	InferArgs inf;
	auto *infer_cmd = app.add_subcommand("infer", "Generate stylized texts");
	infer_cmd->add_option("--checkpoint", inf.checkpoint, "Checkpoint directory")->required();
	infer_cmd->add_option("--input", inf.input, "Instances JSONL")->required();
	infer_cmd->add_option("--out", inf.out, "Output JSONL with generated targets")->required();
	infer_cmd->add_option("--style", inf.style, "Target style id; a reference is drawn from the training corpus");
	infer_cmd->add_option("--reference", inf.reference, "Explicit style reference text");
	infer_cmd->add_option("--max-len", inf.max_len, "Decoding cap in tokens");
	infer_cmd->add_option("--seed", inf.seed, "Seed for reference sampling");

	std::string gate_ckpt, gate_in, gate_out;
	auto *gate_cmd = app.add_subcommand("gate", "Score candidates with the confidence gate");
	gate_cmd->add_option("--checkpoint", gate_ckpt, "Checkpoint directory")->required();
	gate_cmd->add_option("--input", gate_in, "Candidates JSONL (target = candidate, style_ref = reference)")
		->required();
	gate_cmd->add_option("--out", gate_out, "Verdicts JSONL")->required();

	EvalArgs ev;
	auto *eval_cmd = app.add_subcommand("evaluate", "Style accuracy, coverage, ROUGE-L and BLEU-4 on a test split");
	eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint directory")->required();
	eval_cmd->add_option("--test", ev.test, "Test JSONL")->required();
	eval_cmd->add_option("--out", ev.out, "Report JSON")->required();
	eval_cmd->add_option("--max-len", ev.max_len, "Decoding cap in tokens");
	eval_cmd->add_option("--seed", ev.seed, "Seed for reference sampling");

	std::string stats_data;
	int stats_styles = 2;
	auto *stats_cmd = app.add_subcommand("stats", "Per-style sample counts, average pairs and lengths");
	stats_cmd->add_option("--data", stats_data, "JSONL corpus")->required();
	stats_cmd->add_option("--num-styles", stats_styles, "Number of styles in the data");

	std::vector<std::string> reversed(args.rbegin(), args.rend());
	try {
		app.parse(reversed);
	} catch (const CLI::CallForHelp &e) {
		out << app.help();
		return kExitOk;
	} catch (const CLI::CallForAllHelp &e) {
		out << app.help("", CLI::AppFormatMode::All);
		return kExitOk;
	} catch (const CLI::ParseError &e) {
		err << "styled2t: error[Usage]: " << e.what() << '\n';
		const auto subs = app.get_subcommands();
		err << (subs.empty() ? app.help() : subs.front()->help());
		return kExitUsage;
	}

	try {
		if (gen_cmd->parsed()) {
			return cmd_gen_data(gen, out);
		}
		if (graph_cmd->parsed()) {
			return cmd_build_graphs(graph);
		}
		if (train_cmd->parsed()) {
			return cmd_train(tr, out);
		}
		if (plan_cmd->parsed()) {
			return cmd_plan(plan_ckpt, plan_in, plan_out);
		}
		if (infer_cmd->parsed()) {
			return cmd_infer(inf);
		}
		if (gate_cmd->parsed()) {
			return cmd_gate(gate_ckpt, gate_in, gate_out);
		}
		if (eval_cmd->parsed()) {
			return cmd_evaluate(ev, out);
		}
		if (stats_cmd->parsed()) {
			return cmd_stats(stats_data, stats_styles, out);
		}
	} catch (const Error &e) {
		err << "styled2t: error[" << error_kind_name(e.kind()) << "]: " << e.what() << '\n';
		return exit_code_for(e.kind());
	} catch (const std::exception &e) {
		err << "styled2t: error[Runtime]: " << e.what() << '\n';
		return kExitRuntime;
	}
	return kExitUsage;
}

int run_cli(int argc, char **argv)
{
	std::vector<std::string> args(argv + 1, argv + argc);
	return run_cli(args, std::cout, std::cerr);
}

} // namespace styled2t
