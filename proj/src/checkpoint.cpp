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
#include "styled2t/checkpoint.hpp"

#include "styled2t/config.hpp"
#include "styled2t/errors.hpp"

#include <fstream>

namespace styled2t {

void save_checkpoint(const std::filesystem::path &dir, const Model &model, const TrainConfig &config,
	const GateArtifacts &gate, std::span<const Triplet> corpus)
{
	std::filesystem::create_directories(dir);
	model.params().save(dir / "params");
	model.vocab().save(dir / "vocab.txt");
	TrainConfig snapshot = config;
	snapshot.model = model.config();
	snapshot.flags = model.flags();
	std::ofstream cfg(dir / "config.snapshot");
	if (!cfg) {
		throw Error(ErrorKind::IoError, "cannot write " + (dir / "config.snapshot").string());
	}
	cfg << format_key_values(to_key_values(snapshot));
	gate.save(dir / "gate");
	write_jsonl(dir / "corpus.jsonl", corpus);
}

Checkpoint load_checkpoint(const std::filesystem::path &dir)
{
	if (!std::filesystem::is_directory(dir)) {
		throw Error(ErrorKind::IoError, "checkpoint directory not found: " + dir.string());
	}
	Checkpoint c;
	apply_settings(c.config, read_key_values(dir / "config.snapshot"));
	c.config.validate();
	c.model = std::make_unique<Model>(Vocabulary::load(dir / "vocab.txt"), c.config.model, c.config.flags);
	c.model->params().load(dir / "params");
	c.gate = GateArtifacts::load(dir / "gate");
	c.corpus = read_jsonl(dir / "corpus.jsonl", c.config.model.num_styles);
	return c;
}

} // namespace styled2t
