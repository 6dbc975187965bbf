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

#include "styled2t/training.hpp"

namespace styled2t {

/*
 * Directory layout:
 *   params/          manifest.json plus one float64 blob per tensor
 *   vocab.txt        one token per line after the reserved ids
 *   config.snapshot  key=value dump of the training configuration
 *   gate/            LM counts, classifier weights, thresholds
 *   corpus.jsonl     training triplets, used for logic graphs and references
 */
struct Checkpoint {
	std::unique_ptr<Model> model;
	TrainConfig config;
	GateArtifacts gate;
	std::vector<Triplet> corpus;
};

void save_checkpoint(const std::filesystem::path &dir, const Model &model, const TrainConfig &config,
	const GateArtifacts &gate, std::span<const Triplet> corpus);
Checkpoint load_checkpoint(const std::filesystem::path &dir);

} // namespace styled2t
