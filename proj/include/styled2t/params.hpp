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

#include "styled2t/ad.hpp"

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace styled2t {

using Rng = std::mt19937_64;

/// Owns every trainable tensor of a model, in registration order.
class ParameterSet {
public:
	ParameterSet() = default;
	ParameterSet(const ParameterSet &) = delete;
	ParameterSet &operator=(const ParameterSet &) = delete;

	ad::Parameter &add(const std::string &name, Eigen::Index rows, Eigen::Index cols);
	ad::Parameter &add_normal(const std::string &name, Eigen::Index rows, Eigen::Index cols, double stddev, Rng &rng);
	ad::Parameter &add_uniform(const std::string &name, Eigen::Index rows, Eigen::Index cols, double bound, Rng &rng);
	ad::Parameter &add_constant(const std::string &name, Eigen::Index rows, Eigen::Index cols, double value);

	ad::Parameter *find(const std::string &name);
	const ad::Parameter *find(const std::string &name) const;
	ad::Parameter &at(const std::string &name);

	std::size_t size() const { return params_.size(); }
	ad::Parameter &operator[](std::size_t i) { return *params_[i]; }
	const ad::Parameter &operator[](std::size_t i) const { return *params_[i]; }

	std::size_t scalar_count() const;
	void zero_grad();
	double grad_norm() const;

	/// Writes `manifest.json` plus one little-endian float64 blob per tensor.
	void save(const std::filesystem::path &dir) const;
	/// Loads values into already-registered tensors; names and shapes must match.
	void load(const std::filesystem::path &dir);

private:
	std::vector<std::unique_ptr<ad::Parameter>> params_;
};

} // namespace styled2t
