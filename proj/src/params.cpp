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
#include "styled2t/params.hpp"

#include "styled2t/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace styled2t {

ad::Parameter &ParameterSet::add(const std::string &name, Eigen::Index rows, Eigen::Index cols)
{
	if (find(name)) {
		throw Error(ErrorKind::ConfigInvalid, "duplicate parameter name " + name);
	}
	auto p = std::make_unique<ad::Parameter>();
	p->name = name;
	p->value = Matrix::Zero(rows, cols);
	p->grad = Matrix::Zero(rows, cols);
	params_.push_back(std::move(p));
	return *params_.back();
}

ad::Parameter &ParameterSet::add_normal(const std::string &name, Eigen::Index rows, Eigen::Index cols,
	double stddev, Rng &rng)
{
	ad::Parameter &p = add(name, rows, cols);
	std::normal_distribution<double> dist(0.0, stddev);
	for (Eigen::Index i = 0; i < rows; ++i) {
		for (Eigen::Index j = 0; j < cols; ++j) {
			p.value(i, j) = dist(rng);
		}
	}
	return p;
}

ad::Parameter &ParameterSet::add_uniform(const std::string &name, Eigen::Index rows, Eigen::Index cols,
	double bound, Rng &rng)
{
	ad::Parameter &p = add(name, rows, cols);
	std::uniform_real_distribution<double> dist(-bound, bound);
	for (Eigen::Index i = 0; i < rows; ++i) {
		for (Eigen::Index j = 0; j < cols; ++j) {
			p.value(i, j) = dist(rng);
		}
	}
	return p;
}

ad::Parameter &ParameterSet::add_constant(const std::string &name, Eigen::Index rows, Eigen::Index cols, double value)
{
	ad::Parameter &p = add(name, rows, cols);
	p.value.setConstant(value);
	return p;
}

ad::Parameter *ParameterSet::find(const std::string &name)
{
	for (auto &p : params_) {
		if (p->name == name) {
			return p.get();
		}
	}
	return nullptr;
}

const ad::Parameter *ParameterSet::find(const std::string &name) const
{
	for (const auto &p : params_) {
		if (p->name == name) {
			return p.get();
		}
	}
	return nullptr;
}

ad::Parameter &ParameterSet::at(const std::string &name)
{
	ad::Parameter *p = find(name);
	if (!p) {
		throw Error(ErrorKind::ConfigInvalid, "unknown parameter " + name);
	}
	return *p;
}

std::size_t ParameterSet::scalar_count() const
{
	std::size_t n = 0;
	for (const auto &p : params_) {
		n += static_cast<std::size_t>(p->value.size());
	}
	return n;
}

void ParameterSet::zero_grad()
{
	for (auto &p : params_) {
		p->zero_grad();
	}
}

double ParameterSet::grad_norm() const
{
	double sq = 0.0;
	for (const auto &p : params_) {
		if (p->grad.size() != 0) {
			sq += p->grad.squaredNorm();
		}
	}
	return std::sqrt(sq);
}

void ParameterSet::save(const std::filesystem::path &dir) const
{
	std::filesystem::create_directories(dir);
	nlohmann::json manifest = nlohmann::json::array();
	for (const auto &p : params_) {
		const std::string file = p->name + ".bin";
		std::ofstream out(dir / file, std::ios::binary);
		if (!out) {
			throw Error(ErrorKind::IoError, "cannot write " + (dir / file).string());
		}
		// Row-major on disk, independent of Eigen's storage order.
		for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
			for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
				const double v = p->value(i, j);
				out.write(reinterpret_cast<const char *>(&v), sizeof v);
			}
		}
		manifest.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}, {"file", file}});
	}
	std::ofstream m(dir / "manifest.json");
	m << manifest.dump(1) << '\n';
}

void ParameterSet::load(const std::filesystem::path &dir)
{
	std::ifstream m(dir / "manifest.json");
	if (!m) {
		throw Error(ErrorKind::IoError, "missing " + (dir / "manifest.json").string());
	}
	const nlohmann::json manifest = nlohmann::json::parse(m);
	if (manifest.size() != params_.size()) {
		throw Error(ErrorKind::ShapeMismatch, "checkpoint has " + std::to_string(manifest.size()) +
			" tensors, model expects " + std::to_string(params_.size()));
	}
	for (const auto &entry : manifest) {
		const std::string name = entry.at("name");
		ad::Parameter &p = at(name);
		const Eigen::Index r = entry.at("rows"), c = entry.at("cols");
		if (r != p.value.rows() || c != p.value.cols()) {
			throw Error(ErrorKind::ShapeMismatch, "shape mismatch for " + name);
		}
		std::ifstream in(dir / entry.at("file").get<std::string>(), std::ios::binary);
		for (Eigen::Index i = 0; i < r; ++i) {
			for (Eigen::Index j = 0; j < c; ++j) {
				double v = 0.0;
				in.read(reinterpret_cast<char *>(&v), sizeof v);
				p.value(i, j) = v;
			}
		}
		if (!in) {
			throw Error(ErrorKind::IoError, "truncated tensor file for " + name);
		}
	}
}

} // namespace styled2t
