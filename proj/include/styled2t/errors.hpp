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

#include <stdexcept>
#include <string>
#include <string_view>

namespace styled2t {

enum class ErrorKind {
	PlanUnderivable,
	SchemaError,
	ConfigInvalid,
	ShapeMismatch,
	EmptyPlan,
	EmptyReference,
	MissingCenter,
	EmptyCorpus,
	EmptyText,
	SingleStyleCorpus,
	EmptyInput,
	DataMissingStyle,
	IoError,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
	Error(ErrorKind kind, const std::string &what)
		: std::runtime_error(what), kind_(kind)
	{
	}

	ErrorKind kind() const { return kind_; }

private:
	ErrorKind kind_;
};

/// Malformed JSONL record; `line` is 1-based.
class SchemaError : public Error {
public:
	SchemaError(std::size_t line, const std::string &what)
		: Error(ErrorKind::SchemaError, "line " + std::to_string(line) + ": " + what), line_(line)
	{
	}

	std::size_t line() const { return line_; }

private:
	std::size_t line_;
};

} // namespace styled2t
