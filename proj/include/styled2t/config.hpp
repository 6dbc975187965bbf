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

#include <map>

namespace styled2t {

using KeyValues = std::map<std::string, std::string>;

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
KeyValues parse_key_values(std::istream &in);
KeyValues read_key_values(const std::filesystem::path &path);

/// Throws ConfigInvalid for unknown keys or unparsable values.
void apply_setting(TrainConfig &config, const std::string &key, const std::string &value);
void apply_settings(TrainConfig &config, const KeyValues &settings);

/// Every key understood by apply_setting, with its current value.
KeyValues to_key_values(const TrainConfig &config);
std::string format_key_values(const KeyValues &settings);

} // namespace styled2t
