// Copyright 2026 The ocm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Declarative experiment runner behind the command-line tool. A run reads
// one JSON config (grid, state, experiment, output blocks), rejects unknown
// keys, builds the state, executes the experiment, and writes result files
// plus manifest.json (resolved config, version, seed, wall time).

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ocm::experiment {

inline constexpr const char* kVersion = "0.1.0";

struct Overrides {
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
};

struct RunOutcome {
    std::filesystem::path out_dir;
    std::vector<std::string> files;  ///< result files, manifest excluded
    nlohmann::ordered_json summary;
    nlohmann::ordered_json resolved;  ///< config with defaults filled in
};

/// Executes a parsed config. Relative paths inside the config (state files,
/// output directory) resolve against `base_dir`.
RunOutcome run(const nlohmann::json& config, const Overrides& ov, const std::filesystem::path& base_dir);
RunOutcome run_file(const std::filesystem::path& config_path, const Overrides& ov);

/// Deviation report between two distribution CSVs: total variation, max
/// abs deviation, and fringe metrics of each (null when no fringe).
nlohmann::ordered_json compare(const std::filesystem::path& a, const std::filesystem::path& b);

/// 2 schema, 3 physics precondition, 4 resource cap, 1 anything else.
int exit_code(const std::exception& e);
/// {"error": {"kind", "exit_code", "message"}}.
nlohmann::ordered_json error_report(const std::exception& e);

}  // namespace ocm::experiment
