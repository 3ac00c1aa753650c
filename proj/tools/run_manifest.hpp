// Copyright 2026 The persal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reproducibility record written next to every CLI output.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace persal::cli {

struct FileDigest {
  std::string path;
  std::string digest;  // 16 hex digits, FNV-1a 64

  friend bool operator==(const FileDigest&, const FileDigest&) = default;
};

struct RunManifest {
  std::string tool_version;
  std::string command;
  std::vector<std::string> args;  // argv after the program name, global flags removed
  std::string cwd;
  nlohmann::json config = nlohmann::json::object();
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

// Throws std::runtime_error when the file cannot be read.
std::string digest_file(const std::filesystem::path& path);

FileDigest describe(const std::filesystem::path& path);

void write_manifest(const RunManifest& m, const std::filesystem::path& path);

// Throws std::runtime_error on unreadable or malformed manifests.
RunManifest read_manifest(const std::filesystem::path& path);

// Paths whose current digest differs from the recorded one (missing files included).
std::vector<std::string> changed_files(const std::vector<FileDigest>& recorded);

// Drops the global flags that must not be replayed.
std::vector<std::string> replayable_args(const std::vector<std::string>& argv);

}  // namespace persal::cli
