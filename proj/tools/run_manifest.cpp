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

#include "run_manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "persal/persal.h"

namespace persal::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json digests_to_json(const std::vector<FileDigest>& files) {
  json out = json::array();
  for (const FileDigest& f : files) out.push_back({{"path", f.path}, {"digest", f.digest}});
  return out;
}

std::vector<FileDigest> digests_from_json(const json& j) {
  std::vector<FileDigest> out;
  for (const json& f : j) out.push_back({f.at("path").get<std::string>(), f.at("digest").get<std::string>()});
  return out;
}

}  // namespace

json RunManifest::to_json() const {
  return {{"tool", "persal"},
          {"tool_version", tool_version},
          {"command", command},
          {"args", args},
          {"cwd", cwd},
          {"config", config},
          {"inputs", digests_to_json(inputs)},
          {"outputs", digests_to_json(outputs)}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.args = j.at("args").get<std::vector<std::string>>();
  m.cwd = j.value("cwd", std::string());
  m.config = j.value("config", json::object());
  m.inputs = digests_from_json(j.value("inputs", json::array()));
  m.outputs = digests_from_json(j.value("outputs", json::array()));
  return m;
}

std::string digest_file(const fs::path& path) {
  std::uint64_t d = 0;
  if (persal_file_digest(path.string().c_str(), &d) != PERSAL_OK) {
    throw std::runtime_error(persal_last_error());
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
  return buf;
}

FileDigest describe(const fs::path& path) { return {path.string(), digest_file(path)}; }

void write_manifest(const RunManifest& m, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << m.to_json().dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

RunManifest read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), {}};
  try {
    return RunManifest::from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": not a run manifest (" + e.what() + ")");
  }
}

std::vector<std::string> changed_files(const std::vector<FileDigest>& recorded) {
  std::vector<std::string> out;
  for (const FileDigest& f : recorded) {
    std::uint64_t d = 0;
    char buf[17] = {};
    if (persal_file_digest(f.path.c_str(), &d) == PERSAL_OK) {
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
    }
    if (f.digest != buf) out.push_back(f.path);
  }
  return out;
}

std::vector<std::string> replayable_args(const std::vector<std::string>& argv) {
  static const char* const kWithValue[] = {"--replay", "--manifest", "--jobs", "-j"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    const std::string& a = argv[i];
    bool skip = false;
    for (const char* flag : kWithValue) {
      const std::string f = flag;
      if (a == f) {
        ++i;  // and its value
        skip = true;
      } else if (a.rfind(f + "=", 0) == 0) {
        skip = true;
      }
    }
    if (!skip) out.push_back(a);
  }
  return out;
}

}  // namespace persal::cli
