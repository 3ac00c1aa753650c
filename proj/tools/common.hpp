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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "persal/persal.h"
#include "run_manifest.hpp"

namespace persal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Carries the process exit code alongside the diagnostic.
class CliError : public std::runtime_error {
 public:
  CliError(int exit_code, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

[[noreturn]] inline void fail(const std::string& message) {
  throw CliError(kExitValidation, message);
}

[[noreturn]] inline void fail_io(const std::string& message) { throw CliError(kExitIo, message); }

// Throws CliError with the library's message when status is not PERSAL_OK.
void check(persal_status status, const std::string& context);

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const noexcept { Destroy(p); }
};

using Grid = std::unique_ptr<persal_grid, Deleter<persal_grid, persal_grid_destroy>>;
using Mapping = std::unique_ptr<persal_mapping, Deleter<persal_mapping, persal_mapping_destroy>>;
using Pvec = std::unique_ptr<persal_pvec, Deleter<persal_pvec, persal_pvec_destroy>>;
using Dataset = std::unique_ptr<persal_dataset, Deleter<persal_dataset, persal_dataset_destroy>>;
using Report = std::unique_ptr<persal_report, Deleter<persal_report, persal_report_destroy>>;
using Sweep = std::unique_ptr<persal_sweep, Deleter<persal_sweep, persal_sweep_destroy>>;

// Takes ownership of a library-allocated string.
std::string take_string(char* s);

struct Shape {
  std::size_t height = 38;
  std::size_t width = 38;
};

Shape parse_shape(const std::string& text);  // "38x38"
std::vector<double> parse_list(const std::string& text);  // "0.1,0.2"

Grid read_grid(const std::filesystem::path& path);
void write_grid(const persal_grid* g, const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
void ensure_dir(const std::filesystem::path& dir);

Mapping load_mapping(const std::string& path);  // empty path = built-in COCO mapping
Pvec load_pvec(const std::string& path);
// A manifest file or a directory of manifest files.
Dataset load_dataset(const std::string& path);

// Every file the dataset was read from, fixation maps included.
std::vector<std::filesystem::path> dataset_files(const std::string& path, const persal_dataset* d);

// Regular files with the given extension, sorted by name.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir,
                                              const std::string& extension);

std::string file_stem_for(const std::string& image_id);

std::string grid_shape(const persal_grid* g);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The exception of the
// lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// Everything a subcommand needs to know about the invocation.
struct Context {
  std::size_t jobs = 1;
  std::string manifest_override;  // --manifest
  std::vector<std::string> args;  // replayable argv tail
};

// Collects inputs and outputs, then writes the RunManifest.
class RunRecorder {
 public:
  RunRecorder(const Context& ctx, std::string command);

  void input(const std::filesystem::path& path);
  void output(const std::filesystem::path& path);
  nlohmann::json& config() { return manifest_.config; }
  void add_arg(const std::string& flag, const std::string& value);

  // default_location is used unless --manifest was given.
  std::filesystem::path finish(const std::filesystem::path& default_location);

 private:
  const Context& ctx_;
  RunManifest manifest_;
};

std::filesystem::path manifest_beside_file(const std::filesystem::path& file);

}  // namespace persal::cli
