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

#include "common.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <system_error>
#include <thread>

namespace persal::cli {

namespace fs = std::filesystem;

void check(persal_status status, const std::string& context) {
  if (status == PERSAL_OK) return;
  const std::string message = context + ": " + persal_last_error();
  throw CliError(persal_status_is_io(status) ? kExitIo : kExitValidation, message);
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  persal_string_free(s);
  return out;
}

namespace {

std::size_t parse_size(const std::string& text, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v == 0) {
    fail("invalid " + what + " '" + text + "'");
  }
  return v;
}

}  // namespace

Shape parse_shape(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) fail("grid size must look like 38x38, got '" + text + "'");
  return {parse_size(text.substr(0, x), "grid height"), parse_size(text.substr(x + 1), "grid width")};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      fail("invalid number '" + item + "' in list '" + text + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

Grid read_grid(const fs::path& path) {
  persal_grid* g = nullptr;
  check(persal_grid_read(path.string().c_str(), &g), "read");
  return Grid(g);
}

void write_grid(const persal_grid* g, const fs::path& path) {
  check(persal_grid_write(g, path.string().c_str()), "writing " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail_io("cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail_io("cannot create directory " + dir.string() + ": " + ec.message());
}

Mapping load_mapping(const std::string& path) {
  persal_mapping* m = nullptr;
  if (path.empty()) {
    check(persal_mapping_coco_default(&m), "built-in mapping");
  } else {
    check(persal_mapping_load(path.c_str(), &m), "mapping " + path);
  }
  return Mapping(m);
}

Pvec load_pvec(const std::string& path) {
  persal_pvec* p = nullptr;
  check(persal_pvec_load(path.c_str(), &p), "preference vector " + path);
  return Pvec(p);
}

Dataset load_dataset(const std::string& path) {
  std::error_code ec;
  persal_dataset* d = nullptr;
  if (fs::is_directory(path, ec)) {
    check(persal_dataset_load_dir(path.c_str(), &d), "annotations " + path);
  } else {
    check(persal_dataset_load(path.c_str(), &d), "annotations " + path);
  }
  return Dataset(d);
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail_io(dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) out.push_back(entry.path());
  }
  if (ec) fail_io("cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> dataset_files(const std::string& path, const persal_dataset* d) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    out = list_files(path, ".json");
  } else {
    out.push_back(path);
  }
  for (std::size_t i = 0; i < persal_dataset_size(d); ++i) {
    if (const char* f = persal_dataset_fixation_path(d, i)) out.emplace_back(f);
  }
  return out;
}

std::string file_stem_for(const std::string& image_id) {
  char* s = nullptr;
  check(persal_safe_file_stem(image_id.c_str(), &s), "image id");
  return take_string(s);
}

std::string grid_shape(const persal_grid* g) {
  return std::to_string(persal_grid_height(g)) + "x" + std::to_string(persal_grid_width(g));
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RunRecorder::RunRecorder(const Context& ctx, std::string command) : ctx_(ctx) {
  manifest_.tool_version = persal_version();
  manifest_.command = std::move(command);
  manifest_.args = ctx.args;
  std::error_code ec;
  manifest_.cwd = fs::current_path(ec).string();
}

void RunRecorder::input(const fs::path& path) {
  try {
    manifest_.inputs.push_back(describe(path));
  } catch (const std::exception& e) {
    fail_io(e.what());
  }
}

void RunRecorder::output(const fs::path& path) {
  try {
    manifest_.outputs.push_back(describe(path));
  } catch (const std::exception& e) {
    fail_io(e.what());
  }
}

void RunRecorder::add_arg(const std::string& flag, const std::string& value) {
  manifest_.args.push_back(flag);
  manifest_.args.push_back(value);
}

fs::path RunRecorder::finish(const fs::path& default_location) {
  const fs::path where =
      ctx_.manifest_override.empty() ? default_location : fs::path(ctx_.manifest_override);
  try {
    write_manifest(manifest_, where);
  } catch (const std::exception& e) {
    fail_io(e.what());
  }
  return where;
}

fs::path manifest_beside_file(const fs::path& file) {
  return file.parent_path() / (file.filename().string() + ".manifest.json");
}

}  // namespace persal::cli
