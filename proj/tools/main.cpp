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

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "common.hpp"
#include "run_manifest.hpp"

namespace {

using namespace persal::cli;
namespace fs = std::filesystem;

std::size_t resolve_jobs(std::size_t flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("PERSAL_JOBS"); env && *env) {
    std::size_t v = 0;
    const std::string text = env;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || v == 0) {
      fail("PERSAL_JOBS must be a positive integer, got '" + text + "'");
    }
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int replay(const std::string& manifest_path, const std::string& manifest_override, std::size_t jobs);

// Parses args (argv without the program name) and runs one subcommand.
int dispatch(std::vector<std::string> args, bool allow_replay) {
  CLI::App app{"Personalized saliency toolkit", "persal"};
  app.set_version_flag("--version", std::string(persal_version()));
  app.fallthrough();
  std::size_t jobs = 0;
  std::string replay_path;
  std::string manifest;
  app.add_option("-j,--jobs", jobs, "Worker threads (default: $PERSAL_JOBS or all cores)");
  app.add_option("--replay", replay_path, "Re-run the invocation recorded in a run manifest");
  app.add_option("--manifest", manifest, "Where to write the run manifest");
  app.require_subcommand(0, 1);
  const auto commands = register_commands(app);

  const std::vector<std::string> recorded = replayable_args(args);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (!replay_path.empty()) {
    if (!allow_replay) fail("a replayed manifest may not itself request a replay");
    if (!app.get_subcommands().empty()) fail("--replay cannot be combined with a subcommand");
    return replay(replay_path, manifest, jobs);
  }
  for (const Command& c : commands) {
    if (c.app->parsed()) {
      Context ctx;
      ctx.jobs = resolve_jobs(jobs);
      ctx.manifest_override = manifest;
      ctx.args = recorded;
      return c.run(ctx);
    }
  }
  std::cerr << app.help();
  return kExitValidation;
}

int replay(const std::string& manifest_path, const std::string& manifest_override, std::size_t jobs) {
  RunManifest m;
  try {
    m = read_manifest(manifest_path);
  } catch (const std::exception& e) {
    fail_io(e.what());
  }
  if (m.tool_version != persal_version()) {
    std::cerr << "warning: manifest was written by version " << m.tool_version << ", this is "
              << persal_version() << "\n";
  }
  std::error_code ec;
  if (!m.cwd.empty() && fs::is_directory(m.cwd, ec)) fs::current_path(m.cwd, ec);
  if (const auto changed = changed_files(m.inputs); !changed.empty()) {
    std::string list;
    for (const auto& f : changed) list += "\n  " + f;
    fail("inputs changed since the recorded run:" + list);
  }

  std::vector<std::string> args;
  if (jobs > 0) args = {"--jobs", std::to_string(jobs)};
  if (!manifest_override.empty()) {
    args.push_back("--manifest");
    args.push_back(manifest_override);
  }
  args.insert(args.end(), m.args.begin(), m.args.end());
  const int code = dispatch(args, false);
  if (code != kExitOk) return code;

  if (const auto differ = changed_files(m.outputs); !differ.empty()) {
    std::string list;
    for (const auto& f : differ) list += "\n  " + f;
    fail("replay produced different outputs:" + list);
  }
  std::cerr << "replay: " << m.outputs.size() << " output(s) identical to the recorded run\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(std::move(args), true);
  } catch (const CliError& e) {
    std::cerr << "persal: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "persal: " << e.what() << "\n";
    return kExitValidation;
  }
}
