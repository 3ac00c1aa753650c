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

#include <functional>
#include <vector>

#include "CLI11.hpp"
#include "common.hpp"

namespace persal::cli {

struct Command {
  CLI::App* app = nullptr;
  std::function<int(const Context&)> run;
};

// Adds every subcommand to `app`. Option storage lives as long as the app.
std::vector<Command> register_commands(CLI::App& app);

}  // namespace persal::cli
