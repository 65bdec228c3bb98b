// Copyright 2026 The tlsmbt Authors.
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

// The `tlsmbt` command line: model build, testgen generate, tcio table,
// exec run, exec serve-sut and pipeline.
//
// Exit codes: 0 pass (or success), 1 fail, 2 inconclusive, 3 setup error.

#ifndef TLSMBT_TOOLS_CLI_H_
#define TLSMBT_TOOLS_CLI_H_

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "tlsmbt/exec.h"
#include "tlsmbt/testgen.h"

namespace tlsmbt::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitSetup = 3;

int exit_code(testgen::Verdict v);

enum class ReportFormat { json, text };

// One human-editable JSON file. Relative paths resolve against the file's
// directory. Exactly one of `mutant` / `address` is set.
struct PipelineConfig {
  std::optional<std::filesystem::path> model_config;
  std::string purpose = "I";  // I | II | III | path to a purpose DOT
  std::filesystem::path output_dir = "out";
  std::optional<exec::MutantId> mutant;
  std::optional<exec::Endpoint> address;
  std::chrono::milliseconds timeout = exec::kDefaultStepTimeout;
  ReportFormat report_format = ReportFormat::json;
  std::optional<std::filesystem::path> defaults;
};

// Throws std::invalid_argument.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Stage-tagged messages go to `err`; never throws.
int run_pipeline(const PipelineConfig& cfg, std::ostream& out,
                 std::ostream& err);

// Entry point shared by the binary and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace tlsmbt::cli

#endif  // TLSMBT_TOOLS_CLI_H_
