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

#include "cli.h"

#include <atomic>
#include <csignal>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "tlsmbt/lts.h"
#include "tlsmbt/model.h"
#include "tlsmbt/tcio.h"

namespace tlsmbt::cli {
namespace fs = std::filesystem;

namespace {

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Runs `f`, tagging any escaping exception with `name`.
template <typename F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text,
          std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
}

model::ModelConfig model_config_from(const std::string& path) {
  if (path.empty()) return model::ModelConfig{};
  return model::load_model_config(path);
}

testgen::TestPurpose purpose_from(const std::string& selector) {
  if (selector.ends_with(".dot")) {
    return tcio::parse_purpose_dot(read_text(selector));
  }
  return testgen::purpose_by_name(selector);
}

exec::MessageDefaults defaults_from(const model::ModelConfig& cfg,
                                    const std::string& path) {
  auto d = exec::default_payloads(cfg);
  if (path.empty()) return d;
  return exec::load_message_defaults(path, std::move(d));
}

std::string render(const exec::ExecutionReport& r, ReportFormat f) {
  return f == ReportFormat::json ? exec::report_to_json(r)
                                 : exec::report_to_text(r);
}

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }

// Options shared by several subcommands.
struct Options {
  std::string config;
  // model build
  std::string model_dot;
  std::size_t depth = 0;
  // testgen generate
  std::string purpose = "I";
  std::string out;
  // tcio table
  std::string tc;
  bool lenient = false;
  // exec run / serve-sut
  std::string target;
  std::string mutant;
  std::string bind = "127.0.0.1:4433";
  long timeout_ms = exec::kDefaultStepTimeout.count();
  std::string report;
  std::string format = "json";
  std::string defaults;
  long duration_ms = 0;
  // pipeline
  std::string pipeline;
};

int cmd_model_build(const Options& o, std::ostream& out) {
  const auto cfg = stage("config", [&] { return model_config_from(o.config); });
  const lts::Lts m =
      stage("model", [&] { return model::build_handshake_model(cfg); });
  out << "states: " << m.state_count() << "\n";
  out << "transitions: " << m.transitions().size() << "\n";
  if (o.depth > 0) {
    const auto traces =
        stage("model", [&] { return lts::enumerate_traces(m, o.depth); });
    out << "traces (depth <= " << o.depth << "): " << traces.size() << "\n";
  }
  if (!o.model_dot.empty()) {
    stage("export", [&] {
      testgen::TestCase as_graph{m};
      write_text(o.model_dot, tcio::export_dot(as_graph));
    });
  }
  return kExitPass;
}

int cmd_generate(const Options& o, std::ostream& out) {
  const auto cfg = stage("config", [&] { return model_config_from(o.config); });
  const lts::Lts m =
      stage("model", [&] { return model::build_handshake_model(cfg); });
  const auto tp = stage("purpose", [&] { return purpose_from(o.purpose); });
  const auto tc = stage("generate", [&] { return testgen::generate(m, tp); });
  stage("export", [&] { emit(o.out, tcio::export_dot(tc), out); });
  return kExitPass;
}

int cmd_table(const Options& o, std::ostream& out) {
  const auto tc = stage("load", [&] {
    return tcio::parse_dot(read_text(o.tc), o.lenient);
  });
  stage("table", [&] {
    emit(o.out, tcio::table_to_csv(tcio::transition_table(tc)), out);
  });
  return kExitPass;
}

int cmd_exec_run(const Options& o, std::ostream& out) {
  const auto cfg = stage("config", [&] { return model_config_from(o.config); });
  const lts::Lts m =
      stage("model", [&] { return model::build_handshake_model(cfg); });
  const auto tc =
      stage("load", [&] { return tcio::parse_dot(read_text(o.tc)); });
  const auto defaults =
      stage("defaults", [&] { return defaults_from(cfg, o.defaults); });
  const ReportFormat format =
      o.format == "text" ? ReportFormat::text : ReportFormat::json;

  std::unique_ptr<exec::SutAdapter> adapter = stage("connect", [&] {
    std::unique_ptr<exec::SutAdapter> a;
    if (!o.mutant.empty()) {
      auto id = exec::mutant_from_string(o.mutant);
      if (!id) throw std::invalid_argument("unknown mutant " + o.mutant);
      a = std::make_unique<exec::SimulatedSut>(cfg, *id);
    } else {
      const auto ep = exec::parse_endpoint(o.target);
      a = std::make_unique<exec::TcpTransport>(ep.host, ep.port);
    }
    return a;
  });
  const auto report = stage("exec", [&] {
    return exec::run(tc, *adapter, m, std::chrono::milliseconds(o.timeout_ms),
                     defaults);
  });
  adapter->close();
  out << exec::report_to_text(report);
  if (!o.report.empty()) {
    stage("report", [&] { write_text(o.report, render(report, format)); });
  }
  return exit_code(report.verdict);
}

int cmd_serve(const Options& o, std::ostream& out) {
  const auto cfg = stage("config", [&] { return model_config_from(o.config); });
  const auto id = stage("serve", [&] {
    auto m = exec::mutant_from_string(o.mutant);
    if (!m) throw std::invalid_argument("unknown mutant " + o.mutant);
    return *m;
  });
  auto server = stage("bind", [&] {
    return std::make_unique<exec::SutServer>(exec::parse_endpoint(o.bind), cfg,
                                             id);
  });
  out << "serving " << exec::to_string(id) << " on port " << server->port()
      << std::endl;
  g_stop = false;
  auto old_int = std::signal(SIGINT, on_signal);
  auto old_term = std::signal(SIGTERM, on_signal);
  const auto until = std::chrono::steady_clock::now() +
                     std::chrono::milliseconds(o.duration_ms);
  while (!g_stop &&
         (o.duration_ms <= 0 || std::chrono::steady_clock::now() < until)) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  server->stop();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  return kExitPass;
}

}  // namespace

int exit_code(testgen::Verdict v) {
  switch (v) {
    case testgen::Verdict::pass: return kExitPass;
    case testgen::Verdict::fail: return kExitFail;
    case testgen::Verdict::inconclusive: return kExitInconclusive;
  }
  return kExitSetup;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument(path.string() + ": expected a JSON object");
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  PipelineConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "model_config") {
        c.model_config = resolve(v.get<std::string>());
      } else if (key == "purpose") {
        c.purpose = v.get<std::string>();
        if (c.purpose.ends_with(".dot")) c.purpose = resolve(c.purpose).string();
      } else if (key == "output_dir") {
        c.output_dir = resolve(v.get<std::string>());
      } else if (key == "mutant") {
        c.mutant = exec::mutant_from_string(v.get<std::string>());
        if (!c.mutant) {
          throw std::invalid_argument("unknown mutant " + v.get<std::string>());
        }
      } else if (key == "target") {
        c.address = exec::parse_endpoint(v.get<std::string>());
      } else if (key == "timeout_ms") {
        const long ms = v.get<long>();
        if (ms <= 0) throw std::invalid_argument("timeout_ms must be positive");
        c.timeout = std::chrono::milliseconds(ms);
      } else if (key == "report_format") {
        const auto f = v.get<std::string>();
        if (f != "json" && f != "text") {
          throw std::invalid_argument("report_format must be json or text");
        }
        c.report_format = f == "json" ? ReportFormat::json : ReportFormat::text;
      } else if (key == "defaults") {
        c.defaults = resolve(v.get<std::string>());
      } else {
        throw std::invalid_argument("unknown key " + key);
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  } catch (const exec::SetupError& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  if (c.mutant.has_value() == c.address.has_value()) {
    throw std::invalid_argument(path.string() +
                                ": set exactly one of mutant, target");
  }
  return c;
}

int run_pipeline(const PipelineConfig& c, std::ostream& out,
                 std::ostream& err) {
  try {
    const auto cfg = stage("config", [&] {
      return c.model_config ? model::load_model_config(c.model_config->string())
                            : model::ModelConfig{};
    });
    const lts::Lts m =
        stage("model", [&] { return model::build_handshake_model(cfg); });
    const auto tp = stage("purpose", [&] { return purpose_from(c.purpose); });
    const auto generated =
        stage("generate", [&] { return testgen::generate(m, tp); });

    const fs::path dot_path = c.output_dir / "testcase.dot";
    const fs::path csv_path = c.output_dir / "table.csv";
    const fs::path report_path =
        c.output_dir /
        (c.report_format == ReportFormat::json ? "report.json" : "report.txt");
    // The runner reads the exported file back, like an external executor.
    const auto tc = stage("export", [&] {
      write_text(dot_path, tcio::export_dot(generated));
      return tcio::parse_dot(read_text(dot_path));
    });
    stage("table", [&] {
      write_text(csv_path, tcio::table_to_csv(tcio::transition_table(tc)));
    });
    const auto defaults = stage("defaults", [&] {
      return defaults_from(cfg, c.defaults ? c.defaults->string() : "");
    });
    std::unique_ptr<exec::SutAdapter> adapter = stage("connect", [&] {
      std::unique_ptr<exec::SutAdapter> a;
      if (c.mutant) {
        a = std::make_unique<exec::SimulatedSut>(cfg, *c.mutant);
      } else {
        a = std::make_unique<exec::TcpTransport>(c.address->host,
                                                 c.address->port);
      }
      return a;
    });
    const auto report = stage(
        "exec", [&] { return exec::run(tc, *adapter, m, c.timeout, defaults); });
    adapter->close();
    stage("report",
          [&] { write_text(report_path, render(report, c.report_format)); });
    out << exec::report_to_text(report);
    out << "artifacts: " << dot_path.string() << " " << csv_path.string()
        << " " << report_path.string() << "\n";
    return exit_code(report.verdict);
  } catch (const StageError& e) {
    err << "error [" << e.stage() << "]: " << e.what() << "\n";
    return kExitSetup;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  Options o;
  CLI::App app{"Model-based conformance testing of the TLS 1.3 handshake",
               "tlsmbt"};
  app.require_subcommand(1);
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config,
                    "Model configuration JSON (default configuration if "
                    "omitted)")
        ->check(CLI::ExistingFile);
  };

  auto* model_cmd = app.add_subcommand("model", "Handshake model");
  model_cmd->require_subcommand(1);
  auto* build = model_cmd->add_subcommand(
      "build", "Build the composed model and print its size");
  add_config(build);
  build->add_option("--dot", o.model_dot, "Write the model graph as DOT");
  build->add_option("--depth", o.depth,
                    "Also count the traces up to this length");

  auto* testgen_cmd = app.add_subcommand("testgen", "Test-case generation");
  testgen_cmd->require_subcommand(1);
  auto* generate = testgen_cmd->add_subcommand(
      "generate", "Generate a test case for a test purpose");
  add_config(generate);
  generate->add_option("--purpose", o.purpose,
                       "Bundled purpose I, II or III, or a purpose DOT file")
      ->capture_default_str();
  generate->add_option("--out", o.out, "Output DOT file (stdout if omitted)");

  auto* tcio_cmd = app.add_subcommand("tcio", "Test-case interchange");
  tcio_cmd->require_subcommand(1);
  auto* table = tcio_cmd->add_subcommand(
      "table", "Print the transition table of a DOT test case as CSV");
  table->add_option("--tc", o.tc, "Test case DOT file")
      ->required()
      ->check(CLI::ExistingFile);
  table->add_option("--out", o.out, "Output CSV file (stdout if omitted)");
  table->add_flag("--lenient", o.lenient,
                  "Treat sinks without a verdict as inconclusive");

  auto* exec_cmd = app.add_subcommand("exec", "Test execution");
  exec_cmd->require_subcommand(1);
  auto* run = exec_cmd->add_subcommand(
      "run", "Run a test case; exit 0 pass, 1 fail, 2 inconclusive, 3 setup");
  add_config(run);
  run->add_option("--tc", o.tc, "Test case DOT file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* target = run->add_option("--target", o.target,
                                 "SUT address host:port (see exec serve-sut)");
  auto* mutant = run->add_option(
      "--mutant", o.mutant,
      "Run against an in-process simulated SUT: conforming, "
      "renegotiation_tolerant, certrequest_rejecter, hrr_same_crypto");
  target->excludes(mutant);
  run->add_option("--timeout-ms", o.timeout_ms, "Per-step receive timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--report", o.report, "Write the report to this file");
  run->add_option("--format", o.format, "Report file format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  run->add_option("--defaults", o.defaults,
                  "JSON object of default message bodies per gate")
      ->check(CLI::ExistingFile);

  auto* serve = exec_cmd->add_subcommand(
      "serve-sut", "Serve a simulated SUT over TCP until interrupted");
  add_config(serve);
  serve->add_option("--bind", o.bind, "Listen address host:port (port 0 = any)")
      ->capture_default_str();
  serve->add_option("--mutant", o.mutant, "Server behaviour")
      ->required()
      ->check(CLI::IsMember({"conforming", "renegotiation_tolerant",
                             "certrequest_rejecter", "hrr_same_crypto"}));
  serve->add_option("--duration-ms", o.duration_ms,
                    "Stop after this long (0 = until SIGINT/SIGTERM)")
      ->capture_default_str();

  auto* pipeline = app.add_subcommand(
      "pipeline",
      "Generate, export, tabulate, run and report from one config file");
  pipeline->add_option("--config", o.pipeline, "Pipeline configuration JSON")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitPass : kExitSetup;
  }

  try {
    if (*build) return cmd_model_build(o, out);
    if (*generate) return cmd_generate(o, out);
    if (*table) return cmd_table(o, out);
    if (*run) {
      if (o.target.empty() && o.mutant.empty()) {
        throw StageError("exec", "one of --target, --mutant is required");
      }
      return cmd_exec_run(o, out);
    }
    if (*serve) return cmd_serve(o, out);
    if (*pipeline) {
      const auto cfg =
          stage("config", [&] { return load_pipeline_config(o.pipeline); });
      return run_pipeline(cfg, out, err);
    }
  } catch (const StageError& e) {
    err << "error [" << e.stage() << "]: " << e.what() << "\n";
    return kExitSetup;
  }
  return kExitSetup;
}

}  // namespace tlsmbt::cli
