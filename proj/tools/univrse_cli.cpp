// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: dataset checks, labeling, scoring runs, reports and
// a scripted OpenAI-compatible server.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "univrse/dataset.hpp"
#include "univrse/error.hpp"
#include "univrse/harness.hpp"
#include "univrse/mock_server.hpp"
#include "univrse/scripted.hpp"

namespace fs = std::filesystem;
using namespace univrse;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;
constexpr int kBootstrapError = 3;
constexpr int kDatasetError = 4;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidConfig:
      return kConfigError;
    case ErrorKind::BootstrapFailure:
    case ErrorKind::AuthFailure:
      return kBootstrapError;
    case ErrorKind::ParseError:
    case ErrorKind::DuplicateId:
    case ErrorKind::MissingImage:
    case ErrorKind::EmptyRun:
      return kDatasetError;
    default:
      return kFailure;
  }
}

std::vector<DatasetRecord> read_dataset(const fs::path& path) {
  try {
    return ingest_dataset(path);
  } catch (const Error& e) {
    // A missing dataset file is a dataset problem, not a config problem.
    if (e.kind() == ErrorKind::FileNotFound) throw Error(ErrorKind::ParseError, e.what());
    throw;
  }
}

int do_ingest_check(const fs::path& dataset) {
  const auto records = read_dataset(dataset);
  if (records.empty()) throw Error(ErrorKind::EmptyRun, dataset.string() + " has no records");
  std::size_t vqa = 0;
  for (const auto& r : records) vqa += r.task == Task::Vqa;
  std::cout << records.size() << " records (" << vqa << " vqa, " << records.size() - vqa << " vrg)\n";
  return kOk;
}

int do_run(const fs::path& dataset, const fs::path& config, const fs::path& out, Task task) {
  const auto cfg = RunConfig::load(config);
  auto records = read_dataset(dataset);
  std::erase_if(records, [&](const DatasetRecord& r) { return r.task != task; });
  if (records.empty())
    throw Error(ErrorKind::EmptyRun, dataset.string() + " has no " + std::string(to_string(task)) + " records");
  const auto backends = make_backends(cfg);
  const auto s = run(records, cfg, backends, out, dataset.stem().string());
  std::cout << "run " << s.dir.string() << " config " << s.config_hash << ": " << s.processed << " processed, "
            << s.skipped << " skipped, " << s.failed << " failed\n";
  if (s.processed + s.skipped > s.failed) std::cout << write_report(out).summary();
  return kOk;
}

int do_label(const fs::path& dataset, const fs::path& config, const fs::path& out) {
  const auto cfg = RunConfig::load(config);
  const auto records = read_dataset(dataset);
  if (records.empty()) throw Error(ErrorKind::EmptyRun, dataset.string() + " has no records");
  const auto backends = make_backends(cfg);
  const auto failed = label_dataset(records, cfg, backends, out);
  std::cout << "labeled " << records.size() - failed << " of " << records.size() << " records into " << out.string()
            << '\n';
  return kOk;
}

int do_calibrate(const fs::path& dir, const std::string& method) {
  const auto cal = calibrate_run(dir, parse_method(method));
  nlohmann::json j{{"method", method}, {"tau", cal.tau}, {"youden_j", cal.youden_j}, {"degenerate", cal.degenerate}};
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int do_report(const fs::path& dir) {
  const auto rep = write_report(dir);
  std::cout << rep.summary();
  return kOk;
}

int do_mock_serve(const fs::path& script, const std::string& host, int port, int latency_ms) {
  auto s = std::make_shared<const Script>(Script::load(script));
  MockServer server(s);
  server.set_latency(std::chrono::milliseconds(latency_ms));
  std::cout << "serving " << script.string() << " on http://" << host << ':' << port << "/v1" << std::endl;
  server.listen_blocking(port, host);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vision-conditioned semantic entropy toolkit"};
  app.require_subcommand(1);

  fs::path dataset, config, out, dir, script;
  std::string method = "UniVRSE";
  std::string host = "127.0.0.1";
  int port = 8080;
  int latency_ms = 0;

  auto* ingest = app.add_subcommand("ingest-check", "Validate a dataset JSONL file");
  ingest->add_option("dataset", dataset, "Dataset JSONL")->required();

  auto* label = app.add_subcommand("label", "Generate responses and ALFA labels");
  label->add_option("--dataset", dataset, "Dataset JSONL")->required();
  label->add_option("--config", config, "Run configuration (TOML)")->required();
  label->add_option("--out", out, "Label file to write (JSONL)")->required();

  auto* run_vqa = app.add_subcommand("run-vqa", "Score the VQA records of a dataset");
  auto* run_vrg = app.add_subcommand("run-vrg", "Score the report-generation records of a dataset");
  for (auto* sub : {run_vqa, run_vrg}) {
    sub->add_option("--dataset", dataset, "Dataset JSONL")->required();
    sub->add_option("--config", config, "Run configuration (TOML)")->required();
    sub->add_option("--out", out, "Run directory")->required();
  }

  auto* calibrate = app.add_subcommand("calibrate", "Youden-J threshold over a run directory");
  calibrate->add_option("--run", dir, "Run directory")->required();
  calibrate->add_option("--method", method, "Score to calibrate");

  auto* report = app.add_subcommand("report", "Write report.csv and summary.txt for a run directory");
  report->add_option("--run", dir, "Run directory")->required();

  auto* serve = app.add_subcommand("mock-serve", "Serve a script as an OpenAI-compatible endpoint");
  serve->add_option("--script", script, "Mock script (JSON)")->required();
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--latency-ms", latency_ms, "Artificial delay per request");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return do_ingest_check(dataset);
    if (*label) return do_label(dataset, config, out);
    if (*run_vqa) return do_run(dataset, config, out, Task::Vqa);
    if (*run_vrg) return do_run(dataset, config, out, Task::Vrg);
    if (*calibrate) return do_calibrate(dir, method);
    if (*report) return do_report(dir);
    if (*serve) return do_mock_serve(script, host, port, latency_ms);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
