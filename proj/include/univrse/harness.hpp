// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "univrse/backends.hpp"
#include "univrse/config.hpp"
#include "univrse/dataset.hpp"
#include "univrse/records.hpp"
#include "univrse/templates.hpp"
#include "univrse/vcse.hpp"

namespace univrse {

struct Backends {
  std::shared_ptr<VlmBackend> vlm;
  std::shared_ptr<NliBackend> nli;
  std::shared_ptr<LlmBackend> llm;
  std::vector<std::shared_ptr<VlmBackend>> auxiliary;
  std::shared_ptr<const TemplateRegistry> templates;

  std::map<std::string, std::string> ids() const;
};

/// Loads templates and scripts, builds HTTP clients and probes them.
/// Throws ConfigError or BootstrapFailure.
Backends make_backends(const RunConfig& cfg, bool probe = true);

/// Scores one record; never throws for per-record failures, which are
/// reported through `status` and `error` in the returned record.
nlohmann::json process_record(const DatasetRecord& record, const RunConfig& cfg, const Backends& backends,
                              const std::string& config_hash);

struct RunSummary {
  std::filesystem::path dir;
  std::string config_hash;
  std::size_t processed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

/// Appends one JSON line per record to `dir/records.jsonl`. Records whose id
/// already has an ok line are skipped. Refuses a directory locked to a
/// different config hash.
RunSummary run(const std::vector<DatasetRecord>& records, const RunConfig& cfg, const Backends& backends,
               const std::filesystem::path& dir, const std::string& dataset_name);

struct MethodRow {
  std::string method;
  std::size_t n = 0;
  std::optional<double> auc;  // empty when only one label class is present
  double aua = 0.0;
  std::string note;
};

struct Report {
  std::string dataset;
  std::string config_hash;
  double binarize_threshold = 0.0;
  std::size_t ok_records = 0;
  std::size_t error_records = 0;
  std::vector<MethodRow> rows;

  std::string csv() const;
  std::string summary() const;
};

/// Latest ok record per id, ordered by id.
std::vector<StoredRecord> load_run_records(const std::filesystem::path& dir);

/// Evaluates a run directory without touching records.jsonl. Throws EmptyRun.
Report evaluate_run(const std::filesystem::path& dir);

/// evaluate_run plus writing report.csv and summary.txt.
Report write_report(const std::filesystem::path& dir);

/// Youden-J threshold for `method` over a run directory's records.
ThresholdCalibration calibrate_run(const std::filesystem::path& dir, Method method = Method::UniVRSE);

/// ALFA labels for every record, in dataset order. Failed records carry an
/// "error" field. Returns the number of failures.
std::size_t label_dataset(const std::vector<DatasetRecord>& records, const RunConfig& cfg, const Backends& backends,
                          const std::filesystem::path& out);

}  // namespace univrse
