// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "univrse/alfa.hpp"
#include "univrse/baselines.hpp"
#include "univrse/digest.hpp"
#include "univrse/error.hpp"
#include "univrse/http_backend.hpp"
#include "univrse/image.hpp"
#include "univrse/longform.hpp"
#include "univrse/metrics.hpp"
#include "univrse/parallel.hpp"
#include "univrse/records.hpp"
#include "univrse/scripted.hpp"

namespace univrse {
namespace fs = std::filesystem;

std::map<std::string, std::string> Backends::ids() const {
  std::map<std::string, std::string> out{{"vlm", vlm->id()}, {"nli", nli->id()}, {"llm", llm->id()}};
  for (std::size_t i = 0; i < auxiliary.size(); ++i) out["auxiliary." + std::to_string(i)] = auxiliary[i]->id();
  return out;
}

namespace {

std::shared_ptr<const Script> load_script(const BackendConfig& b, std::map<std::string, std::shared_ptr<const Script>>& cache) {
  auto& slot = cache[b.script];
  if (!slot) {
    try {
      slot = std::make_shared<const Script>(Script::load(b.script));
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, "mock script " + b.script + ": " + e.what());
    }
  }
  return slot;
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03lldZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<long long>(ms));
  return buf;
}

// Baselines that fail on one record (e.g. a backend without top-k) are left
// out of that record instead of failing it.
struct ScoreSheet {
  std::vector<UncertaintyScore> scores;
  nlohmann::json errors = nlohmann::json::object();

  template <typename F>
  void add(const RunConfig& cfg, Method m, F&& compute) {
    if (!cfg.enabled(m)) return;
    try {
      scores.push_back(UncertaintyScore::of(m, compute()));
    } catch (const std::exception& e) {
      errors[std::string(to_string(m))] = e.what();
    }
  }
};

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void token_baselines(ScoreSheet& sheet, const RunConfig& cfg, const GenSample& response) {
  sheet.add(cfg, Method::AvgProb, [&] { return avg_prob(response); });
  sheet.add(cfg, Method::MaxProb, [&] { return max_prob(response); });
  sheet.add(cfg, Method::AvgEnt, [&] { return avg_ent(response); });
  sheet.add(cfg, Method::MaxEnt, [&] { return max_ent(response); });
}

void process_vqa(nlohmann::json& rec, const DatasetRecord& record, const ImageTensor& image, const RunConfig& cfg,
                 const Backends& b, std::uint64_t seed) {
  const auto response = generate_response(image, record.question, *b.vlm, cfg.response_temperature,
                                          cfg.response_max_tokens, cfg.top_logprobs);
  rec["response"] = response.text;
  const auto alfa = label_response(record, response, *b.llm, *b.templates);
  rec["alfa"] = to_json(alfa);

  const auto vse = compute_vse(image, record.question, cfg.vse_config(), *b.vlm, *b.nli, seed);
  const std::string_view context = cfg.question_as_context ? std::string_view(record.question) : std::string_view();

  ScoreSheet sheet;
  token_baselines(sheet, cfg, response);
  sheet.add(cfg, Method::SE, [&] { return semantic_entropy(vse.original.distribution); });
  sheet.add(cfg, Method::RadFlag, [&] { return radflag_score(response.text, vse.original.samples, *b.nli, context); });
  nlohmann::json aux_json = nlohmann::json::array();
  if (cfg.enabled(Method::CrossCheck) && !b.auxiliary.empty()) {
    sheet.add(cfg, Method::CrossCheck, [&] {
      const auto answers = auxiliary_answers(image, record.question, b.auxiliary, cfg.response_temperature);
      aux_json = answers;
      return cross_check_score(response.text, answers, *b.nli, context);
    });
  }
  sheet.add(cfg, Method::UniVRSE, [&] { return vse.score.value; });

  rec["scores"] = to_json(sheet.scores);
  if (!sheet.errors.empty()) rec["score_errors"] = sheet.errors;
  auto& inter = rec["intermediates"];
  inter["response_sample"] = to_json(response);
  inter["vse"] = to_json(vse);
  if (!aux_json.empty()) inter["auxiliary_answers"] = aux_json;
}

void process_vrg(nlohmann::json& rec, const DatasetRecord& record, const ImageTensor& image, const RunConfig& cfg,
                 const Backends& b, std::uint64_t seed) {
  const auto lf = cfg.longform_config();
  const auto scored = score_report(image, record.question, lf, *b.vlm, *b.nli, *b.llm, *b.templates, seed);
  rec["response"] = scored.report.text;

  AlfaOutcome alfa;
  alfa.response = scored.report;
  for (const auto& item : scored.items) alfa.claims.push_back(item.claim.text);
  alfa.facts = decompose_reference(record.reference, record.question, *b.llm, *b.templates);
  alfa.judgments = match_claims(alfa.claims, alfa.facts, record.question, *b.llm, *b.templates);
  alfa.label = compute_alfa(alfa.judgments);
  rec["alfa"] = to_json(alfa);

  std::vector<const ClaimVerificationItem*> ok;
  for (const auto& item : scored.items)
    if (item.result) ok.push_back(&item);
  if (ok.empty()) throw Error(ErrorKind::BackendError, "no claim could be scored");

  // Record-level claim scores are means over the scored claims; each claim's
  // own text plays the role of the audited answer.
  auto over_claims = [&](auto&& per_claim) {
    std::vector<double> v;
    for (const auto* item : ok) v.push_back(per_claim(*item));
    return mean(v);
  };
  auto ctx = [&](const ClaimVerificationItem& item) {
    return cfg.question_as_context ? std::string_view(item.question) : std::string_view();
  };

  ScoreSheet sheet;
  token_baselines(sheet, cfg, scored.report);
  sheet.add(cfg, Method::SE, [&] {
    return over_claims([](const ClaimVerificationItem& i) { return semantic_entropy(i.result->original.distribution); });
  });
  sheet.add(cfg, Method::RadFlag, [&] {
    return over_claims([&](const ClaimVerificationItem& i) {
      return radflag_score(i.claim.text, i.result->original.samples, *b.nli, ctx(i));
    });
  });
  nlohmann::json aux_json = nlohmann::json::object();
  if (cfg.enabled(Method::CrossCheck) && !b.auxiliary.empty()) {
    sheet.add(cfg, Method::CrossCheck, [&] {
      return over_claims([&](const ClaimVerificationItem& i) {
        const auto answers = auxiliary_answers(image, i.question, b.auxiliary, cfg.response_temperature);
        aux_json[std::to_string(i.claim.index)] = answers;
        return cross_check_score(i.claim.text, answers, *b.nli, ctx(i));
      });
    });
  }
  sheet.add(cfg, Method::UniVRSE,
            [&] { return over_claims([](const ClaimVerificationItem& i) { return i.result->score.value; }); });

  rec["scores"] = to_json(sheet.scores);
  if (!sheet.errors.empty()) rec["score_errors"] = sheet.errors;
  auto claims = nlohmann::json::array();
  for (const auto& item : scored.items) claims.push_back(to_json(item));
  rec["claims"] = claims;
  auto& inter = rec["intermediates"];
  inter["response_sample"] = to_json(scored.report);
  if (!aux_json.empty()) inter["auxiliary_answers"] = aux_json;
}

nlohmann::json read_lock(const fs::path& dir) {
  std::ifstream in(dir / "config.lock.json");
  if (!in) throw Error(ErrorKind::FileNotFound, (dir / "config.lock.json").string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::ParseError, "config.lock.json is not valid JSON");
  return j;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

Backends make_backends(const RunConfig& cfg, bool probe) {
  Backends b;
  try {
    b.templates = std::make_shared<const TemplateRegistry>(
        cfg.templates.empty() ? TemplateRegistry::load_default() : TemplateRegistry::load(cfg.templates));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    throw Error(ErrorKind::ConfigError, std::string("templates: ") + e.what());
  }
  std::map<std::string, std::shared_ptr<const Script>> scripts;

  auto vlm = [&](const BackendConfig& c) -> std::shared_ptr<VlmBackend> {
    if (c.kind == "mock") return std::make_shared<ScriptedVlm>(load_script(c, scripts));
    auto h = std::make_shared<HttpVlm>(c);
    if (probe) h->client().probe();
    return h;
  };
  b.vlm = vlm(cfg.vlm);
  for (const auto& a : cfg.auxiliary) b.auxiliary.push_back(vlm(a));

  if (cfg.nli.kind == "mock") {
    b.nli = std::make_shared<ScriptedNli>(load_script(cfg.nli, scripts));
  } else {
    auto h = std::make_shared<HttpNli>(cfg.nli, b.templates);
    if (probe) h->client().probe();
    b.nli = h;
  }
  if (cfg.llm.kind == "mock") {
    b.llm = std::make_shared<ScriptedLlm>(load_script(cfg.llm, scripts));
  } else {
    auto h = std::make_shared<HttpLlm>(cfg.llm);
    if (probe) h->client().probe();
    b.llm = h;
  }
  return b;
}

nlohmann::json process_record(const DatasetRecord& record, const RunConfig& cfg, const Backends& b,
                              const std::string& hash) {
  const auto seed = derive_seed(cfg.seed, record.id);
  nlohmann::json rec{{"id", record.id},
                     {"task", std::string(to_string(record.task))},
                     {"config_hash", hash},
                     {"started_at", now_iso8601()}};
  auto& inter = rec["intermediates"] = nlohmann::json::object();
  inter["record_seed"] = seed;
  inter["template_hashes"] = b.templates->hashes();
  inter["backend_ids"] = b.ids();
  try {
    const auto image = load_image(record.image_path);
    if (record.task == Task::Vqa)
      process_vqa(rec, record, image, cfg, b, seed);
    else
      process_vrg(rec, record, image, cfg, b, seed);
    rec["status"] = "ok";
  } catch (const std::exception& e) {
    rec["status"] = "error";
    rec["error"] = e.what();
  }
  rec["finished_at"] = now_iso8601();
  return rec;
}

RunSummary run(const std::vector<DatasetRecord>& records, const RunConfig& cfg, const Backends& b,
               const fs::path& dir, const std::string& dataset_name) {
  validate(cfg);
  if (records.empty()) throw Error(ErrorKind::EmptyRun, "dataset has no records for this task");
  RunSummary summary;
  summary.dir = dir;
  summary.config_hash = config_hash(cfg, b.templates->hashes());
  fs::create_directories(dir);

  const auto lock_path = dir / "config.lock.json";
  if (fs::exists(lock_path)) {
    const auto lock = read_lock(dir);
    if (lock.value("config_hash", "") != summary.config_hash)
      throw Error(ErrorKind::ConfigError, "run directory " + dir.string() + " is locked to config " +
                                              lock.value("config_hash", "?") + ", this config hashes to " +
                                              summary.config_hash);
  } else {
    nlohmann::json lock{{"config_hash", summary.config_hash},
                        {"dataset", dataset_name},
                        {"config", cfg.to_json()},
                        {"template_hashes", b.templates->hashes()},
                        {"backend_ids", b.ids()}};
    std::ofstream(lock_path) << lock.dump(2) << '\n';
  }

  const auto records_path = dir / "records.jsonl";
  std::set<std::string> done;
  for (const auto& r : load_run_records(dir)) done.insert(r.id);
  if (fs::exists(records_path) && fs::file_size(records_path) > 0) {
    // A crash can leave a torn final line; start fresh lines after it.
    std::ifstream in(records_path, std::ios::binary);
    in.seekg(-1, std::ios::end);
    if (in.get() != '\n') std::ofstream(records_path, std::ios::app) << '\n';
  }

  std::vector<const DatasetRecord*> todo;
  for (const auto& r : records) {
    if (done.count(r.id))
      ++summary.skipped;
    else
      todo.push_back(&r);
  }

  std::ofstream sink(records_path, std::ios::app);
  if (!sink) throw Error(ErrorKind::ConfigError, "cannot write " + records_path.string());
  std::mutex sink_mutex;
  const auto statuses = parallel_map(todo.size(), static_cast<std::size_t>(cfg.record_workers), [&](std::size_t i) {
    const auto rec = process_record(*todo[i], cfg, b, summary.config_hash);
    const std::string line = rec.dump();
    std::lock_guard lock(sink_mutex);
    sink << line << '\n';
    sink.flush();
    return rec["status"] == "ok";
  });
  summary.processed = todo.size();
  summary.failed = static_cast<std::size_t>(std::count(statuses.begin(), statuses.end(), false));
  return summary;
}

std::vector<StoredRecord> load_run_records(const fs::path& dir) {
  std::map<std::string, StoredRecord> latest;
  std::ifstream in(dir / "records.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // torn line from an interrupted run
    auto r = parse_record(j);
    if (r.status == "ok") latest[r.id] = std::move(r);
  }
  std::vector<StoredRecord> out;
  for (auto& [_, r] : latest) out.push_back(std::move(r));
  return out;
}

Report evaluate_run(const fs::path& dir) {
  const auto lock = read_lock(dir);
  Report rep;
  rep.dataset = lock.value("dataset", "");
  rep.config_hash = lock.value("config_hash", "");
  rep.binarize_threshold = lock.at("config").value("binarize_threshold", 0.0);

  {
    std::set<std::string> all_ids;
    std::ifstream in(dir / "records.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (!j.is_discarded() && j.contains("id")) all_ids.insert(j["id"].get<std::string>());
    }
    const auto ok = load_run_records(dir);
    rep.ok_records = ok.size();
    rep.error_records = all_ids.size() - ok.size();
    if (ok.empty()) throw Error(ErrorKind::EmptyRun, "no completed records in " + dir.string());

    for (Method m : kAllMethods) {
      std::vector<ScoredSample> samples;
      for (const auto& r : ok) {
        const auto it = r.scores.find(m);
        if (it == r.scores.end() || !r.alpha_h) continue;
        samples.push_back({r.id, normalize_confidence(UncertaintyScore::of(m, it->second)), *r.alpha_h,
                           binarize_label(*r.alpha_h, rep.binarize_threshold)});
      }
      if (samples.empty()) continue;
      MethodRow row;
      row.method = std::string(to_string(m));
      row.n = samples.size();
      row.aua = aua(samples);
      try {
        row.auc = auc(samples);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingleClass) throw;
        const bool all_halluc = samples.front().binary_halluc;
        row.note = std::string("AUC undefined: every sample is ") + (all_halluc ? "hallucinated" : "correct") +
                   " at binarize_threshold " + fmt6(rep.binarize_threshold);
      }
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

std::string Report::csv() const {
  std::ostringstream out;
  out << "method,dataset,n,auc,aua,binarize_threshold,config_hash\n";
  for (const auto& r : rows)
    out << r.method << ',' << dataset << ',' << r.n << ',' << (r.auc ? fmt6(*r.auc) : "NA") << ',' << fmt6(r.aua)
        << ',' << fmt6(binarize_threshold) << ',' << config_hash << '\n';
  return out.str();
}

std::string Report::summary() const {
  std::ostringstream out;
  out << "dataset: " << dataset << '\n'
      << "config_hash: " << config_hash << '\n'
      << "binarize_threshold: " << fmt6(binarize_threshold) << " (hallucinated iff alpha_h > threshold)\n"
      << "records: " << ok_records << " ok, " << error_records << " failed\n\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %6s %10s %10s\n", "method", "n", "AUC(%)", "AUA");
  out << buf;
  for (const auto& r : rows) {
    char pct[32] = "NA";
    if (r.auc) std::snprintf(pct, sizeof pct, "%.2f", *r.auc * 100.0);
    std::snprintf(buf, sizeof buf, "%-12s %6zu %10s %10s\n", r.method.c_str(), r.n, pct, fmt6(r.aua).c_str());
    out << buf;
  }
  bool header = false;
  for (const auto& r : rows) {
    if (r.note.empty()) continue;
    if (!header) out << "\nnotes:\n";
    header = true;
    out << "  " << r.method << ": " << r.note << '\n';
  }
  return out.str();
}

Report write_report(const fs::path& dir) {
  auto rep = evaluate_run(dir);
  std::ofstream(dir / "report.csv", std::ios::binary) << rep.csv();
  std::ofstream(dir / "summary.txt", std::ios::binary) << rep.summary();
  return rep;
}

ThresholdCalibration calibrate_run(const fs::path& dir, Method method) {
  const auto lock = read_lock(dir);
  const double thr = lock.at("config").value("binarize_threshold", 0.0);
  std::vector<double> scores;
  std::vector<bool> labels;
  for (const auto& r : load_run_records(dir)) {
    const auto it = r.scores.find(method);
    if (it == r.scores.end() || !r.alpha_h) continue;
    scores.push_back(it->second);
    labels.push_back(binarize_label(*r.alpha_h, thr));
  }
  if (scores.empty()) throw Error(ErrorKind::EmptyRun, "no " + std::string(to_string(method)) + " scores in run");
  return calibrate_threshold(scores, labels);
}

std::size_t label_dataset(const std::vector<DatasetRecord>& records, const RunConfig& cfg, const Backends& b,
                          const fs::path& out) {
  if (records.empty()) throw Error(ErrorKind::EmptyRun, "dataset has no records");
  const auto ids = b.ids();
  const auto rows = parallel_map(records.size(), static_cast<std::size_t>(cfg.record_workers), [&](std::size_t i) {
    const auto& r = records[i];
    try {
      const auto image = load_image(r.image_path);
      const auto response = generate_response(image, r.question, *b.vlm, cfg.response_temperature,
                                              cfg.response_max_tokens, cfg.top_logprobs);
      return label_row(r.id, label_response(r, response, *b.llm, *b.templates), ids);
    } catch (const std::exception& e) {
      return nlohmann::json{{"id", r.id}, {"error", e.what()}};
    }
  });
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + out.string());
  std::size_t failed = 0;
  for (const auto& row : rows) {
    if (row.contains("error")) ++failed;
    f << row.dump() << '\n';
  }
  return failed;
}

}  // namespace univrse
