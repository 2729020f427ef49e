// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/records.hpp"

#include <cmath>
#include <limits>

#include "univrse/error.hpp"
#include "univrse/templates.hpp"

namespace univrse {

nlohmann::json real_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}

double real_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_null()) return -std::numeric_limits<double>::infinity();
  const auto s = j.get<std::string>();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw Error(ErrorKind::ParseError, "not a real: " + s);
}

namespace {

nlohmann::json reals(const std::vector<double>& v) {
  auto a = nlohmann::json::array();
  for (double x : v) a.push_back(real_to_json(x));
  return a;
}

std::vector<double> reals_from(const nlohmann::json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(real_from_json(x));
  return v;
}

}  // namespace

nlohmann::json to_json(const GenSample& s) {
  auto top = nlohmann::json::array();
  for (const auto& t : s.top_logprobs) top.push_back(reals(t));
  return {{"text", s.text},
          {"token_logprobs", reals(s.token_logprobs)},
          {"top_logprobs", top},
          {"seq_logprob", real_to_json(s.seq_logprob)},
          {"transform_seed", s.transform_seed}};
}

GenSample gen_sample_from_json(const nlohmann::json& j) {
  GenSample s;
  s.text = j.at("text").get<std::string>();
  s.token_logprobs = reals_from(j.at("token_logprobs"));
  for (const auto& t : j.at("top_logprobs")) s.top_logprobs.push_back(reals_from(t));
  s.seq_logprob = real_from_json(j.at("seq_logprob"));
  s.transform_seed = j.at("transform_seed").get<std::uint64_t>();
  return s;
}

nlohmann::json to_json(const SpdEstimate& spd) {
  auto samples = nlohmann::json::array();
  for (const auto& s : spd.samples) samples.push_back(to_json(s));
  auto classes = nlohmann::json::array();
  for (const auto& c : spd.distribution.classes)
    classes.push_back({{"id", c.id},
                       {"representative", c.representative},
                       {"members", c.member_indices},
                       {"mass", real_to_json(c.mass)}});
  return {{"samples", samples},
          {"classes", classes},
          {"probs", reals(spd.distribution.probs)},
          {"degenerate", spd.degenerate},
          {"transformed", spd.transformed}};
}

nlohmann::json to_json(const VisionConditionedDistribution& vsd) {
  return {{"unified_classes", vsd.unified_classes},
          {"p_orig", reals(vsd.p_orig)},
          {"p_dist", reals(vsd.p_dist)},
          {"p_contrasted", reals(vsd.p_contrasted)},
          {"lambda", vsd.lambda}};
}

VisionConditionedDistribution vsd_from_json(const nlohmann::json& j) {
  VisionConditionedDistribution v;
  v.unified_classes = j.at("unified_classes").get<std::vector<std::string>>();
  v.p_orig = reals_from(j.at("p_orig"));
  v.p_dist = reals_from(j.at("p_dist"));
  v.p_contrasted = reals_from(j.at("p_contrasted"));
  v.lambda = j.at("lambda").get<double>();
  return v;
}

nlohmann::json to_json(const VseResult& r) {
  return {{"vse", real_to_json(r.score.value)},
          {"n_classes", r.score.n_classes},
          {"degenerate", r.score.flagged_degenerate},
          {"seed", r.seed},
          {"vsd", to_json(r.vsd)},
          {"original", to_json(r.original)},
          {"distorted", to_json(r.distorted)}};
}

nlohmann::json to_json(const ClaimVerificationItem& item) {
  nlohmann::json j{{"index", item.claim.index}, {"text", item.claim.text}, {"question", item.question}};
  if (item.claim.source_span)
    j["source_span"] = {item.claim.source_span->first, item.claim.source_span->second};
  if (item.result) j["vse"] = to_json(*item.result);
  if (!item.error.empty()) j["error"] = item.error;
  return j;
}

nlohmann::json to_json(const AlfaOutcome& o) {
  auto facts = nlohmann::json::array();
  for (const auto& f : o.facts) facts.push_back({{"text", f.text}, {"kind", std::string(to_string(f.kind))}});
  auto judgments = nlohmann::json::array();
  for (const auto& jd : o.judgments) {
    nlohmann::json x{{"claim", jd.claim}, {"verdict", std::string(to_string(jd.verdict))}};
    x["fact_index"] = jd.matched_fact_index ? nlohmann::json(*jd.matched_fact_index) : nlohmann::json();
    judgments.push_back(std::move(x));
  }
  return {{"claims", o.claims},       {"facts", facts},
          {"judgments", judgments},   {"n2", o.label.n2},
          {"m", o.label.m},           {"h", o.label.h},
          {"e", o.label.e},           {"alpha_m", o.label.alpha_m},
          {"alpha_h", o.label.alpha_h}, {"alpha_e", o.label.alpha_e}};
}

nlohmann::json to_json(const std::vector<UncertaintyScore>& scores) {
  auto a = nlohmann::json::array();
  for (const auto& s : scores)
    a.push_back({{"method", std::string(to_string(s.method))},
                 {"value", real_to_json(s.value)},
                 {"orientation", s.orientation == Orientation::HigherMeansHallucinated ? "higher" : "lower"}});
  return a;
}

nlohmann::json label_row(const std::string& id, const AlfaOutcome& outcome,
                         const std::map<std::string, std::string>& backend_ids) {
  auto row = to_json(outcome);
  row["id"] = id;
  row["response"] = outcome.response.text;
  row["template_ids"] = {templates::kDecomposeClaims, templates::kDecomposeFacts, templates::kMatchClaims};
  row["backend_ids"] = backend_ids;
  return row;
}

StoredRecord parse_record(const nlohmann::json& j) {
  StoredRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.task = j.value("task", "");
    r.status = j.at("status").get<std::string>();
    r.error = j.value("error", "");
    r.config_hash = j.value("config_hash", "");
    if (j.contains("alfa") && j.at("alfa").is_object()) r.alpha_h = j.at("alfa").at("alpha_h").get<double>();
    if (j.contains("scores"))
      for (const auto& s : j.at("scores")) {
        const auto m = parse_method(s.at("method").get<std::string>());
        if (!r.scores.emplace(m, real_from_json(s.at("value"))).second)
          throw Error(ErrorKind::ParseError, "record '" + r.id + "' scores a method twice");
      }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed run record: ") + e.what());
  }
  return r;
}

}  // namespace univrse
