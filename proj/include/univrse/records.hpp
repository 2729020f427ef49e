// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "univrse/alfa.hpp"
#include "univrse/baselines.hpp"
#include "univrse/longform.hpp"
#include "univrse/vcse.hpp"

namespace univrse {

/// JSON numbers cannot hold infinities; those are written as strings.
nlohmann::json real_to_json(double v);
double real_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GenSample& s);
GenSample gen_sample_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SpdEstimate& spd);
nlohmann::json to_json(const VisionConditionedDistribution& vsd);
VisionConditionedDistribution vsd_from_json(const nlohmann::json& j);
nlohmann::json to_json(const VseResult& r);
nlohmann::json to_json(const ClaimVerificationItem& item);
nlohmann::json to_json(const AlfaOutcome& outcome);  // without the response sample
nlohmann::json to_json(const std::vector<UncertaintyScore>& scores);

/// One row of the ALFA label file.
nlohmann::json label_row(const std::string& id, const AlfaOutcome& outcome,
                         const std::map<std::string, std::string>& backend_ids);

/// The fields of a records.jsonl line that evaluation needs.
struct StoredRecord {
  std::string id;
  std::string task;
  std::string status;
  std::string error;
  std::string config_hash;
  std::optional<double> alpha_h;
  std::map<Method, double> scores;
};

StoredRecord parse_record(const nlohmann::json& j);

}  // namespace univrse
