// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/dataset.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "univrse/error.hpp"

namespace univrse {

std::string_view to_string(Task task) { return task == Task::Vqa ? "vqa" : "vrg"; }

std::vector<DatasetRecord> ingest_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  const auto base = path.parent_path();
  std::vector<DatasetRecord> records;
  std::set<std::string> ids;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.filename().string() + ":" + std::to_string(lineno);
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorKind::ParseError, where + ": not a JSON object");
    DatasetRecord r;
    try {
      r.id = doc.at("id").get<std::string>();
      r.image_path = doc.at("image_path").get<std::string>();
      const auto task = doc.value("task", "vqa");
      if (task == "vqa")
        r.task = Task::Vqa;
      else if (task == "vrg")
        r.task = Task::Vrg;
      else
        throw Error(ErrorKind::ParseError, where + ": task must be \"vqa\" or \"vrg\"");
      r.question = doc.at("question").get<std::string>();
      r.reference = doc.at("reference").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ParseError, where + ": " + e.what());
    }
    if (r.id.empty()) throw Error(ErrorKind::ParseError, where + ": empty id");
    if (!ids.insert(r.id).second) throw Error(ErrorKind::DuplicateId, "duplicate id '" + r.id + "' at " + where);
    if (r.image_path.is_relative()) r.image_path = base / r.image_path;
    if (!std::filesystem::exists(r.image_path))
      throw Error(ErrorKind::MissingImage, "record '" + r.id + "' references missing image " + r.image_path.string());
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace univrse
