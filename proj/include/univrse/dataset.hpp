// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace univrse {

enum class Task { Vqa, Vrg };

std::string_view to_string(Task task);

struct DatasetRecord {
  std::string id;
  std::filesystem::path image_path;
  Task task = Task::Vqa;
  std::string question;  // question (vqa) or instruction (vrg)
  std::string reference;
};

/// One JSON object per line: {"id", "image_path", "task", "question",
/// "reference"}. Relative image paths resolve against the dataset directory.
/// Throws ParseError (with line number), DuplicateId or MissingImage.
std::vector<DatasetRecord> ingest_dataset(const std::filesystem::path& path);

}  // namespace univrse
