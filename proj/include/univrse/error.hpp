// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace univrse {

enum class ErrorKind {
  // perturb
  FileNotFound,
  UnsupportedFormat,
  CorruptImage,
  InvalidConfig,
  // backends
  Timeout,
  AuthFailure,
  ScriptMiss,
  MalformedResponse,
  SchemaViolation,
  BackendError,
  // semantic / vcse / baselines
  EmptySequence,
  LengthMismatch,
  InvalidLambda,
  NotADistribution,
  SingleClassLabels,
  MissingTopK,
  NoAuxiliaryBackend,
  // longform / alfa
  EmptyReport,
  EmptyReference,
  EmptyResponse,
  EmptyJudgments,
  // metrics
  SingleClass,
  Empty,
  // harness
  ParseError,
  DuplicateId,
  MissingImage,
  ConfigError,
  BootstrapFailure,
  EmptyRun,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace univrse
