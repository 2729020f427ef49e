// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/error.hpp"

namespace univrse {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::CorruptImage: return "CorruptImage";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::AuthFailure: return "AuthFailure";
    case ErrorKind::ScriptMiss: return "ScriptMiss";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::BackendError: return "BackendError";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidLambda: return "InvalidLambda";
    case ErrorKind::NotADistribution: return "NotADistribution";
    case ErrorKind::SingleClassLabels: return "SingleClassLabels";
    case ErrorKind::MissingTopK: return "MissingTopK";
    case ErrorKind::NoAuxiliaryBackend: return "NoAuxiliaryBackend";
    case ErrorKind::EmptyReport: return "EmptyReport";
    case ErrorKind::EmptyReference: return "EmptyReference";
    case ErrorKind::EmptyResponse: return "EmptyResponse";
    case ErrorKind::EmptyJudgments: return "EmptyJudgments";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::Empty: return "Empty";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::MissingImage: return "MissingImage";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::BootstrapFailure: return "BootstrapFailure";
    case ErrorKind::EmptyRun: return "EmptyRun";
  }
  return "Unknown";
}

}  // namespace univrse
