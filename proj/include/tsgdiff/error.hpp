#pragma once

#include <stdexcept>
#include <string>

namespace tsgdiff {

enum class Errc {
  MissingFile,
  ParseError,
  NonFinite,
  EmptyTable,
  DimensionMismatch,
  ShapeMismatch,
  WindowTooLarge,
  WindowTooShort,
  InvalidRange,
  StepOutOfRange,
  NonFiniteLoss,
  EmptySampleSet,
  InsufficientData,
  CorruptWeights,
  DigestMismatch,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MissingFile: return "MissingFile";
    case Errc::ParseError: return "ParseError";
    case Errc::NonFinite: return "NonFinite";
    case Errc::EmptyTable: return "EmptyTable";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::WindowTooLarge: return "WindowTooLarge";
    case Errc::WindowTooShort: return "WindowTooShort";
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::StepOutOfRange: return "StepOutOfRange";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::EmptySampleSet: return "EmptySampleSet";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::CorruptWeights: return "CorruptWeights";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace tsgdiff
