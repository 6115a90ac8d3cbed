#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scenekg {

enum class Errc {
  // scene_model
  DuplicateId,
  MissingRequiredAttribute,
  InvalidAttribute,
  UnknownNode,
  IllegalEndpointKinds,
  MissingEdgeAttribute,
  DuplicateEdge,
  InvalidScene,
  GraphFrozen,
  // pattern_lang
  SyntaxError,
  UnboundVariable,
  UnknownKind,
  DuplicatePatternName,
  UnknownMarkLabel,
  // scene_builder
  DegenerateLane,
  NoInfrastructure,
  NoEgoPlacement,
  InvalidSnapshot,
  // metrics / corpus / cli
  InvalidConfig,
  EmptyCorpus,
  IoError,
  SchemaViolation,
  InvalidSpec,
  CatalogMismatch,
  InsufficientOverlap,
  ZeroVariance,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::MissingRequiredAttribute: return "MissingRequiredAttribute";
    case Errc::InvalidAttribute: return "InvalidAttribute";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::IllegalEndpointKinds: return "IllegalEndpointKinds";
    case Errc::MissingEdgeAttribute: return "MissingEdgeAttribute";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::InvalidScene: return "InvalidScene";
    case Errc::GraphFrozen: return "GraphFrozen";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::UnknownKind: return "UnknownKind";
    case Errc::DuplicatePatternName: return "DuplicatePatternName";
    case Errc::UnknownMarkLabel: return "UnknownMarkLabel";
    case Errc::DegenerateLane: return "DegenerateLane";
    case Errc::NoInfrastructure: return "NoInfrastructure";
    case Errc::NoEgoPlacement: return "NoEgoPlacement";
    case Errc::InvalidSnapshot: return "InvalidSnapshot";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::IoError: return "IoError";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::CatalogMismatch: return "CatalogMismatch";
    case Errc::InsufficientOverlap: return "InsufficientOverlap";
    case Errc::ZeroVariance: return "ZeroVariance";
  }
  return "Unknown";
}

/// Line/column in a text input, both 1-based. Zero means "not applicable".
struct TextPos {
  std::size_t line = 0;
  std::size_t column = 0;
};

/// The single exception type thrown by the library. `code()` identifies the
/// failure; `pos()` and `expected()` are filled for parse and line-oriented
/// input errors.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Error(Errc code, const std::string& message, TextPos pos, std::vector<std::string> expected = {})
      : std::runtime_error(format(code, message, pos)),
        code_(code),
        pos_(pos),
        expected_(std::move(expected)) {}

  Errc code() const noexcept { return code_; }
  const TextPos& pos() const noexcept { return pos_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(Errc code, const std::string& message, TextPos pos) {
    std::string out(to_string(code));
    if (pos.line != 0) {
      out += " at " + std::to_string(pos.line);
      if (pos.column != 0) out += ":" + std::to_string(pos.column);
    }
    out += ": " + message;
    return out;
  }

  Errc code_;
  TextPos pos_{};
  std::vector<std::string> expected_;
};

}  // namespace scenekg
