// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pkgraph {

enum class ErrorCode {
    // graph model
    BuildPhaseClosed,
    NotSealed,
    InvalidEndpoint,
    KindMismatch,
    DuplicateEdge,
    CycleDetected,
    UnknownNode,
    InvalidNode,
    // persistence
    FormatVersionMismatch,
    CorruptRecord,
    DimensionMismatch,
    Io,
    // analyzers
    ParseFailure,
    NotAnObject,
    UnknownDocument,
    // embedding / retrieval
    ProviderError,
    LengthMismatch,
    EmptyIndex,
    MissingEmbedding,
    WrongKind,
    UnknownTemplate,
    // rerank / eval
    RunnerUnavailable,
    NoCandidates,
    GeneratorError,
    MockMiss,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable code. Every module throws this type.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pkgraph
