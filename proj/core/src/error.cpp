// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/error.hpp"

namespace pkgraph {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::BuildPhaseClosed: return "BuildPhaseClosed";
    case ErrorCode::NotSealed: return "NotSealed";
    case ErrorCode::InvalidEndpoint: return "InvalidEndpoint";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Io: return "Io";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::NotAnObject: return "NotAnObject";
    case ErrorCode::UnknownDocument: return "UnknownDocument";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::MissingEmbedding: return "MissingEmbedding";
    case ErrorCode::WrongKind: return "WrongKind";
    case ErrorCode::UnknownTemplate: return "UnknownTemplate";
    case ErrorCode::RunnerUnavailable: return "RunnerUnavailable";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::GeneratorError: return "GeneratorError";
    case ErrorCode::MockMiss: return "MockMiss";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace pkgraph
