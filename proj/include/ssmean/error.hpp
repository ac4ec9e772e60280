#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssmean {

enum class ErrorCode {
    DimensionMismatch,
    RankDeficient,
    InsufficientData,
    MissingMu,
    InvalidArgs,
    DimensionOverflow,
    InvalidSpec,
    MissingColumn,
    ParseError,
    EmptyFile,
    ColumnMismatch,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code tells callers (and the CLI
/// exit-code mapping) which contract was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// True for failures of input handling (files, parsing), false for
    /// estimation preconditions.
    bool is_io() const noexcept {
        return code_ == ErrorCode::MissingColumn || code_ == ErrorCode::ParseError ||
               code_ == ErrorCode::EmptyFile || code_ == ErrorCode::ColumnMismatch ||
               code_ == ErrorCode::Io;
    }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::MissingMu: return "MissingMu";
    case ErrorCode::InvalidArgs: return "InvalidArgs";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace ssmean
