#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gatwo {

enum class ErrorKind {
    FileNotFound,
    ParseError,
    InvariantViolation,
    DuplicateDate,
    TooShort,
    WindowTooLargeForSeries,
    SeriesTooShortForWarmup,
    EmptySpec,
    EmptyTable,
    DimensionMismatch,
    SingleClassData,
    NoConvergence,
    EmptySeries,
    SignalLengthMismatch,
    MalformedLedger,
    EmptyCurve,
    NoViableChromosome,
    InvalidArgument,
    ModelFormat,
    OutputExists,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::DuplicateDate: return "DuplicateDate";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::WindowTooLargeForSeries: return "WindowTooLargeForSeries";
    case ErrorKind::SeriesTooShortForWarmup: return "SeriesTooShortForWarmup";
    case ErrorKind::EmptySpec: return "EmptySpec";
    case ErrorKind::EmptyTable: return "EmptyTable";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingleClassData: return "SingleClassData";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::SignalLengthMismatch: return "SignalLengthMismatch";
    case ErrorKind::MalformedLedger: return "MalformedLedger";
    case ErrorKind::EmptyCurve: return "EmptyCurve";
    case ErrorKind::NoViableChromosome: return "NoViableChromosome";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ModelFormat: return "ModelFormat";
    case ErrorKind::OutputExists: return "OutputExists";
    }
    return "Unknown";
}

/// The single exception type thrown by the library. The kind is stable and is
/// what callers (and the CLI exit-code mapping) should dispatch on.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

    /// Problems with the input data itself, as opposed to the pipeline.
    [[nodiscard]] bool is_data_error() const noexcept {
        switch (kind_) {
        case ErrorKind::FileNotFound:
        case ErrorKind::ParseError:
        case ErrorKind::InvariantViolation:
        case ErrorKind::DuplicateDate:
        case ErrorKind::TooShort:
        case ErrorKind::SeriesTooShortForWarmup:
        case ErrorKind::ModelFormat:
            return true;
        default:
            return false;
        }
    }

private:
    ErrorKind kind_;
};

} // namespace gatwo
