#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace taskxfer {

enum class ErrorCode {
    EmptyTaskList,
    DuplicateTaskId,
    InvalidTask,
    UnknownTaskId,
    MissingCell,
    DuplicateCell,
    InconsistentQuestionCount,
    InvalidConfig,
    InvalidQuestionCount,
    MixedModels,
    DimensionMismatch,
    IndexOutOfRange,
    EmptyInput,
    AllZeroDifferences,
    InsufficientSamples,
    ZeroVarianceBoth,
    InvalidDegreesOfFreedom,
    ZeroVector,
    LengthMismatch,
    TooLarge,
    MissingModel,
    InconsistentStructure,
    MalformedRow,
    UnknownColumn,
    MissingColumn,
    NonNumericAccuracy,
    AccuracyOutOfRange,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. `details` carries one entry per individual
/// violation when an operation collects several before failing.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::vector<std::string> details = {});

    ErrorCode code() const noexcept { return code_; }
    const std::vector<std::string>& details() const noexcept { return details_; }

private:
    ErrorCode code_;
    std::vector<std::string> details_;
};

}  // namespace taskxfer
