#include "taskxfer/error.hpp"

#include <utility>

namespace taskxfer {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyTaskList: return "EmptyTaskList";
        case ErrorCode::DuplicateTaskId: return "DuplicateTaskId";
        case ErrorCode::InvalidTask: return "InvalidTask";
        case ErrorCode::UnknownTaskId: return "UnknownTaskId";
        case ErrorCode::MissingCell: return "MissingCell";
        case ErrorCode::DuplicateCell: return "DuplicateCell";
        case ErrorCode::InconsistentQuestionCount: return "InconsistentQuestionCount";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidQuestionCount: return "InvalidQuestionCount";
        case ErrorCode::MixedModels: return "MixedModels";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::AllZeroDifferences: return "AllZeroDifferences";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::ZeroVarianceBoth: return "ZeroVarianceBoth";
        case ErrorCode::InvalidDegreesOfFreedom: return "InvalidDegreesOfFreedom";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::MissingModel: return "MissingModel";
        case ErrorCode::InconsistentStructure: return "InconsistentStructure";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::UnknownColumn: return "UnknownColumn";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::NonNumericAccuracy: return "NonNumericAccuracy";
        case ErrorCode::AccuracyOutOfRange: return "AccuracyOutOfRange";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::vector<std::string> details)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      details_(std::move(details)) {}

}  // namespace taskxfer
