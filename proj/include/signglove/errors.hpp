#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace signglove {

// Error categories map onto CLI exit codes: usage=1, data=2, numeric=3.
enum class ErrorKind { Usage, Data, Numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string tag, const std::string& message)
        : std::runtime_error(message), kind_(kind), tag_(std::move(tag)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& tag() const { return tag_; }

private:
    ErrorKind kind_;
    std::string tag_;
};

#define SIGNGLOVE_DEFINE_ERROR(Name, Kind)                            \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& message)                     \
            : Error(ErrorKind::Kind, #Name, message) {}               \
    }

SIGNGLOVE_DEFINE_ERROR(MalformedRow, Data);
SIGNGLOVE_DEFINE_ERROR(TooFewColumns, Data);
SIGNGLOVE_DEFINE_ERROR(EmptyFile, Data);
SIGNGLOVE_DEFINE_ERROR(AllRowsRemoved, Data);
SIGNGLOVE_DEFINE_ERROR(InsufficientClassData, Data);
SIGNGLOVE_DEFINE_ERROR(NotFitted, Usage);
SIGNGLOVE_DEFINE_ERROR(SequenceTooShort, Data);
SIGNGLOVE_DEFINE_ERROR(ShapeMismatch, Usage);
SIGNGLOVE_DEFINE_ERROR(DegenerateFilter, Numeric);
SIGNGLOVE_DEFINE_ERROR(NonFiniteLoss, Numeric);
SIGNGLOVE_DEFINE_ERROR(FingerprintMismatch, Data);
SIGNGLOVE_DEFINE_ERROR(LengthMismatch, Usage);
SIGNGLOVE_DEFINE_ERROR(EmptyMatrix, Usage);
SIGNGLOVE_DEFINE_ERROR(BadConfig, Usage);
SIGNGLOVE_DEFINE_ERROR(BadFile, Data);
SIGNGLOVE_DEFINE_ERROR(LineageMismatch, Data);

#undef SIGNGLOVE_DEFINE_ERROR

}  // namespace signglove
