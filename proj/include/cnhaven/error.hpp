#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cnhaven {

enum class ErrorCode {
    InputTooShort,
    BadSeedLength,
    Misaligned,
    OutOfBounds,
    BadHashId,
    BadHex,
    BadJob,
    ConfigInvalid,
    Deadlock,
    MalformedTrace,
    MalformedCorpus,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the library carries one of the codes above so
/// front ends can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace cnhaven
