#include "cnhaven/error.hpp"

namespace cnhaven {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InputTooShort: return "InputTooShort";
    case ErrorCode::BadSeedLength: return "BadSeedLength";
    case ErrorCode::Misaligned: return "Misaligned";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::BadHashId: return "BadHashId";
    case ErrorCode::BadHex: return "BadHex";
    case ErrorCode::BadJob: return "BadJob";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::Deadlock: return "Deadlock";
    case ErrorCode::MalformedTrace: return "MalformedTrace";
    case ErrorCode::MalformedCorpus: return "MalformedCorpus";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace cnhaven
