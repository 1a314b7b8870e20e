#include "cnhaven/final_hash.hpp"

namespace cnhaven {

std::string_view to_string(FinalHashFamily family)
{
    switch (family) {
    case FinalHashFamily::Blake256: return "blake256";
    case FinalHashFamily::Groestl256: return "groestl256";
    case FinalHashFamily::Jh256: return "jh256";
    case FinalHashFamily::Skein256: return "skein256";
    }
    return "unknown";
}

std::optional<FinalHashFamily> parse_family(std::string_view name)
{
    for (std::uint8_t c = 0; c < 4; ++c) {
        const auto f = family_from_code(c);
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

Digest hash_final(FinalHashFamily family, ByteSpan data)
{
    switch (family) {
    case FinalHashFamily::Blake256: return blake256(data);
    case FinalHashFamily::Groestl256: return groestl256(data);
    case FinalHashFamily::Jh256: return jh256(data);
    case FinalHashFamily::Skein256: return skein512_256(data);
    }
    return {};
}

} // namespace cnhaven
