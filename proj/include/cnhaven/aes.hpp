#pragma once

#include <array>
#include <cstdint>

#include "cnhaven/block128.hpp"
#include "cnhaven/bytes.hpp"

namespace cnhaven {

using AesRoundKeys = std::array<Block128, 10>;

/// One full AES encryption round with AESENC semantics:
/// ShiftRows, SubBytes, MixColumns, then XOR with key.
Block128 aes_round(const Block128& block, const Block128& key);

/// First 10 round keys of the AES-256 schedule seeded by 32 bytes.
/// Throws Error(BadSeedLength) unless seed.size() == 32.
AesRoundKeys aes_expand_keys(ByteSpan seed);

std::uint8_t aes_sbox(std::uint8_t x);

enum class AesBackend { Auto, Table, Hardware };

/// True when the CPU and the build both support AES-NI.
bool hardware_aes_available();

/// Backend the hash core will use. Auto resolves to Hardware when available.
AesBackend active_aes_backend();

/// Forces a backend (tests use this to compare paths). Selecting Hardware on a
/// machine without it falls back to Table.
void set_aes_backend(AesBackend backend);

} // namespace cnhaven
