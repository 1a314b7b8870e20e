#pragma once

#include <istream>
#include <string>
#include <vector>

#include "cnhaven/bytes.hpp"

namespace cnhaven {

/// One golden-vector entry. blob is stored before nonce patching; the nonce
/// goes at the default offset.
struct CorpusEntry {
    Bytes blob;
    std::uint32_t nonce = 0;
    std::string digest_hex;
    std::string absorb_hex;
    std::string explode_head_hex;
    std::string shuffle_head_hex;
    std::string implode_state_hex;
};

/// Throws MalformedCorpus naming the line on any parse or field error.
std::vector<CorpusEntry> parse_corpus(std::istream& is);
std::vector<CorpusEntry> load_corpus(const std::string& path);

struct EntryResult {
    std::size_t index = 0;
    bool digest_ok = false;
    bool absorb_ok = false;
    bool explode_ok = false;
    bool shuffle_ok = false;
    bool implode_ok = false;
    std::string digest_hex;

    bool ok() const { return digest_ok && absorb_ok && explode_ok && shuffle_ok && implode_ok; }
    /// First failing checkpoint name, or empty.
    std::string first_failure() const;
};

/// Recomputes one entry including every checkpoint.
EntryResult verify_entry(const CorpusEntry& entry, std::size_t index);

} // namespace cnhaven
