#include "cnhaven/corpus.hpp"

#include "cnhaven/error.hpp"
#include "cnhaven/haven.hpp"

#include <fstream>

#include <json.hpp>

namespace cnhaven {

std::vector<CorpusEntry> parse_corpus(std::istream& is)
{
    std::vector<CorpusEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            CorpusEntry e;
            e.blob = from_hex(j.at("blob_hex").get<std::string>());
            e.nonce = j.at("nonce").get<std::uint32_t>();
            e.digest_hex = j.at("digest_hex").get<std::string>();
            const auto& cp = j.at("checkpoints");
            e.absorb_hex = cp.at("absorb_hex").get<std::string>();
            e.explode_head_hex = cp.at("explode_head_hex").get<std::string>();
            e.shuffle_head_hex = cp.at("shuffle_head_hex").get<std::string>();
            e.implode_state_hex = cp.at("implode_state_hex").get<std::string>();
            if (e.digest_hex.size() != 64) throw Error(ErrorCode::MalformedCorpus, "digest_hex must be 64 hex chars");
            from_hex(e.digest_hex);
            out.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorCode::MalformedCorpus, "line " + std::to_string(lineno) + ": " + ex.what());
        } catch (const Error& ex) {
            throw Error(ErrorCode::MalformedCorpus, "line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return out;
}

std::vector<CorpusEntry> load_corpus(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::Io, "cannot open corpus " + path);
    return parse_corpus(is);
}

std::string EntryResult::first_failure() const
{
    if (!absorb_ok) return "absorb";
    if (!explode_ok) return "explode_head";
    if (!shuffle_ok) return "shuffle_head";
    if (!implode_ok) return "implode_state";
    if (!digest_ok) return "digest";
    return {};
}

EntryResult verify_entry(const CorpusEntry& entry, std::size_t index)
{
    EntryResult r;
    r.index = index;
    HashJob job{entry.blob, kHaven.default_nonce_offset, entry.nonce};
    const Bytes input = patched_blob(job);
    Scratchpad pad;
    const HashCheckpoints cp = cn_haven_hash_checkpoints(input, pad);
    r.digest_hex = to_hex(cp.digest);
    r.digest_ok = r.digest_hex == entry.digest_hex;
    r.absorb_ok = to_hex(cp.absorbed.to_bytes()) == entry.absorb_hex;
    r.explode_ok = to_hex(cp.explode_head) == entry.explode_head_hex;
    r.shuffle_ok = to_hex(cp.shuffle_head) == entry.shuffle_head_hex;
    r.implode_ok = to_hex(cp.imploded.to_bytes()) == entry.implode_state_hex;
    return r;
}

} // namespace cnhaven
