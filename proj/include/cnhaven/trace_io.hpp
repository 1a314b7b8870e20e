#pragma once

#include <cstdio>
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>

#include "cnhaven/scratchpad.hpp"

namespace cnhaven {

inline constexpr char kTraceMagic[4] = {'C', 'N', 'H', 'T'};
inline constexpr std::uint16_t kTraceVersion = 1;
inline constexpr std::size_t kTraceHeaderBytes = 4 + 2 + 8;
inline constexpr std::size_t kTraceRecordBytes = 1 + 1 + 2 + 8 + 4;

enum class TraceFormat { Binary, JsonLines };

/// Binary when the path does not end in .jsonl / .json.
TraceFormat trace_format_for_path(const std::string& path);

void write_trace_binary(std::ostream& os, const AccessTrace& trace);
void write_trace_jsonl(std::ostream& os, const AccessTrace& trace);
void write_trace(const std::string& path, const AccessTrace& trace);

/// Throws MalformedTrace on bad magic, version, truncation or field values.
AccessTrace read_trace_binary(std::istream& is);
AccessTrace read_trace_jsonl(std::istream& is);
/// Detects the format from the first bytes.
AccessTrace read_trace(const std::string& path);

std::string record_to_json_line(const AccessRecord& r);

/// Streams records to a file; the binary header count is patched on close.
class FileTraceSink final : public TraceSink {
public:
    FileTraceSink(const std::string& path, TraceFormat format);
    ~FileTraceSink() override;
    void append(const AccessRecord* records, std::size_t count) override;
    void flush() override;
    void close();
    std::uint64_t count() const;

private:
    mutable std::mutex mu_;
    std::FILE* fp_ = nullptr;
    TraceFormat format_;
    std::uint64_t count_ = 0;
};

} // namespace cnhaven
