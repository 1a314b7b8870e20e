#include "cnhaven/trace_io.hpp"

#include "cnhaven/error.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cnhaven {

namespace {

void encode_header(std::uint8_t* h, std::uint64_t count)
{
    std::memcpy(h, kTraceMagic, 4);
    h[4] = static_cast<std::uint8_t>(kTraceVersion);
    h[5] = static_cast<std::uint8_t>(kTraceVersion >> 8);
    store_le64(h + 6, count);
}

void encode_record(std::uint8_t* p, const AccessRecord& r)
{
    p[0] = static_cast<std::uint8_t>(r.op);
    p[1] = static_cast<std::uint8_t>(r.stage);
    p[2] = static_cast<std::uint8_t>(r.hash_id);
    p[3] = static_cast<std::uint8_t>(r.hash_id >> 8);
    store_le64(p + 4, r.seq);
    store_le32(p + 12, r.offset);
}

AccessRecord decode_record(const std::uint8_t* p, std::uint64_t index)
{
    if (p[0] > 1) throw Error(ErrorCode::MalformedTrace, "record " + std::to_string(index) + ": bad op " + std::to_string(p[0]));
    if (p[1] > 2) throw Error(ErrorCode::MalformedTrace, "record " + std::to_string(index) + ": bad stage " + std::to_string(p[1]));
    AccessRecord r;
    r.op = static_cast<AccessOp>(p[0]);
    r.stage = static_cast<Stage>(p[1]);
    r.hash_id = static_cast<std::uint16_t>(p[2] | (p[3] << 8));
    r.seq = load_le64(p + 4);
    r.offset = load_le32(p + 12);
    return r;
}

bool ends_with(const std::string& s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

TraceFormat trace_format_for_path(const std::string& path)
{
    return (ends_with(path, ".jsonl") || ends_with(path, ".json")) ? TraceFormat::JsonLines : TraceFormat::Binary;
}

void write_trace_binary(std::ostream& os, const AccessTrace& trace)
{
    std::uint8_t header[kTraceHeaderBytes];
    encode_header(header, trace.records.size());
    os.write(reinterpret_cast<const char*>(header), sizeof header);
    std::vector<std::uint8_t> buf(kTraceRecordBytes * 4096);
    std::size_t n = 0;
    for (const auto& r : trace.records) {
        encode_record(buf.data() + kTraceRecordBytes * n, r);
        if (++n == 4096) {
            os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(kTraceRecordBytes * n));
            n = 0;
        }
    }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(kTraceRecordBytes * n));
}

std::string record_to_json_line(const AccessRecord& r)
{
    std::string s = "{\"op\":\"";
    s += to_string(r.op);
    s += "\",\"stage\":\"";
    s += to_string(r.stage);
    s += "\",\"hash_id\":" + std::to_string(r.hash_id);
    s += ",\"seq\":" + std::to_string(r.seq);
    s += ",\"offset\":" + std::to_string(r.offset) + "}";
    return s;
}

void write_trace_jsonl(std::ostream& os, const AccessTrace& trace)
{
    for (const auto& r : trace.records) os << record_to_json_line(r) << '\n';
}

void write_trace(const std::string& path, const AccessTrace& trace)
{
    const auto format = trace_format_for_path(path);
    std::ofstream os(path, format == TraceFormat::Binary ? std::ios::binary : std::ios::out);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
    if (format == TraceFormat::Binary)
        write_trace_binary(os, trace);
    else
        write_trace_jsonl(os, trace);
    if (!os) throw Error(ErrorCode::Io, "write failed: " + path);
}

AccessTrace read_trace_binary(std::istream& is)
{
    std::uint8_t header[kTraceHeaderBytes];
    if (!is.read(reinterpret_cast<char*>(header), sizeof header))
        throw Error(ErrorCode::MalformedTrace, "truncated trace header");
    if (std::memcmp(header, kTraceMagic, 4) != 0) throw Error(ErrorCode::MalformedTrace, "bad trace magic");
    const std::uint16_t version = static_cast<std::uint16_t>(header[4] | (header[5] << 8));
    if (version != kTraceVersion) throw Error(ErrorCode::MalformedTrace, "unsupported trace version " + std::to_string(version));
    const std::uint64_t count = load_le64(header + 6);

    AccessTrace trace;
    std::uint8_t rec[kTraceRecordBytes];
    for (std::uint64_t i = 0; i < count; ++i) {
        if (!is.read(reinterpret_cast<char*>(rec), sizeof rec))
            throw Error(ErrorCode::MalformedTrace, "trace truncated at record " + std::to_string(i) + " of " + std::to_string(count));
        trace.records.push_back(decode_record(rec, i));
    }
    if (is.peek() != std::char_traits<char>::eof())
        throw Error(ErrorCode::MalformedTrace, "trailing bytes after " + std::to_string(count) + " records");
    return trace;
}

AccessTrace read_trace_jsonl(std::istream& is)
{
    AccessTrace trace;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            AccessRecord r;
            const auto op = j.at("op").get<std::string>();
            if (op == "R") r.op = AccessOp::Read;
            else if (op == "W") r.op = AccessOp::Write;
            else throw Error(ErrorCode::MalformedTrace, "bad op '" + op + "'");
            const auto stage = j.at("stage").get<std::string>();
            if (stage == "explode") r.stage = Stage::Explode;
            else if (stage == "shuffle") r.stage = Stage::Shuffle;
            else if (stage == "implode") r.stage = Stage::Implode;
            else throw Error(ErrorCode::MalformedTrace, "bad stage '" + stage + "'");
            r.hash_id = j.at("hash_id").get<std::uint16_t>();
            r.seq = j.at("seq").get<std::uint64_t>();
            r.offset = j.at("offset").get<std::uint32_t>();
            trace.records.push_back(r);
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedTrace, "line " + std::to_string(lineno) + ": " + e.what());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedTrace, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return trace;
}

AccessTrace read_trace(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::Io, "cannot open " + path);
    char magic[4] = {};
    is.read(magic, 4);
    const bool binary = is.gcount() == 4 && std::memcmp(magic, kTraceMagic, 4) == 0;
    is.clear();
    is.seekg(0);
    return binary ? read_trace_binary(is) : read_trace_jsonl(is);
}

FileTraceSink::FileTraceSink(const std::string& path, TraceFormat format)
    : format_(format)
{
    fp_ = std::fopen(path.c_str(), format == TraceFormat::Binary ? "wb" : "w");
    if (!fp_) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
    if (format_ == TraceFormat::Binary) {
        std::uint8_t header[kTraceHeaderBytes];
        encode_header(header, 0);
        std::fwrite(header, 1, sizeof header, fp_);
    }
}

FileTraceSink::~FileTraceSink() { close(); }

void FileTraceSink::append(const AccessRecord* records, std::size_t count)
{
    std::lock_guard lock(mu_);
    if (!fp_) throw Error(ErrorCode::Io, "trace sink already closed");
    if (format_ == TraceFormat::Binary) {
        std::vector<std::uint8_t> buf(kTraceRecordBytes * count);
        for (std::size_t i = 0; i < count; ++i) encode_record(buf.data() + kTraceRecordBytes * i, records[i]);
        if (std::fwrite(buf.data(), 1, buf.size(), fp_) != buf.size()) throw Error(ErrorCode::Io, "trace write failed");
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::string line = record_to_json_line(records[i]) + "\n";
            if (std::fwrite(line.data(), 1, line.size(), fp_) != line.size()) throw Error(ErrorCode::Io, "trace write failed");
        }
    }
    count_ += count;
}

void FileTraceSink::flush()
{
    std::lock_guard lock(mu_);
    if (fp_) std::fflush(fp_);
}

void FileTraceSink::close()
{
    std::lock_guard lock(mu_);
    if (!fp_) return;
    if (format_ == TraceFormat::Binary) {
        std::uint8_t header[kTraceHeaderBytes];
        encode_header(header, count_);
        std::fseek(fp_, 0, SEEK_SET);
        std::fwrite(header, 1, sizeof header, fp_);
    }
    std::fclose(fp_);
    fp_ = nullptr;
}

std::uint64_t FileTraceSink::count() const
{
    std::lock_guard lock(mu_);
    return count_;
}

} // namespace cnhaven
