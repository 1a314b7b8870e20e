#include "cnhaven/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

namespace cnhaven {

namespace {

constexpr std::uint64_t kBlocks = kScratchpadBytes / 16;

template <typename T>
std::uint64_t nearest_rank(const std::vector<T>& sorted, double q)
{
    if (sorted.empty()) return 0;
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

class Fenwick {
public:
    explicit Fenwick(std::size_t n) : t_(n + 1, 0) {}

    void add(std::size_t i, int v)
    {
        for (++i; i < t_.size(); i += i & (~i + 1)) t_[i] += v;
    }

    std::int64_t prefix(std::size_t i) const  // sum over [0, i)
    {
        std::int64_t s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += t_[i];
        return s;
    }

private:
    std::vector<std::int64_t> t_;
};

struct RunState {
    std::uint32_t last = 0;
    std::uint64_t run = 0;
};

void check_record(const AccessRecord& r, std::size_t index)
{
    const auto op = static_cast<unsigned>(r.op);
    const auto stage = static_cast<unsigned>(r.stage);
    if (op > 1 || stage > 2)
        throw Error(ErrorCode::MalformedTrace, "record " + std::to_string(index) + ": invalid op/stage");
    if (r.offset >= kScratchpadBytes)
        throw Error(ErrorCode::MalformedTrace,
            "record " + std::to_string(index) + ": offset " + std::to_string(r.offset) + " outside the scratchpad");
}

} // namespace

std::uint64_t TraceStats::run_length_quantile(double q) const
{
    std::uint64_t runs = 0;
    for (const auto& [len, n] : sequential_run_lengths) runs += n;
    if (runs == 0) return 0;
    auto rank = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(runs)));
    rank = std::clamp<std::uint64_t>(rank, 1, runs);
    std::uint64_t seen = 0;
    for (const auto& [len, n] : sequential_run_lengths) {
        seen += n;
        if (seen >= rank) return len;
    }
    return sequential_run_lengths.rbegin()->first;
}

TraceStats trace_stats(const AccessTrace& trace)
{
    TraceStats s;
    const auto& recs = trace.records;
    const std::size_t n = recs.size();
    s.total_accesses = n;

    std::vector<std::uint64_t> block_count(kBlocks, 0);
    std::unordered_map<std::uint16_t, RunState> runs;
    std::unordered_map<std::uint64_t, std::size_t> last_touch;
    Fenwick live(n);
    std::vector<std::uint64_t> distances;

    for (std::size_t i = 0; i < n; ++i) {
        const AccessRecord& r = recs[i];
        check_record(r, i);
        const auto st = static_cast<std::size_t>(r.stage);
        if (r.op == AccessOp::Read) {
            ++s.reads;
            ++s.reads_by_stage[st];
        } else {
            ++s.writes;
            ++s.writes_by_stage[st];
        }
        ++block_count[r.offset / 16];

        auto [it, fresh] = runs.try_emplace(r.hash_id);
        RunState& rs = it->second;
        if (fresh) {
            rs.run = 1;
        } else {
            const std::int64_t stride = static_cast<std::int64_t>(r.offset) - static_cast<std::int64_t>(rs.last);
            ++s.stride_histogram[stride];
            if (stride == 16) {
                ++rs.run;
            } else {
                ++s.sequential_run_lengths[rs.run];
                rs.run = 1;
            }
        }
        rs.last = r.offset;

        // Distinct blocks touched since the previous access to this block.
        const std::uint64_t key = (std::uint64_t{r.hash_id} << 32) | (r.offset / 16);
        auto [lt, first] = last_touch.try_emplace(key, i);
        if (first) {
            ++s.reuse_distance.cold;
        } else {
            const std::size_t prev = lt->second;
            distances.push_back(static_cast<std::uint64_t>(live.prefix(i) - live.prefix(prev + 1)));
            live.add(prev, -1);
            lt->second = i;
        }
        live.add(i, 1);
    }
    for (const auto& [id, rs] : runs) ++s.sequential_run_lengths[rs.run];

    if (n > 0) {
        const double total = static_cast<double>(n);
        double h = 0.0;
        for (std::uint64_t c : block_count) {
            if (!c) continue;
            ++s.distinct_blocks;
            const double p = static_cast<double>(c) / total;
            h -= p * std::log2(p);
        }
        s.address_entropy_bits = std::clamp(h, 0.0, kMaxAddressEntropyBits);
    }

    std::sort(distances.begin(), distances.end());
    s.reuse_distance.reuses = distances.size();
    s.reuse_distance.p50 = nearest_rank(distances, 0.50);
    s.reuse_distance.p90 = nearest_rank(distances, 0.90);
    s.reuse_distance.p99 = nearest_rank(distances, 0.99);
    return s;
}

AccessTrace filter_stage(const AccessTrace& trace, Stage stage)
{
    AccessTrace out;
    out.metadata = trace.metadata;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        if (trace.records[i].stage != stage) continue;
        out.records.push_back(trace.records[i]);
        if (i < trace.values.size()) out.values.push_back(trace.values[i]);
    }
    return out;
}

PartitionReport partition_check(const std::vector<AccessTrace>& traces, const PipelineConfig& config)
{
    PartitionReport rep;
    for (std::size_t t = 0; t < traces.size(); ++t) {
        const auto& recs = traces[t].records;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const AccessRecord& r = recs[i];
            ++rep.records_checked;
            PartitionViolation v{t, i, r.seq, r.hash_id, r.offset, 0, {}};
            if (r.hash_id >= config.pipeline_depth) {
                v.reason = "hash_id " + std::to_string(r.hash_id) + " >= pipeline_depth " +
                    std::to_string(config.pipeline_depth);
                rep.violations.push_back(std::move(v));
                continue;
            }
            const std::uint64_t base = region_base(r.hash_id, config);
            v.address = base + r.offset;
            if (v.address >= base + kScratchpadBytes)
                v.reason = "address outside region of hash_id " + std::to_string(r.hash_id);
            else if (r.offset % 16 != 0)
                v.reason = "misaligned offset";
            if (!v.reason.empty()) rep.violations.push_back(std::move(v));
        }
    }
    return rep;
}

std::string stats_to_json(const TraceStats& s, int indent)
{
    using nlohmann::json;
    json by_stage = json::object();
    for (std::size_t i = 0; i < 3; ++i)
        by_stage[std::string(to_string(static_cast<Stage>(i)))] = {
            {"reads", s.reads_by_stage[i]}, {"writes", s.writes_by_stage[i]}};
    json strides = json::object();
    for (const auto& [k, v] : s.stride_histogram) strides[std::to_string(k)] = v;
    json run_hist = json::object();
    for (const auto& [k, v] : s.sequential_run_lengths) run_hist[std::to_string(k)] = v;
    json j = {
        {"total_accesses", s.total_accesses},
        {"reads", s.reads},
        {"writes", s.writes},
        {"by_stage", by_stage},
        {"stride_histogram", strides},
        {"sequential_run_lengths", run_hist},
        {"sequential_run_p50", s.run_length_quantile(0.5)},
        {"address_entropy_bits", s.address_entropy_bits},
        {"distinct_blocks", s.distinct_blocks},
        {"reuse_distance_quantiles",
            {{"p50", s.reuse_distance.p50}, {"p90", s.reuse_distance.p90}, {"p99", s.reuse_distance.p99},
                {"reuses", s.reuse_distance.reuses}, {"cold", s.reuse_distance.cold}}},
    };
    return j.dump(indent);
}

std::string partition_to_json(const PartitionReport& r, int indent)
{
    using nlohmann::json;
    json v = json::array();
    for (const auto& x : r.violations)
        v.push_back({{"trace_index", x.trace_index}, {"record_index", x.record_index}, {"seq", x.seq},
            {"hash_id", x.hash_id}, {"offset", x.offset}, {"address", x.address}, {"reason", x.reason}});
    json j = {{"records_checked", r.records_checked}, {"violations", v}, {"ok", r.ok()}};
    return j.dump(indent);
}

} // namespace cnhaven
