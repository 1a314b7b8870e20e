#include "cnhaven/pipeline_sim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>
#include <queue>
#include <tuple>
#include <random>
#include <thread>

namespace cnhaven {

std::string_view to_string(SimStage stage)
{
    switch (stage) {
    case SimStage::Keccak: return "Keccak";
    case SimStage::Explode: return "Explode";
    case SimStage::Shuffle: return "Shuffle";
    case SimStage::Implode: return "Implode";
    case SimStage::Finalize: return "Finalize";
    }
    return "Unknown";
}

std::string_view to_string(ClockDomain domain) { return domain == ClockDomain::Shuffle ? "shuffle" : "other"; }

std::array<StageModel, kSimStages> stage_models(const PipelineConfig& c)
{
    const auto& k = c.costs;
    const auto& w = c.workload;
    return {{
        {SimStage::Keccak, ClockDomain::Other, "message", 1, k.keccak, 0},
        {SimStage::Explode, ClockDomain::Other, "group", w.groups, k.explode_per_group, k.explode_premix},
        {SimStage::Shuffle, ClockDomain::Shuffle, "iteration", w.shuffle_iterations, k.shuffle_per_iteration, 0},
        {SimStage::Implode, ClockDomain::Other, "group", std::uint64_t{2} * w.groups, k.implode_per_group, k.implode_extra},
        {SimStage::Finalize, ClockDomain::Other, "message", 1, k.finalize, 0},
    }};
}

bool operator==(const FifoStats& a, const FifoStats& b)
{
    return a.capacity == b.capacity && a.min == b.min && a.max == b.max && a.mean == b.mean;
}

bool operator==(const LatencyBucket& a, const LatencyBucket& b) { return a.lo == b.lo && a.hi == b.hi && a.count == b.count; }

bool operator==(const MemStats& a, const MemStats& b)
{
    return a.reads == b.reads && a.writes == b.writes && a.mean_read_latency == b.mean_read_latency &&
        a.mean_write_latency == b.mean_write_latency && a.max_latency == b.max_latency &&
        a.peak_outstanding == b.peak_outstanding && a.port_utilization == b.port_utilization &&
        a.latency_histogram == b.latency_histogram;
}

bool operator==(const HashTimeline& a, const HashTimeline& b)
{
    return a.hash == b.hash && a.kernel == b.kernel && a.slot == b.slot && a.keccak_start == b.keccak_start &&
        a.explode_start == b.explode_start && a.shuffle_start == b.shuffle_start &&
        a.shuffle_last_event == b.shuffle_last_event && a.implode_first_event == b.implode_first_event &&
        a.implode_end == b.implode_end && a.finalize_end == b.finalize_end;
}

bool operator==(const SimReport& a, const SimReport& b)
{
    return a.config_id == b.config_id && a.hashes_injected == b.hashes_injected &&
        a.hashes_completed == b.hashes_completed && a.base_units == b.base_units &&
        a.shuffle_ticks == b.shuffle_ticks && a.other_ticks == b.other_ticks && a.elapsed_s == b.elapsed_s &&
        a.hash_rate_hs == b.hash_rate_hs && a.stage_utilization == b.stage_utilization &&
        a.fifo_occupancy == b.fifo_occupancy && a.mem == b.mem && a.bottleneck == b.bottleneck &&
        a.max_in_flight == b.max_in_flight && a.timeline == b.timeline;
}

AddressReplay AddressReplay::from_trace(const AccessTrace& trace)
{
    AddressReplay r;
    for (const auto& rec : trace.records)
        if (rec.stage == Stage::Shuffle && rec.op == AccessOp::Read) r.shuffle_reads.push_back(rec.offset);
    return r;
}

namespace {

constexpr std::uint32_t kBlockBytes = 16;
constexpr std::uint32_t kInterleaveBytes = 256;

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

/// Integer time base: one shuffle cycle is `s` units, one other-domain cycle `o` units.
struct TimeBase {
    std::uint64_t s;
    std::uint64_t o;
    double unit_s;

    explicit TimeBase(const PipelineConfig& c)
    {
        const std::uint64_t g = std::gcd(c.shuffle_clock_mhz, c.other_clock_mhz);
        s = c.other_clock_mhz / g;
        o = c.shuffle_clock_mhz / g;
        unit_s = 1.0 / (static_cast<double>(c.shuffle_clock_mhz) * 1e6 * static_cast<double>(s));
    }
};

} // namespace

TheoreticalBounds theoretical_bounds(const PipelineConfig& c)
{
    validate(c);
    const TimeBase tb(c);
    const double s = static_cast<double>(tb.s), o = static_cast<double>(tb.o);
    const double groups = c.workload.groups;
    const double iters = c.workload.shuffle_iterations;
    const double ser_group = static_cast<double>(ceil_div(kGroupBytes, c.pc_bytes_per_tick));
    const double ser_block = static_cast<double>(ceil_div(kBlockBytes, c.pc_bytes_per_tick));
    const double rd = c.mem.read_fixed, wr = c.mem.write_fixed, limit = c.outstanding_limit;
    const auto& k = c.costs;

    // Per-group spacing of a streaming stage: compute, port serialization or
    // the outstanding window, whichever is slowest.
    auto group_period = [&](double cycles, double latency) {
        return std::max({cycles * o, ser_group * s, (ser_group + latency) * s / limit});
    };

    std::array<double, kSimStages> units{};
    units[0] = k.keccak * o;
    units[1] = k.explode_premix * o + groups * group_period(k.explode_per_group, wr) + (ser_group + wr) * s;
    units[2] = iters * (3 * (ser_block + rd) + k.shuffle_per_iteration) * s;
    units[3] = (ser_group + rd) * s + 2 * groups * group_period(k.implode_per_group, rd) + k.implode_extra * o;
    units[4] = k.finalize * o;

    TheoreticalBounds b;
    double total = 0;
    for (std::size_t i = 0; i < kSimStages; ++i) {
        b.stage_latency_s[i] = units[i] * tb.unit_s;
        total += b.stage_latency_s[i];
    }
    b.single_hash_rate = 1.0 / total;

    const double hz = c.shuffle_clock_mhz * 1e6;
    const double kernels = c.n_kernels;
    const double usable_pcs = c.pc_mapping == PcMapping::PerHash
        ? std::min<double>(c.pcs_per_kernel, c.pipeline_depth)
        : c.pcs_per_kernel;
    const double port_ticks = groups * ser_group + iters * 6 * ser_block + 2 * groups * ser_group;
    const double bandwidth_rate = hz * usable_pcs * kernels / port_ticks;
    const double slot_ticks = groups * (ser_group + wr) + iters * 3 * ((ser_block + rd) + (ser_block + wr)) +
        2 * groups * (ser_group + rd);
    const double little_rate = limit * hz * kernels / slot_ticks;
    b.memory_bound_rate = std::min(bandwidth_rate, little_rate);

    const double round_trip = k.shuffle_per_iteration + 3 * (ser_block + rd);
    const double latency_rate = c.pipeline_depth * hz / (iters * round_trip);
    const double unit_rate = hz / (iters * k.shuffle_per_iteration);
    b.pipeline_bound_rate = kernels * std::min(latency_rate, unit_rate);

    b.min_rate = std::min({b.single_hash_rate, b.memory_bound_rate, b.pipeline_bound_rate});
    return b;
}

namespace {

enum class Purpose : std::uint8_t { ExplodeWrite, ShuffleRead, ShuffleWrite, ImplodeRead };

constexpr std::uint8_t arbitration_class(Purpose p)
{
    switch (p) {
    case Purpose::ImplodeRead: return 0;
    case Purpose::ExplodeWrite: return 1;
    default: return 2;
    }
}

enum class EvKind : std::uint8_t {
    MemDone,
    KeccakDone,
    ExplodeCompute,
    ShuffleStart,
    UnitDone,
    ImplodeStart,
    ImplodeCompute,
    ImplodeExtraDone,
    FinalizeDone,
    PortFree,
};

struct Event {
    std::uint64_t t;
    std::uint32_t cls;
    std::uint64_t seq;
    EvKind kind;
    std::uint32_t kernel;
    std::uint32_t arg;

    bool operator>(const Event& o) const
    {
        if (t != o.t) return t > o.t;
        if (cls != o.cls) return cls > o.cls;
        return seq > o.seq;
    }
};

struct Request {
    std::uint32_t hash;
    Purpose purpose;
    AccessOp op;
    std::uint32_t index;
    std::uint32_t bytes;
    std::uint32_t pc;
    std::uint64_t issued;
};

class Fifo {
public:
    explicit Fifo(std::uint32_t cap = 1) : cap_(cap) {}

    bool full() const { return q_.size() >= cap_; }
    bool empty() const { return q_.empty(); }

    void push(std::uint32_t h, std::uint64_t now)
    {
        account(now);
        q_.push_back(h);
        max_ = std::max<std::uint32_t>(max_, static_cast<std::uint32_t>(q_.size()));
    }

    std::uint32_t pop(std::uint64_t now)
    {
        account(now);
        const std::uint32_t h = q_.front();
        q_.pop_front();
        return h;
    }

    FifoStats stats(std::uint64_t end)
    {
        account(end);
        FifoStats s;
        s.capacity = cap_;
        s.max = max_;
        s.min = min_;
        s.mean = end ? static_cast<double>(area_) / static_cast<double>(end) : 0.0;
        return s;
    }

private:
    void account(std::uint64_t now)
    {
        area_ += static_cast<unsigned __int128>(q_.size()) * (now - last_);
        if (now > last_ || now == 0) min_ = std::min<std::uint32_t>(min_, static_cast<std::uint32_t>(q_.size()));
        last_ = now;
    }

    std::uint32_t cap_;
    std::deque<std::uint32_t> q_;
    std::uint32_t max_ = 0;
    std::uint32_t min_ = UINT32_MAX;
    unsigned __int128 area_ = 0;
    std::uint64_t last_ = 0;
};

struct HashState {
    std::uint32_t kernel = 0;
    std::uint32_t slot = 0;
    // shuffle context
    std::uint32_t iter = 0;
    std::uint8_t step = 0;
    bool compute_done = false;
    std::uint32_t writes_pending = 0;
    std::uint64_t addr_state = 0;
    std::uint32_t addrs[3] = {};
    HashTimeline tl;
};

struct PortState {
    std::uint64_t busy_until = 0;
    bool wake_pending = false;
    // (class, hash index, arrival seq, request id). Implode, then Explode, then the
    // oldest Shuffle context.
    using Entry = std::tuple<std::uint8_t, std::uint32_t, std::uint64_t, std::uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
    std::uint64_t arrivals = 0;
};

struct KernelState {
    std::vector<std::uint32_t> pending;
    std::size_t next_inject = 0;
    std::array<Fifo, kSimFifos> fifo;
    std::vector<std::uint32_t> free_slots;

    // Keccak
    bool keccak_busy = false;
    std::int64_t keccak_held = -1;
    std::uint32_t keccak_cur = 0;
    std::uint64_t keccak_busy_units = 0;

    // Explode
    std::int64_t explode_cur = -1;
    bool explode_premix = false;
    bool explode_computing = false;
    bool explode_waiting = false;
    bool explode_blocked = false;
    std::uint32_t explode_started = 0;
    std::uint32_t explode_issued = 0;
    std::uint32_t explode_inflight = 0;
    std::uint64_t explode_since = 0;
    std::uint64_t explode_active_units = 0;

    // Shuffle
    std::uint32_t shuffle_active = 0;
    std::deque<std::uint32_t> unit_ready;
    bool unit_busy = false;
    std::deque<std::uint32_t> shuffle_blocked;
    unsigned __int128 shuffle_area = 0;
    std::uint64_t shuffle_last = 0;

    // Implode
    std::int64_t implode_cur = -1;
    bool implode_computing = false;
    bool implode_blocked = false;
    bool implode_extra = false;
    std::uint32_t implode_issued = 0;
    std::uint32_t implode_consumed = 0;
    std::vector<std::uint8_t> implode_ready;
    std::uint64_t implode_since = 0;
    std::uint64_t implode_active_units = 0;

    // Finalize
    bool finalize_busy = false;
    std::uint32_t finalize_cur = 0;
    std::uint64_t finalize_busy_units = 0;

    // Memory
    std::vector<PortState> ports;
    std::uint32_t outstanding = 0;
    std::uint32_t next_port = 0;
    std::uint64_t port_busy_units = 0;

    std::uint32_t in_flight = 0;
};

std::uint64_t splitmix(std::uint64_t& x)
{
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Simulator {
public:
    Simulator(const PipelineConfig& c, std::uint64_t n, const AddressReplay* replay)
        : c_(c), tb_(c), n_(n), replay_(replay && !replay->shuffle_reads.empty() ? replay : nullptr),
          rng_(c.mem.seed), ser_group_(ceil_div(kGroupBytes, c.pc_bytes_per_tick)),
          ser_block_(ceil_div(kBlockBytes, c.pc_bytes_per_tick)), groups_(c.workload.groups),
          iters_(c.workload.shuffle_iterations)
    {
        kernels_.resize(c.n_kernels);
        for (auto& k : kernels_) {
            for (std::size_t i = 0; i < kSimFifos; ++i) k.fifo[i] = Fifo(c.fifo_depths[i]);
            for (std::uint32_t s = c.pipeline_depth; s-- > 0;) k.free_slots.push_back(s);
            k.ports.resize(c.pcs_per_kernel);
            k.implode_ready.assign(2 * static_cast<std::size_t>(groups_), 0);
        }
        hashes_.resize(n);
        for (std::uint64_t h = 0; h < n; ++h) {
            auto& hs = hashes_[h];
            hs.kernel = static_cast<std::uint32_t>(h % c.n_kernels);
            hs.addr_state = c.mem.seed ^ (h * 0xD1B54A32D192ED03ULL);
            hs.tl.hash = static_cast<std::uint32_t>(h);
            hs.tl.kernel = hs.kernel;
            kernels_[hs.kernel].pending.push_back(static_cast<std::uint32_t>(h));
        }
    }

    SimReport run()
    {
        for (std::uint32_t k = 0; k < kernels_.size(); ++k) advance(k);
        while (!events_.empty()) {
            const Event ev = events_.top();
            events_.pop();
            now_ = ev.t;
            dispatch(ev);
        }
        if (completed_ != n_) {
            std::string where;
            for (std::uint32_t k = 0; k < kernels_.size(); ++k) {
                const auto& ks = kernels_[k];
                where += " kernel " + std::to_string(k) + ": in_flight=" + std::to_string(ks.in_flight) +
                    " free_slots=" + std::to_string(ks.free_slots.size()) +
                    " outstanding=" + std::to_string(ks.outstanding) + ";";
            }
            throw Error(ErrorCode::Deadlock, "no event can fire with " + std::to_string(n_ - completed_) +
                    " of " + std::to_string(n_) + " hashes unfinished;" + where);
        }
        return report();
    }

private:
    // ---- time helpers
    std::uint64_t edge_o(std::uint64_t t) const { return ceil_div(t, tb_.o) * tb_.o; }
    std::uint64_t edge_s(std::uint64_t t) const { return ceil_div(t, tb_.s) * tb_.s; }
    double ticks(std::uint64_t units) const { return static_cast<double>(units) / static_cast<double>(tb_.s); }

    void schedule(std::uint64_t t, std::uint32_t cls, EvKind kind, std::uint32_t kernel, std::uint32_t arg)
    {
        events_.push(Event{t, cls, seq_++, kind, kernel, arg});
    }

    void dispatch(const Event& ev)
    {
        switch (ev.kind) {
        case EvKind::MemDone: on_mem_done(ev.arg); break;
        case EvKind::KeccakDone: on_keccak_done(ev.kernel); break;
        case EvKind::ExplodeCompute: on_explode_compute(ev.kernel); break;
        case EvKind::ShuffleStart: on_shuffle_start(ev.arg); break;
        case EvKind::UnitDone: on_unit_done(ev.kernel, ev.arg); break;
        case EvKind::ImplodeStart: on_implode_start(ev.kernel); break;
        case EvKind::ImplodeCompute: on_implode_compute(ev.kernel); break;
        case EvKind::ImplodeExtraDone: on_implode_extra_done(ev.kernel); break;
        case EvKind::FinalizeDone: on_finalize_done(ev.kernel); break;
        case EvKind::PortFree:
            kernels_[ev.kernel].ports[ev.arg].wake_pending = false;
            try_grant(ev.kernel, ev.arg);
            break;
        }
    }

    // ---- stage starts; repeated until nothing moves
    void advance(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        bool moved = true;
        while (moved) {
            moved = false;
            // Finalize
            if (!ks.finalize_busy && !ks.fifo[3].empty()) {
                const std::uint32_t h = ks.fifo[3].pop(now_);
                if (ks.implode_blocked) {
                    ks.fifo[3].push(static_cast<std::uint32_t>(ks.implode_cur), now_);
                    release_implode(k);
                }
                ks.finalize_busy = true;
                ks.finalize_cur = h;
                const std::uint64_t start = edge_o(now_);
                const std::uint64_t dur = std::uint64_t{c_.costs.finalize} * tb_.o;
                ks.finalize_busy_units += dur;
                schedule(start + dur, 1, EvKind::FinalizeDone, k, h);
                moved = true;
            }
            // Implode
            if (ks.implode_cur < 0 && !ks.fifo[2].empty()) {
                const std::uint32_t h = ks.fifo[2].pop(now_);
                if (!ks.shuffle_blocked.empty()) {
                    const std::uint32_t b = ks.shuffle_blocked.front();
                    ks.shuffle_blocked.pop_front();
                    leave_shuffle(k, b);
                    ks.fifo[2].push(b, now_);
                }
                ks.implode_cur = h;
                ks.implode_since = now_;
                schedule(edge_o(now_), 1, EvKind::ImplodeStart, k, h);
                moved = true;
            }
            // Shuffle accepts everything that arrives; scratchpad slots bound it.
            while (!ks.fifo[1].empty()) {
                const std::uint32_t h = ks.fifo[1].pop(now_);
                if (ks.explode_blocked) {
                    ks.fifo[1].push(static_cast<std::uint32_t>(ks.explode_cur), now_);
                    release_explode(k);
                }
                account_shuffle(k);
                ++ks.shuffle_active;
                hashes_[h].tl.shuffle_start = ticks(edge_s(now_));
                schedule(edge_s(now_), 1, EvKind::ShuffleStart, k, h);
                moved = true;
            }
            // Explode
            if (ks.explode_cur < 0 && !ks.fifo[0].empty() && !ks.free_slots.empty()) {
                const std::uint32_t h = ks.fifo[0].pop(now_);
                if (ks.keccak_held >= 0) {
                    ks.fifo[0].push(static_cast<std::uint32_t>(ks.keccak_held), now_);
                    ks.keccak_held = -1;
                }
                hashes_[h].slot = ks.free_slots.back();
                hashes_[h].tl.slot = hashes_[h].slot;
                ks.free_slots.pop_back();
                ks.explode_cur = h;
                ks.explode_premix = true;
                ks.explode_computing = true;
                ks.explode_waiting = false;
                ks.explode_started = 0;
                ks.explode_issued = 0;
                ks.explode_inflight = 0;
                const std::uint64_t start = edge_o(now_);
                ks.explode_since = now_;
                hashes_[h].tl.explode_start = ticks(start);
                schedule(start + std::uint64_t{c_.costs.explode_premix} * tb_.o, 1, EvKind::ExplodeCompute, k, h);
                moved = true;
            }
            // Keccak
            if (!ks.keccak_busy && ks.keccak_held < 0 && ks.next_inject < ks.pending.size()) {
                const std::uint32_t h = ks.pending[ks.next_inject++];
                ++ks.in_flight;
                max_in_flight_ = std::max(max_in_flight_, ks.in_flight);
                ks.keccak_busy = true;
                ks.keccak_cur = h;
                const std::uint64_t start = edge_o(now_);
                const std::uint64_t dur = std::uint64_t{c_.costs.keccak} * tb_.o;
                ks.keccak_busy_units += dur;
                hashes_[h].tl.keccak_start = ticks(start);
                schedule(start + dur, 1, EvKind::KeccakDone, k, h);
                moved = true;
            }
        }
    }

    void on_keccak_done(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        ks.keccak_busy = false;
        if (ks.fifo[0].full())
            ks.keccak_held = ks.keccak_cur;
        else
            ks.fifo[0].push(ks.keccak_cur, now_);
        advance(k);
    }

    // ---- Explode
    void on_explode_compute(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        const auto h = static_cast<std::uint32_t>(ks.explode_cur);
        ks.explode_computing = false;
        if (ks.explode_premix) {
            ks.explode_premix = false;
        } else {
            const std::uint32_t g = ks.explode_issued++;
            ++ks.explode_inflight;
            issue(k, h, Purpose::ExplodeWrite, AccessOp::Write, g, kGroupBytes, g * kGroupBytes);
        }
        explode_next(k);
    }

    void explode_next(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        if (ks.explode_computing || ks.explode_cur < 0 || ks.explode_blocked) return;
        if (ks.explode_started < groups_) {
            if (ks.explode_inflight >= c_.outstanding_limit) {
                ks.explode_waiting = true;
                return;
            }
            ks.explode_waiting = false;
            ++ks.explode_started;
            ks.explode_computing = true;
            schedule(edge_o(now_) + std::uint64_t{c_.costs.explode_per_group} * tb_.o, 1, EvKind::ExplodeCompute, k,
                static_cast<std::uint32_t>(ks.explode_cur));
            return;
        }
        if (ks.explode_issued == groups_ && ks.explode_inflight == 0) {
            if (ks.fifo[1].full()) {
                ks.explode_blocked = true;
            } else {
                ks.fifo[1].push(static_cast<std::uint32_t>(ks.explode_cur), now_);
                release_explode(k);
            }
            advance(k);
        }
    }

    void release_explode(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        ks.explode_active_units += now_ - ks.explode_since;
        ks.explode_cur = -1;
        ks.explode_blocked = false;
    }

    // ---- Shuffle
    void account_shuffle(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        ks.shuffle_area += static_cast<unsigned __int128>(ks.shuffle_active) * (now_ - ks.shuffle_last);
        ks.shuffle_last = now_;
    }

    void leave_shuffle(std::uint32_t k, std::uint32_t)
    {
        account_shuffle(k);
        --kernels_[k].shuffle_active;
    }

    std::uint32_t shuffle_address(HashState& hs, std::uint32_t step)
    {
        if (replay_) {
            const auto& r = replay_->shuffle_reads;
            const std::uint64_t i = (std::uint64_t{hs.iter} * 3 + step) % r.size();
            return r[i];
        }
        return static_cast<std::uint32_t>(splitmix(hs.addr_state)) & kHaven.address_mask;
    }

    void shuffle_read(std::uint32_t k, std::uint32_t h, std::uint8_t step)
    {
        auto& hs = hashes_[h];
        hs.step = step;
        hs.addrs[step] = shuffle_address(hs, step);
        issue(k, h, Purpose::ShuffleRead, AccessOp::Read, step, kBlockBytes, hs.addrs[step]);
    }

    void shuffle_write(std::uint32_t k, std::uint32_t h, std::uint32_t addr)
    {
        ++hashes_[h].writes_pending;
        issue(k, h, Purpose::ShuffleWrite, AccessOp::Write, 0, kBlockBytes, addr);
    }

    void on_shuffle_start(std::uint32_t h)
    {
        auto& hs = hashes_[h];
        hs.iter = 0;
        hs.compute_done = false;
        hs.writes_pending = 0;
        shuffle_read(hs.kernel, h, 0);
    }

    void on_shuffle_read_done(std::uint32_t h, std::uint32_t step)
    {
        auto& hs = hashes_[h];
        const std::uint32_t k = hs.kernel;
        if (step < 2) {
            // The next read goes first so it is not queued behind the write.
            const std::uint32_t addr = hs.addrs[step];
            shuffle_read(k, h, static_cast<std::uint8_t>(step + 1));
            shuffle_write(k, h, addr);
            return;
        }
        kernels_[k].unit_ready.push_back(h);
        try_unit(k);
    }

    void try_unit(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        if (ks.unit_busy || ks.unit_ready.empty()) return;
        const std::uint32_t h = ks.unit_ready.front();
        ks.unit_ready.pop_front();
        ks.unit_busy = true;
        schedule(edge_s(now_) + std::uint64_t{c_.costs.shuffle_per_iteration} * tb_.s, 1, EvKind::UnitDone, k, h);
    }

    void on_unit_done(std::uint32_t k, std::uint32_t h)
    {
        auto& ks = kernels_[k];
        auto& hs = hashes_[h];
        ks.unit_busy = false;
        const std::uint32_t addr = hs.addrs[2];
        if (++hs.iter < iters_)
            shuffle_read(k, h, 0);
        else
            hs.compute_done = true;
        shuffle_write(k, h, addr);
        try_unit(k);
    }

    void on_shuffle_write_done(std::uint32_t h)
    {
        auto& hs = hashes_[h];
        --hs.writes_pending;
        if (hs.compute_done && hs.writes_pending == 0) shuffle_finished(hs.kernel, h);
    }

    void shuffle_finished(std::uint32_t k, std::uint32_t h)
    {
        auto& ks = kernels_[k];
        hashes_[h].tl.shuffle_last_event = ticks(now_);
        if (ks.fifo[2].full() || !ks.shuffle_blocked.empty()) {
            ks.shuffle_blocked.push_back(h);
        } else {
            leave_shuffle(k, h);
            ks.fifo[2].push(h, now_);
        }
        advance(k);
    }

    // ---- Implode
    void on_implode_start(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        ks.implode_issued = 0;
        ks.implode_consumed = 0;
        ks.implode_extra = false;
        std::fill(ks.implode_ready.begin(), ks.implode_ready.end(), 0);
        hashes_[static_cast<std::uint32_t>(ks.implode_cur)].tl.implode_first_event = ticks(now_);
        implode_issue(k);
    }

    void implode_issue(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        const auto h = static_cast<std::uint32_t>(ks.implode_cur);
        const std::uint32_t total = 2 * groups_;
        while (ks.implode_issued < total && ks.implode_issued - ks.implode_consumed < c_.outstanding_limit) {
            const std::uint32_t j = ks.implode_issued++;
            issue(k, h, Purpose::ImplodeRead, AccessOp::Read, j, kGroupBytes, (j % groups_) * kGroupBytes);
        }
    }

    void implode_try_compute(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        if (ks.implode_computing || ks.implode_extra || ks.implode_cur < 0 || ks.implode_blocked) return;
        if (ks.implode_consumed >= 2 * groups_ || !ks.implode_ready[ks.implode_consumed]) return;
        ks.implode_computing = true;
        schedule(edge_o(now_) + std::uint64_t{c_.costs.implode_per_group} * tb_.o, 1, EvKind::ImplodeCompute, k,
            static_cast<std::uint32_t>(ks.implode_cur));
    }

    void on_implode_compute(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        ks.implode_computing = false;
        ++ks.implode_consumed;
        if (ks.implode_consumed == 2 * groups_) {
            ks.implode_extra = true;
            schedule(now_ + std::uint64_t{c_.costs.implode_extra} * tb_.o, 1, EvKind::ImplodeExtraDone, k,
                static_cast<std::uint32_t>(ks.implode_cur));
            return;
        }
        implode_issue(k);
        implode_try_compute(k);
    }

    void on_implode_extra_done(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        const auto h = static_cast<std::uint32_t>(ks.implode_cur);
        hashes_[h].tl.implode_end = ticks(now_);
        ks.free_slots.push_back(hashes_[h].slot);
        if (ks.fifo[3].full()) {
            ks.implode_blocked = true;
        } else {
            ks.fifo[3].push(h, now_);
            release_implode(k);
        }
        advance(k);
    }

    void release_implode(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        ks.implode_active_units += now_ - ks.implode_since;
        ks.implode_cur = -1;
        ks.implode_blocked = false;
        ks.implode_extra = false;
    }

    // ---- Finalize
    void on_finalize_done(std::uint32_t k)
    {
        auto& ks = kernels_[k];
        hashes_[ks.finalize_cur].tl.finalize_end = ticks(now_);
        ks.finalize_busy = false;
        --ks.in_flight;
        ++completed_;
        end_ = now_;
        advance(k);
    }

    // ---- Memory
    std::uint32_t port_for(const KernelState& ks, std::uint32_t h, std::uint32_t offset) const
    {
        const auto p = static_cast<std::uint32_t>(ks.ports.size());
        if (c_.pc_mapping == PcMapping::PerHash) return hashes_[h].slot % p;
        return (offset / kInterleaveBytes) % p;
    }

    void issue(std::uint32_t k, std::uint32_t h, Purpose purpose, AccessOp op, std::uint32_t index, std::uint32_t bytes,
        std::uint32_t offset)
    {
        auto& ks = kernels_[k];
        std::uint32_t id;
        if (!free_reqs_.empty()) {
            id = free_reqs_.back();
            free_reqs_.pop_back();
        } else {
            id = static_cast<std::uint32_t>(reqs_.size());
            reqs_.emplace_back();
        }
        const std::uint32_t pc = port_for(ks, h, offset);
        reqs_[id] = Request{h, purpose, op, index, bytes, pc, now_};
        auto& port = ks.ports[pc];
        port.queue.emplace(arbitration_class(purpose), h, port.arrivals++, id);
        try_grant(k, pc);
    }

    std::uint64_t sample_latency(AccessOp op)
    {
        std::uint64_t lat = op == AccessOp::Read ? c_.mem.read_fixed : c_.mem.write_fixed;
        if (c_.mem.jitter_max > 0) lat += std::uniform_int_distribution<std::uint64_t>(0, c_.mem.jitter_max)(rng_);
        if (c_.mem.model == JitterModel::ExponentialTail && c_.mem.tail_mean > 0)
            lat += static_cast<std::uint64_t>(std::exponential_distribution<double>(1.0 / c_.mem.tail_mean)(rng_));
        return lat;
    }

    void try_grant(std::uint32_t k, std::uint32_t pc)
    {
        auto& ks = kernels_[k];
        auto& port = ks.ports[pc];
        if (port.queue.empty()) return;
        if (ks.outstanding >= c_.outstanding_limit) return;
        const std::uint64_t at = std::max(edge_s(now_), port.busy_until);
        if (at > now_) {
            if (!port.wake_pending) {
                port.wake_pending = true;
                schedule(at, 2, EvKind::PortFree, k, pc);
            }
            return;
        }
        const std::uint32_t id = std::get<3>(port.queue.top());
        port.queue.pop();
        const Request& r = reqs_[id];
        const std::uint64_t ser = (r.bytes == kGroupBytes ? ser_group_ : ser_block_) * tb_.s;
        port.busy_until = now_ + ser;
        ks.port_busy_units += ser;
        ++ks.outstanding;
        peak_outstanding_ = std::max(peak_outstanding_, ks.outstanding);
        schedule(port.busy_until + sample_latency(r.op) * tb_.s, 0, EvKind::MemDone, k, id);
        // A full window is re-driven by the next completion instead.
        if (!port.queue.empty() && !port.wake_pending && ks.outstanding < c_.outstanding_limit) {
            port.wake_pending = true;
            schedule(port.busy_until, 2, EvKind::PortFree, k, pc);
        }
    }

    void on_mem_done(std::uint32_t id)
    {
        const Request r = reqs_[id];
        free_reqs_.push_back(id);
        const std::uint32_t k = hashes_[r.hash].kernel;
        auto& ks = kernels_[k];
        --ks.outstanding;

        const std::uint64_t lat = (now_ - r.issued) / tb_.s;
        max_latency_ = std::max(max_latency_, lat);
        ++histogram_[std::bit_width(lat)];
        if (r.op == AccessOp::Read) {
            ++reads_;
            read_latency_sum_ += lat;
        } else {
            ++writes_;
            write_latency_sum_ += lat;
        }

        // A freed outstanding slot may unblock any port of this kernel.
        const auto p = static_cast<std::uint32_t>(ks.ports.size());
        for (std::uint32_t i = 0; i < p; ++i) try_grant(k, (ks.next_port + i) % p);
        ks.next_port = (ks.next_port + 1) % p;

        switch (r.purpose) {
        case Purpose::ExplodeWrite:
            --ks.explode_inflight;
            explode_next(k);
            break;
        case Purpose::ShuffleRead: on_shuffle_read_done(r.hash, r.index); break;
        case Purpose::ShuffleWrite: on_shuffle_write_done(r.hash); break;
        case Purpose::ImplodeRead:
            ks.implode_ready[r.index] = 1;
            implode_try_compute(k);
            break;
        }
    }

    SimReport report()
    {
        SimReport rep;
        rep.config_id = c_.id;
        rep.hashes_injected = n_;
        rep.hashes_completed = completed_;
        rep.base_units = end_;
        rep.shuffle_ticks = end_ / tb_.s;
        rep.other_ticks = end_ / tb_.o;
        rep.elapsed_s = static_cast<double>(end_) * tb_.unit_s;
        rep.hash_rate_hs = rep.elapsed_s > 0 ? static_cast<double>(completed_) / rep.elapsed_s : 0.0;
        rep.max_in_flight = max_in_flight_;

        const double span = static_cast<double>(end_) * static_cast<double>(kernels_.size());
        std::array<double, kSimStages> busy{};
        std::array<FifoStats, kSimFifos> fifo{};
        bool first = true;
        std::uint64_t port_busy = 0;
        for (std::uint32_t k = 0; k < kernels_.size(); ++k) {
            auto& ks = kernels_[k];
            now_ = end_;
            account_shuffle(k);
            busy[0] += static_cast<double>(ks.keccak_busy_units);
            busy[1] += static_cast<double>(ks.explode_active_units);
            busy[2] += static_cast<double>(ks.shuffle_area) / static_cast<double>(c_.pipeline_depth);
            busy[3] += static_cast<double>(ks.implode_active_units);
            busy[4] += static_cast<double>(ks.finalize_busy_units);
            port_busy += ks.port_busy_units;
            for (std::size_t i = 0; i < kSimFifos; ++i) {
                const FifoStats s = ks.fifo[i].stats(end_);
                if (first) {
                    fifo[i] = s;
                } else {
                    fifo[i].min = std::min(fifo[i].min, s.min);
                    fifo[i].max = std::max(fifo[i].max, s.max);
                    fifo[i].mean += s.mean;
                }
            }
            first = false;
        }
        for (auto& f : fifo) {
            f.mean /= static_cast<double>(kernels_.size());
            if (n_ == 0) f.min = 0;
        }
        rep.fifo_occupancy = fifo;

        std::size_t best = 0;
        for (std::size_t i = 0; i < kSimStages; ++i) {
            rep.stage_utilization[i] = span > 0 ? std::min(1.0, busy[i] / span) : 0.0;
            if (rep.stage_utilization[i] > rep.stage_utilization[best]) best = i;
        }
        rep.bottleneck = n_ ? std::string(to_string(static_cast<SimStage>(best))) : "none";

        rep.mem.reads = reads_;
        rep.mem.writes = writes_;
        rep.mem.mean_read_latency = reads_ ? static_cast<double>(read_latency_sum_) / static_cast<double>(reads_) : 0.0;
        rep.mem.mean_write_latency = writes_ ? static_cast<double>(write_latency_sum_) / static_cast<double>(writes_) : 0.0;
        rep.mem.max_latency = max_latency_;
        rep.mem.peak_outstanding = peak_outstanding_;
        const double port_span = static_cast<double>(end_) * static_cast<double>(kernels_.size() * c_.pcs_per_kernel);
        rep.mem.port_utilization = port_span > 0 ? static_cast<double>(port_busy) / port_span : 0.0;
        for (std::size_t b = 0; b < histogram_.size(); ++b) {
            if (!histogram_[b]) continue;
            const std::uint64_t lo = b == 0 ? 0 : std::uint64_t{1} << (b - 1);
            const std::uint64_t hi = b == 0 ? 1 : (b >= 64 ? UINT64_MAX : std::uint64_t{1} << b);
            rep.mem.latency_histogram.push_back({lo, hi, histogram_[b]});
        }

        if (c_.record_timeline) {
            rep.timeline.reserve(hashes_.size());
            for (const auto& hs : hashes_) rep.timeline.push_back(hs.tl);
        }
        return rep;
    }

    const PipelineConfig& c_;
    TimeBase tb_;
    std::uint64_t n_;
    const AddressReplay* replay_;
    std::mt19937_64 rng_;
    std::uint64_t ser_group_;
    std::uint64_t ser_block_;
    std::uint32_t groups_;
    std::uint32_t iters_;

    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
    std::uint64_t seq_ = 0;
    std::uint64_t now_ = 0;
    std::uint64_t end_ = 0;

    std::vector<KernelState> kernels_;
    std::vector<HashState> hashes_;
    std::vector<Request> reqs_;
    std::vector<std::uint32_t> free_reqs_;

    std::uint64_t completed_ = 0;
    std::uint32_t max_in_flight_ = 0;
    std::uint32_t peak_outstanding_ = 0;
    std::uint64_t reads_ = 0;
    std::uint64_t writes_ = 0;
    std::uint64_t read_latency_sum_ = 0;
    std::uint64_t write_latency_sum_ = 0;
    std::uint64_t max_latency_ = 0;
    std::array<std::uint64_t, 65> histogram_{};
};

} // namespace

SimReport simulate(const PipelineConfig& config, std::uint64_t n_hashes, const AddressReplay* replay)
{
    validate(config);
    Simulator sim(config, n_hashes, replay);
    return sim.run();
}

std::vector<SweepResult> sweep(const std::vector<PipelineConfig>& grid, std::uint64_t n_hashes, unsigned threads,
    const AddressReplay* replay)
{
    if (grid.empty()) throw Error(ErrorCode::ConfigInvalid, "sweep grid is empty");
    std::vector<SweepResult> out(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) {
            out[i].config = grid[i];
            try {
                out[i].report = simulate(grid[i], n_hashes, replay);
            } catch (const Error& e) {
                out[i].error_code = e.code();
                out[i].error_message = e.what();
            }
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(grid.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

} // namespace cnhaven
