#include "cnhaven/sim_report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cnhaven {

using nlohmann::json;

namespace {

constexpr const char* kFifoNames[kSimFifos] = {
    "Keccak->Explode", "Explode->Shuffle", "Shuffle->Implode", "Implode->Finalize"};

std::string_view jitter_name(JitterModel m) { return m == JitterModel::Uniform ? "uniform" : "exponential_tail"; }
std::string_view mapping_name(PcMapping m) { return m == PcMapping::PerHash ? "per_hash" : "address_interleaved"; }

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); }

json config_json(const PipelineConfig& c)
{
    json j;
    j["id"] = c.id;
    j["pipeline_depth"] = c.pipeline_depth;
    j["shuffle_clock_mhz"] = c.shuffle_clock_mhz;
    j["other_clock_mhz"] = c.other_clock_mhz;
    j["fifo_depths"] = c.fifo_depths;
    j["mem_latency_ticks"] = {
        {"read_fixed", c.mem.read_fixed},
        {"write_fixed", c.mem.write_fixed},
        {"jitter_max", c.mem.jitter_max},
        {"seed", c.mem.seed},
        {"model", std::string(jitter_name(c.mem.model))},
        {"tail_mean", c.mem.tail_mean},
    };
    j["outstanding_limit"] = c.outstanding_limit;
    j["n_kernels"] = c.n_kernels;
    j["pcs_per_kernel"] = c.pcs_per_kernel;
    j["pc_bytes_per_tick"] = c.pc_bytes_per_tick;
    j["pc_mapping"] = std::string(mapping_name(c.pc_mapping));
    j["costs"] = {
        {"keccak", c.costs.keccak},
        {"explode_per_group", c.costs.explode_per_group},
        {"explode_premix", c.costs.explode_premix},
        {"shuffle_per_iteration", c.costs.shuffle_per_iteration},
        {"implode_per_group", c.costs.implode_per_group},
        {"implode_extra", c.costs.implode_extra},
        {"finalize", c.costs.finalize},
    };
    j["workload"] = {
        {"shuffle_iterations", c.workload.shuffle_iterations},
        {"groups", c.workload.groups},
    };
    j["record_timeline"] = c.record_timeline;
    return j;
}

bool same_kind(const json& tmpl, const json& v)
{
    if (tmpl.is_number_unsigned()) return v.is_number_unsigned();
    if (tmpl.is_number_float()) return v.is_number();
    if (tmpl.is_array()) return v.is_array() && v.size() == tmpl.size();
    return tmpl.type() == v.type();
}

// Overlay `patch` onto `base`, rejecting keys the template does not have.
void merge_checked(json& base, const json& patch, const std::string& path)
{
    if (!patch.is_object()) invalid("expected an object at '" + (path.empty() ? "/" : path) + "'");
    for (const auto& [key, value] : patch.items()) {
        const std::string where = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) invalid("unknown config key '" + where + "'");
        json& slot = base[key];
        if (slot.is_object()) {
            merge_checked(slot, value, where);
            continue;
        }
        if (!same_kind(slot, value)) invalid("wrong type for config key '" + where + "'");
        if (slot.is_array())
            for (const auto& e : value)
                if (!e.is_number_unsigned()) invalid("wrong type in '" + where + "'");
        slot = value;
    }
}

std::uint32_t u32(const json& v, const char* name)
{
    const auto x = v.get<std::uint64_t>();
    if (x > UINT32_MAX) invalid(std::string(name) + " out of range");
    return static_cast<std::uint32_t>(x);
}

PipelineConfig config_from(const json& patch)
{
    json j = config_json(PipelineConfig{});
    merge_checked(j, patch, "");

    PipelineConfig c;
    c.id = j["id"].get<std::string>();
    c.pipeline_depth = u32(j["pipeline_depth"], "pipeline_depth");
    c.shuffle_clock_mhz = u32(j["shuffle_clock_mhz"], "shuffle_clock_mhz");
    c.other_clock_mhz = u32(j["other_clock_mhz"], "other_clock_mhz");
    for (std::size_t i = 0; i < kSimFifos; ++i) c.fifo_depths[i] = u32(j["fifo_depths"][i], "fifo_depths");

    const json& m = j["mem_latency_ticks"];
    c.mem.read_fixed = u32(m["read_fixed"], "read_fixed");
    c.mem.write_fixed = u32(m["write_fixed"], "write_fixed");
    c.mem.jitter_max = u32(m["jitter_max"], "jitter_max");
    c.mem.seed = m["seed"].get<std::uint64_t>();
    const auto model = m["model"].get<std::string>();
    if (model == "uniform")
        c.mem.model = JitterModel::Uniform;
    else if (model == "exponential_tail")
        c.mem.model = JitterModel::ExponentialTail;
    else
        invalid("unknown jitter model '" + model + "'");
    c.mem.tail_mean = m["tail_mean"].get<double>();

    c.outstanding_limit = u32(j["outstanding_limit"], "outstanding_limit");
    c.n_kernels = u32(j["n_kernels"], "n_kernels");
    c.pcs_per_kernel = u32(j["pcs_per_kernel"], "pcs_per_kernel");
    c.pc_bytes_per_tick = u32(j["pc_bytes_per_tick"], "pc_bytes_per_tick");
    const auto mapping = j["pc_mapping"].get<std::string>();
    if (mapping == "per_hash")
        c.pc_mapping = PcMapping::PerHash;
    else if (mapping == "address_interleaved")
        c.pc_mapping = PcMapping::AddressInterleaved;
    else
        invalid("unknown pc_mapping '" + mapping + "'");

    const json& k = j["costs"];
    c.costs.keccak = u32(k["keccak"], "keccak");
    c.costs.explode_per_group = u32(k["explode_per_group"], "explode_per_group");
    c.costs.explode_premix = u32(k["explode_premix"], "explode_premix");
    c.costs.shuffle_per_iteration = u32(k["shuffle_per_iteration"], "shuffle_per_iteration");
    c.costs.implode_per_group = u32(k["implode_per_group"], "implode_per_group");
    c.costs.implode_extra = u32(k["implode_extra"], "implode_extra");
    c.costs.finalize = u32(k["finalize"], "finalize");
    c.workload.shuffle_iterations = u32(j["workload"]["shuffle_iterations"], "shuffle_iterations");
    c.workload.groups = u32(j["workload"]["groups"], "groups");
    c.record_timeline = j["record_timeline"].get<bool>();
    validate(c);
    return c;
}

json parse_or_throw(const std::string& text, ErrorCode code)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(code, std::string("invalid JSON: ") + e.what());
    }
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string value_label(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

json report_json(const SimReport& r)
{
    json j;
    j["config_id"] = r.config_id;
    j["hashes_injected"] = r.hashes_injected;
    j["hashes_completed"] = r.hashes_completed;
    j["sim_ticks"] = {{"shuffle", r.shuffle_ticks}, {"other", r.other_ticks}, {"base_units", r.base_units}};
    j["elapsed_s"] = r.elapsed_s;
    j["hash_rate_hs"] = r.hash_rate_hs;
    json util = json::object();
    for (std::size_t i = 0; i < kSimStages; ++i)
        util[std::string(to_string(static_cast<SimStage>(i)))] = r.stage_utilization[i];
    j["stage_utilization"] = util;
    json fifos = json::array();
    for (std::size_t i = 0; i < kSimFifos; ++i) {
        const auto& f = r.fifo_occupancy[i];
        fifos.push_back(
            {{"fifo", kFifoNames[i]}, {"capacity", f.capacity}, {"min", f.min}, {"mean", f.mean}, {"max", f.max}});
    }
    j["fifo_occupancy"] = fifos;
    json hist = json::array();
    for (const auto& b : r.mem.latency_histogram) hist.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    j["mem_requests"] = {
        {"reads", r.mem.reads},
        {"writes", r.mem.writes},
        {"mean_read_latency", r.mem.mean_read_latency},
        {"mean_write_latency", r.mem.mean_write_latency},
        {"max_latency", r.mem.max_latency},
        {"peak_outstanding", r.mem.peak_outstanding},
        {"port_utilization", r.mem.port_utilization},
        {"latency_histogram", hist},
    };
    j["bottleneck"] = r.bottleneck;
    j["max_in_flight"] = r.max_in_flight;
    if (!r.timeline.empty()) {
        json tl = json::array();
        for (const auto& t : r.timeline)
            tl.push_back({{"hash", t.hash}, {"kernel", t.kernel}, {"slot", t.slot},
                {"keccak_start", t.keccak_start}, {"explode_start", t.explode_start},
                {"shuffle_start", t.shuffle_start}, {"shuffle_last_event", t.shuffle_last_event},
                {"implode_first_event", t.implode_first_event}, {"implode_end", t.implode_end},
                {"finalize_end", t.finalize_end}});
        j["timeline"] = tl;
    }
    return j;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

} // namespace

std::string config_to_json(const PipelineConfig& config, int indent) { return config_json(config).dump(indent); }

PipelineConfig config_from_json(const std::string& text)
{
    return config_from(parse_or_throw(text, ErrorCode::ConfigInvalid));
}

PipelineConfig load_config(const std::string& path) { return config_from_json(slurp(path)); }

std::vector<PipelineConfig> grid_from_json(const std::string& text)
{
    const json j = parse_or_throw(text, ErrorCode::ConfigInvalid);
    std::vector<PipelineConfig> grid;
    if (j.is_array()) {
        for (const auto& e : j) grid.push_back(config_from(e));
        if (grid.empty()) invalid("sweep grid is empty");
        return grid;
    }
    if (!j.is_object()) invalid("grid must be an array or an object with base/vary");
    for (const auto& [key, _] : j.items())
        if (key != "base" && key != "vary") invalid("unknown grid key '" + key + "'");
    const json base = j.value("base", json::object());
    const json vary = j.value("vary", json::object());
    if (!vary.is_object()) invalid("'vary' must be an object");

    std::vector<std::pair<json::json_pointer, const json*>> axes;
    std::vector<std::string> names;
    // Axes follow the order written in the file; json objects sort their keys.
    const auto ordered = nlohmann::ordered_json::parse(text).value("vary", nlohmann::ordered_json::object());
    for (const auto& item : ordered.items()) {
        const std::string& key = item.key();
        const json& values = vary.at(key);
        if (!values.is_array() || values.empty()) invalid("vary '" + key + "' must be a non-empty array");
        std::string ptr = "/" + key;
        for (auto& ch : ptr)
            if (ch == '.') ch = '/';
        axes.emplace_back(json::json_pointer(ptr), &values);
        names.push_back(key);
    }

    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
        json patch = base;
        std::string label;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const json& v = (*axes[a].second)[idx[a]];
            patch[axes[a].first] = v;
            label += (label.empty() ? "" : ",") + names[a] + "=" + value_label(v);
        }
        if (!vary.contains("id")) {
            const std::string prefix = base.value("id", std::string());
            patch["id"] = prefix.empty() ? label : (label.empty() ? prefix : prefix + "/" + label);
        }
        grid.push_back(config_from(patch));

        std::size_t a = axes.size();
        while (a > 0) {
            --a;
            if (++idx[a] < axes[a].second->size()) break;
            idx[a] = 0;
            if (a == 0) return grid;
        }
        if (axes.empty()) return grid;
    }
}

std::vector<PipelineConfig> load_grid(const std::string& path) { return grid_from_json(slurp(path)); }

std::string report_to_json(const SimReport& report, int indent) { return report_json(report).dump(indent); }

std::string bounds_to_json(const TheoreticalBounds& b, int indent)
{
    json lat = json::object();
    for (std::size_t i = 0; i < kSimStages; ++i)
        lat[std::string(to_string(static_cast<SimStage>(i)))] = b.stage_latency_s[i];
    json j = {
        {"single_hash_rate", b.single_hash_rate},
        {"memory_bound_rate", b.memory_bound_rate},
        {"pipeline_bound_rate", b.pipeline_bound_rate},
        {"min_rate", b.min_rate},
        {"stage_latency_s", lat},
    };
    return j.dump(indent);
}

std::string sweep_to_json(const std::vector<SweepResult>& results, int indent)
{
    json arr = json::array();
    for (const auto& r : results) {
        json e;
        e["config"] = config_json(r.config);
        if (r.report) e["report"] = report_json(*r.report);
        if (r.error_code)
            e["error"] = {{"code", std::string(to_string(*r.error_code))}, {"message", r.error_message}};
        arr.push_back(e);
    }
    return arr.dump(indent);
}

std::string sweep_to_csv(const std::vector<SweepResult>& results)
{
    std::ostringstream os;
    os.precision(10);
    os << "id,pipeline_depth,n_kernels,pcs_per_kernel,outstanding_limit,read_fixed,jitter_max,seed,"
          "hashes_completed,shuffle_ticks,hash_rate_hs,bottleneck";
    for (std::size_t i = 0; i < kSimStages; ++i) os << ",util_" << to_string(static_cast<SimStage>(i));
    os << ",peak_outstanding,error\n";
    for (const auto& r : results) {
        const auto& c = r.config;
        os << csv_field(c.id) << ',' << c.pipeline_depth << ',' << c.n_kernels << ',' << c.pcs_per_kernel << ','
           << c.outstanding_limit << ',' << c.mem.read_fixed << ',' << c.mem.jitter_max << ',' << c.mem.seed << ',';
        if (r.report) {
            const auto& s = *r.report;
            os << s.hashes_completed << ',' << s.shuffle_ticks << ',' << s.hash_rate_hs << ',' << s.bottleneck;
            for (double u : s.stage_utilization) os << ',' << u;
            os << ',' << s.mem.peak_outstanding << ',';
        } else {
            os << ",,,";
            for (std::size_t i = 0; i < kSimStages; ++i) os << ',';
            os << ',' << csv_field(std::string(to_string(*r.error_code)) + ": " + r.error_message);
        }
        os << '\n';
    }
    return os.str();
}

} // namespace cnhaven
