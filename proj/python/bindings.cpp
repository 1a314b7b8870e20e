#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cnhaven/aes.hpp"
#include "cnhaven/analysis.hpp"
#include "cnhaven/error.hpp"
#include "cnhaven/haven.hpp"
#include "cnhaven/miner.hpp"
#include "cnhaven/pipeline_sim.hpp"
#include "cnhaven/sim_report.hpp"
#include "cnhaven/trace_io.hpp"

namespace py = pybind11;
using namespace cnhaven;

namespace {

Bytes to_bytes(const py::bytes& b)
{
    const std::string s = b;
    return Bytes(s.begin(), s.end());
}

py::bytes from_digest(const Digest& d) { return py::bytes(reinterpret_cast<const char*>(d.data()), d.size()); }

py::bytes from_state(const KeccakState& s)
{
    const auto b = s.to_bytes();
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

} // namespace

PYBIND11_MODULE(_cnhaven, m)
{
    m.doc() = "CN-Haven hash, miner, pipeline simulator and trace analysis";

    static const py::handle error_type = py::exception<Error>(m, "Error", PyExc_ValueError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error_type.ptr(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
        }
    });

    m.attr("DEFAULT_NONCE_OFFSET") = kHaven.default_nonce_offset;
    m.attr("SCRATCHPAD_BYTES") = kScratchpadBytes;

    m.def("hash", [](const py::bytes& blob) {
        const Bytes in = to_bytes(blob);
        Digest d;
        {
            py::gil_scoped_release nogil;
            d = cn_haven_hash_blob(in);
        }
        return from_digest(d);
    }, py::arg("blob"), "Digest of an already-patched input.");

    m.def("hash_job", [](const py::bytes& blob, std::uint32_t nonce, std::size_t nonce_offset) {
        HashJob job{to_bytes(blob), nonce_offset, nonce};
        Digest d;
        {
            py::gil_scoped_release nogil;
            d = cn_haven_hash(job);
        }
        return from_digest(d);
    }, py::arg("blob"), py::arg("nonce"), py::arg("nonce_offset") = kHaven.default_nonce_offset);

    m.def("hash_checkpoints", [](const py::bytes& blob) {
        const Bytes in = to_bytes(blob);
        Scratchpad pad;
        HashCheckpoints cp;
        {
            py::gil_scoped_release nogil;
            cp = cn_haven_hash_checkpoints(in, pad);
        }
        py::dict d;
        d["absorbed"] = from_state(cp.absorbed);
        d["explode_head"] = py::bytes(reinterpret_cast<const char*>(cp.explode_head.data()), cp.explode_head.size());
        d["shuffle_head"] = py::bytes(reinterpret_cast<const char*>(cp.shuffle_head.data()), cp.shuffle_head.size());
        d["imploded"] = from_state(cp.imploded);
        d["final_state"] = from_state(cp.final_state);
        d["family"] = std::string(to_string(cp.family));
        d["digest"] = from_digest(cp.digest);
        return d;
    }, py::arg("blob"));

    m.def("trace_hash", [](const py::bytes& blob, const std::string& path, std::uint16_t hash_id) {
        const Bytes in = to_bytes(blob);
        py::gil_scoped_release nogil;
        Scratchpad pad(hash_id);
        pad.trace_capture(true);
        const Digest d = cn_haven_hash_blob(in, &pad);
        pad.trace_capture(false);
        write_trace(path, pad.trace());
        py::gil_scoped_acquire gil;
        return from_digest(d);
    }, py::arg("blob"), py::arg("path"), py::arg("hash_id") = 0, "Hashes and writes the access trace to path.");

    m.def("aes_backend", [] { return active_aes_backend() == AesBackend::Hardware ? "hardware" : "table"; });

    m.def("mine_json", [](const std::string& job_json, unsigned threads, bool strict) {
        const MiningJob job = job_from_json(job_json);
        MineOptions opt;
        opt.threads = threads;
        opt.strict_target = strict;
        py::gil_scoped_release nogil;
        return share_to_json(mine(job, opt));
    }, py::arg("job_json"), py::arg("threads") = 1, py::arg("strict_target") = false);

    m.def("simulate_json", [](const std::string& config_json, std::uint64_t n_hashes) {
        const PipelineConfig c = config_from_json(config_json);
        py::gil_scoped_release nogil;
        return report_to_json(simulate(c, n_hashes));
    }, py::arg("config_json"), py::arg("n_hashes"));

    m.def("bounds_json", [](const std::string& config_json) {
        return bounds_to_json(theoretical_bounds(config_from_json(config_json)));
    }, py::arg("config_json"));

    m.def("default_config_json", [] { return config_to_json(PipelineConfig{}); });

    m.def("sweep_json", [](const std::string& grid_json, std::uint64_t n_hashes, unsigned threads) {
        const auto grid = grid_from_json(grid_json);
        py::gil_scoped_release nogil;
        return sweep_to_json(sweep(grid, n_hashes, threads));
    }, py::arg("grid_json"), py::arg("n_hashes"), py::arg("threads") = 1);

    m.def("trace_stats_json", [](const std::string& path) {
        py::gil_scoped_release nogil;
        return stats_to_json(trace_stats(read_trace(path)));
    }, py::arg("path"));

    m.def("partition_check_json", [](const std::vector<std::string>& paths, std::uint32_t depth) {
        py::gil_scoped_release nogil;
        std::vector<AccessTrace> traces;
        for (const auto& p : paths) traces.push_back(read_trace(p));
        PipelineConfig c;
        c.pipeline_depth = depth;
        return partition_to_json(partition_check(traces, c));
    }, py::arg("paths"), py::arg("depth") = kMaxPipelineDepth);
}
