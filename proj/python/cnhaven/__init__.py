"""CN-Haven hash, miner, FPGA pipeline simulator and trace analysis."""

import json as _json

from ._cnhaven import (
    DEFAULT_NONCE_OFFSET,
    SCRATCHPAD_BYTES,
    Error,
    aes_backend,
    hash,
    hash_checkpoints,
    hash_job,
    trace_hash,
)
from . import _cnhaven

__all__ = [
    "DEFAULT_NONCE_OFFSET",
    "SCRATCHPAD_BYTES",
    "Error",
    "aes_backend",
    "bounds",
    "default_config",
    "hash",
    "hash_checkpoints",
    "hash_job",
    "mine",
    "partition_check",
    "simulate",
    "sweep",
    "trace_hash",
    "trace_stats",
]


def _dump(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def default_config():
    return _json.loads(_cnhaven.default_config_json())


def mine(job, threads=1, strict_target=False):
    """Searches the job's nonce range. job is a dict or JSON text."""
    return _json.loads(_cnhaven.mine_json(_dump(job), threads, strict_target))


def simulate(config=None, n_hashes=16):
    """Runs the pipeline model. Missing config keys take their defaults."""
    return _json.loads(_cnhaven.simulate_json(_dump(config or {}), n_hashes))


def bounds(config=None):
    return _json.loads(_cnhaven.bounds_json(_dump(config or {})))


def sweep(grid, n_hashes=16, threads=1):
    """grid: a list of configs or {"base": ..., "vary": {...}}."""
    return _json.loads(_cnhaven.sweep_json(_dump(grid), n_hashes, threads))


def trace_stats(path):
    return _json.loads(_cnhaven.trace_stats_json(str(path)))


def partition_check(paths, depth=128):
    return _json.loads(_cnhaven.partition_check_json([str(p) for p in paths], depth))
