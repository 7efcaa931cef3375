"""Monte Carlo sweeps over protocols and instance sizes.

Each (cell, protocol) pair yields one :class:`BenchRecord` with measured
bit counts next to the reference formulas: the sum lower bound
``2**n + n - 1``, the trivial upper bound ``2**n + 2n - 2`` and, for
``lv-sum``, the model's expected bits.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .analysis import AnalysisParams, expected_bits_unbounded
from .model import ProtocolError, random_instance
from .protocols import REGISTRY, run_protocol
from .rectangles import closed_form_bound

log = logging.getLogger(__name__)

COLUMNS = ["protocol", "n", "m_a", "m_b", "m_0", "k", "trials", "ok_runs", "failures",
           "bits_mean", "bits_min", "bits_max", "messages_mean", "loop_rounds_mean",
           "lower_bound_sum", "trivial_upper_sum", "lv_model_bits", "lv_rel_err",
           "wall_ms_per_trial", "note"]


@dataclass
class BenchConfig:
    protocols: list[str]
    n: list[int]
    m_a: list[int]
    m_b: list[int]
    m_0: list[int]
    k: list[int] = field(default_factory=lambda: [1])
    trials: int = 100
    seed: int = 0
    count_control_bits: bool = False
    dedup_k_encoding: bool = False
    round_cap: int = 10_000
    workers: int = 1
    timing: bool = True

    def cells(self):
        for n, ma, mb, m0, k in itertools.product(self.n, self.m_a, self.m_b,
                                                  self.m_0, self.k):
            yield {"n": n, "m_a": ma, "m_b": mb, "m_0": m0, "k": k}


@dataclass
class BenchRecord:
    protocol: str
    n: int
    m_a: int
    m_b: int
    m_0: int
    k: int | None
    trials: int
    ok_runs: int = 0
    failures: int = 0
    bits_mean: float | None = None
    bits_min: int | None = None
    bits_max: int | None = None
    messages_mean: float | None = None
    loop_rounds_mean: float | None = None
    lower_bound_sum: int | None = None
    trivial_upper_sum: int | None = None
    lv_model_bits: float | None = None
    lv_rel_err: float | None = None
    wall_ms_per_trial: float | None = None
    note: str = ""

    def key(self):
        return (self.n, self.m_a, self.m_b, self.m_0, self.k or 0, self.protocol)


def _feasible(cell) -> str:
    n, ma, mb, m0 = cell["n"], cell["m_a"], cell["m_b"], cell["m_0"]
    if m0 > min(ma, mb):
        return "m_0 exceeds a set size"
    if ma + mb - m0 > 1 << n:
        return "union does not fit in 2**n"
    return ""


def run_cell(config: BenchConfig, cell_index: int, cell: dict, protocol: str) -> BenchRecord:
    uses_k = protocol == "lv-sum"
    k = cell["k"] if uses_k else None
    rec = BenchRecord(protocol, cell["n"], cell["m_a"], cell["m_b"], cell["m_0"], k,
                      config.trials)
    n = cell["n"]
    rec.lower_bound_sum = closed_form_bound(n, "sum")
    rec.trivial_upper_sum = (1 << n) + 2 * n - 2
    problem = _feasible(cell)
    if not problem and uses_k and not 1 <= cell["k"] <= n:
        problem = "k out of range"
    if problem:
        rec.note = f"skipped: {problem}"
        log.warning("%s %s %s", protocol, cell, rec.note)
        return rec
    if protocol == "lv-sum":
        model = expected_bits_unbounded(AnalysisParams(n, cell["k"], cell["m_b"],
                                                       cell["m_a"] - cell["m_0"]))
        rec.lv_model_bits = float(model)

    params = {}
    if protocol == "lv-sum":
        params = {"k": cell["k"], "dedup": config.dedup_k_encoding}
    bits, msgs, loops = [], [], []
    start = time.perf_counter()
    for t in range(config.trials):
        trial_seed = hash_seed(config.seed, cell_index, t)
        inst = random_instance(n, cell["m_a"], cell["m_b"], cell["m_0"], trial_seed)
        try:
            out = run_protocol(protocol, inst, trial_seed, round_cap=config.round_cap,
                               count_control_bits=config.count_control_bits, **params)
        except ProtocolError as exc:
            rec.note = f"skipped: {exc}"
            rec.failures = config.trials - len(bits)
            break
        if not out.ok or not out.oracle_match:
            rec.failures += 1
            continue
        bits.append(out.bits)
        msgs.append(out.transcript.rounds)
        if "loop_rounds" in out.info:
            loops.append(out.info["loop_rounds"])
    elapsed = time.perf_counter() - start
    rec.ok_runs = len(bits)
    if config.timing:
        rec.wall_ms_per_trial = round(1000 * elapsed / max(1, config.trials), 4)
    if bits:
        rec.bits_mean = math.fsum(bits) / len(bits)
        rec.bits_min = min(bits)
        rec.bits_max = max(bits)
        rec.messages_mean = math.fsum(msgs) / len(msgs)
    if loops:
        rec.loop_rounds_mean = math.fsum(loops) / len(loops)
    if rec.lv_model_bits and rec.bits_mean is not None:
        rec.lv_rel_err = (rec.bits_mean - rec.lv_model_bits) / rec.lv_model_bits
    return rec


def hash_seed(seed: int, cell_index: int, trial: int) -> int:
    return (seed * 1_000_003 + cell_index) * 1_000_033 + trial


def _job(args):
    return run_cell(*args)


def run_bench(config: BenchConfig) -> list[BenchRecord]:
    unknown = [p for p in config.protocols if p not in REGISTRY]
    if unknown:
        raise ValueError(f"unknown protocol ids: {unknown}")
    jobs = []
    seen = set()
    for idx, cell in enumerate(config.cells()):
        for proto in config.protocols:
            # k only matters for lv-sum; do not repeat other protocols per k
            key = (proto, *(v for name, v in cell.items() if proto == "lv-sum" or name != "k"))
            if key in seen:
                continue
            seen.add(key)
            jobs.append((config, idx, cell, proto))
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            records = list(pool.map(_job, jobs))
    else:
        records = [_job(j) for j in jobs]
    return sorted(records, key=BenchRecord.key)


def to_csv(records: list[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow({k: ("" if v is None else v) for k, v in asdict(r).items()})
    return buf.getvalue()


def to_json(records: list[BenchRecord]) -> str:
    return json.dumps([asdict(r) for r in records], indent=2) + "\n"
