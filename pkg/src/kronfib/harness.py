"""Seeded randomized experiments with JSON reports.

Each experiment is a list of cells.  A cell samples `trials` representations
from seeds derived from (master seed, cell index, trial index) only, so a
report is reproducible from its master seed no matter how cells are
scheduled.  Predictions come from the sequence/decomposition code, the
observations from explicit elimination in kronrep.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kronrep as kr
from .decomp import decompose
from .linalg import FieldSpec
from .sequence import Shape, fib_value, tits_form

REPORT_VERSION = 1


def derive_seed(master: int, *key: int) -> int:
    """64-bit seed determined by the master seed and an integer key path."""
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in key)])
    lo, hi = (int(x) for x in ss.generate_state(2, dtype=np.uint32))
    return lo | (hi << 32)


@dataclass
class CellRecord:
    index: int
    label: str
    shape: list
    q: int | None
    check: str
    predicted: object
    observed: dict
    trials: int
    passes: int
    threshold: int
    passed: bool
    failing_seeds: list = field(default_factory=list)


@dataclass
class ExperimentReport:
    name: str
    params: dict
    seed: int
    cells: list
    verdict: str
    wall_time: float
    version: int = REPORT_VERSION

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def failures(self) -> list:
        return [c for c in self.cells if not c.passed]

    def to_dict(self) -> dict:
        d = asdict(self)
        # seeds are 64-bit; keep them out of JSON's double-precision range
        d["seed"] = str(self.seed)
        for c in d["cells"]:
            c["failing_seeds"] = [str(s) for s in c["failing_seeds"]]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        cells = []
        for c in d["cells"]:
            c = dict(c)
            c["failing_seeds"] = [int(s) for s in c["failing_seeds"]]
            cells.append(CellRecord(**c))
        return cls(d["name"], d["params"], int(d["seed"]), cells, d["verdict"],
                   d["wall_time"], d.get("version", REPORT_VERSION))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        return cls.from_dict(json.loads(text))

    def summary_rows(self) -> list[dict]:
        """Flat per-cell rows for CSV or text output."""
        rows = []
        for c in self.cells:
            rows.append({
                "index": c.index, "label": c.label, "s": c.shape[0], "t": c.shape[1],
                "q": "" if c.q is None else c.q, "check": c.check,
                "predicted": _fmt(c.predicted), "trials": c.trials, "passes": c.passes,
                "threshold": c.threshold, "passed": _fmt(c.passed),
            })
        return rows


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


class _Tally:
    """Counts observations of one check inside one cell."""

    def __init__(self, check: str, predicted):
        self.check = check
        self.predicted = predicted
        self.hist: dict = {}
        self.passes = 0
        self.failing: list[int] = []

    def add(self, value, seed: int) -> None:
        key = _fmt(value)
        self.hist[key] = self.hist.get(key, 0) + 1
        if value == self.predicted:
            self.passes += 1
        else:
            self.failing.append(seed)

    def record(self, index, label, shape, q, trials, threshold) -> CellRecord:
        observed = dict(sorted(self.hist.items()))
        s, t = shape
        return CellRecord(index, label, [s, t], q, self.check, self.predicted,
                          observed, trials, self.passes, threshold, self.passes >= threshold,
                          self.failing)


def _run_cells(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _finish(name, params, seed, nested, started) -> ExperimentReport:
    cells = [c for group in nested for c in group]
    verdict = "pass" if all(c.passed for c in cells) else "fail"
    return ExperimentReport(name, params, seed, cells, verdict, time.perf_counter() - started)


def _field_json(field: FieldSpec) -> dict:
    return field.to_json()


def _field_from_json(d: dict) -> FieldSpec:
    return FieldSpec.rationals() if d["kind"] == "q" else FieldSpec.fp(d["p"])


# ---------------------------------------------------------------- Kac grid

def _kac_cell(job):
    index, w, shape, trials, fdoc, seed, threshold, iso_trials = job
    field = _field_from_json(fdoc)
    q = tits_form(w, shape)
    dec = decompose(w, shape) if q >= 1 else None
    end_tally = _Tally("end_dim", 1 if dec is None else dec.end_dim())
    iso_tally = _Tally("canonical_iso", True) if dec is not None else None
    for trial in range(trials):
        tseed = derive_seed(seed, index, trial)
        X = kr.random_rep(w, shape, field, tseed)
        end_tally.add(kr.end_dim(X), tseed)
        if dec is not None:
            C = kr.canonical_rep(w, dec.k, dec.n, dec.m, field, derive_seed(tseed, 1))
            iso_tally.add(kr.is_isomorphic(X, C, iso_trials, derive_seed(tseed, 2)), tseed)
    label = f"({shape[0]},{shape[1]})" + (f" {dec.label()}" if dec else "")
    out = [end_tally.record(index, label, shape, q, trials, threshold)]
    if iso_tally is not None:
        out.append(iso_tally.record(index, label, shape, q, trials, threshold))
    return out


def kac_experiment(w: int = 3, s_max: int = 6, t_max: int = 14, trials: int = 20,
                   field: FieldSpec = FieldSpec(), seed: int = 1, *,
                   pass_fraction: float = 0.95, iso_trials: int = 3,
                   workers: int = 1) -> ExperimentReport:
    """Generic stabilizer dimension and canonical form over the grid
    0 <= s <= s_max, s < t <= t_max.

    Cells with q <= 1 expect end_dim 1; cells with q >= 1 expect
    n^2 + m^2 + nmw and an isomorphism to the canonical block sum.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    started = time.perf_counter()
    threshold = math.ceil(pass_fraction * trials)
    shapes = [(s, t) for s in range(s_max + 1) for t in range(s + 1, t_max + 1)]
    jobs = [(i, w, sh, trials, _field_json(field), seed, threshold, iso_trials)
            for i, sh in enumerate(shapes)]
    nested = _run_cells(_kac_cell, jobs, workers)
    params = {"w": w, "s_max": s_max, "t_max": t_max, "trials": trials,
              "field": _field_json(field), "pass_fraction": pass_fraction,
              "iso_trials": iso_trials}
    return _finish("kac", params, seed, nested, started)


# ---------------------------------------------------------------- Fibonacci blocks

def _hom_table_cell(job):
    index, w, k, trials, fdoc, seed, threshold = job
    field = _field_from_json(fdoc)
    cur = Shape(fib_value(w, k - 1), fib_value(w, k))
    tallies = {
        "end": _Tally("end", 1),
        "ext_self": _Tally("ext_self", 0),
        "hom_forward": _Tally("hom_forward", w),
        "hom_backward": _Tally("hom_backward", 0),
        "ext_forward": _Tally("ext_forward", 0),
        "ext_backward": _Tally("ext_backward", 0),
    }
    for trial in range(trials):
        tseed = derive_seed(seed, index, trial)
        X = kr.fibonacci_block(w, k, field, derive_seed(tseed, 0))
        Y = kr.fibonacci_block(w, k + 1, field, derive_seed(tseed, 1))
        h, e = kr.hom_ext(X, X)
        tallies["end"].add(h, tseed)
        tallies["ext_self"].add(e, tseed)
        h, e = kr.hom_ext(X, Y)
        tallies["hom_forward"].add(h, tseed)
        tallies["ext_forward"].add(e, tseed)
        h, e = kr.hom_ext(Y, X)
        tallies["hom_backward"].add(h, tseed)
        tallies["ext_backward"].add(e, tseed)
        del X, Y
    label = f"k={k}"
    return [t.record(index, label, cur, tits_form(w, cur), trials, threshold)
            for t in tallies.values()]


def hom_table_experiment(w: int = 3, k_max: int = 5, trials: int = 10,
                         field: FieldSpec = FieldSpec(), seed: int = 1, *,
                         pass_fraction: float = 0.9, workers: int = 1) -> ExperimentReport:
    """Hom/Ext table of consecutive random Fibonacci blocks B_k, B_{k+1}.

    The cell shape is that of B_k; checks are end(B_k) = 1, ext(B_k, B_k) = 0,
    hom(B_k, B_{k+1}) = w, hom(B_{k+1}, B_k) = 0 and both ext groups 0.
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    started = time.perf_counter()
    threshold = math.ceil(pass_fraction * trials)
    jobs = [(i, w, k, trials, _field_json(field), seed, threshold)
            for i, k in enumerate(range(1, k_max + 1))]
    nested = _run_cells(_hom_table_cell, jobs, workers)
    params = {"w": w, "k_max": k_max, "trials": trials, "field": _field_json(field),
              "pass_fraction": pass_fraction}
    return _finish("hom_table", params, seed, nested, started)


# ---------------------------------------------------------------- Euler form

def _random_shape(rng, cap: int) -> Shape:
    while True:
        s, t = (int(x) for x in rng.integers(0, cap + 1, size=2))
        if s or t:
            return Shape(s, t)


def _euler_cell(job):
    index, w_values, cap, fdoc, seed = job
    field = _field_from_json(fdoc)
    cseed = derive_seed(seed, index)
    rng = np.random.default_rng([cseed, 0])
    w = int(rng.choice(w_values))
    sx, sy = _random_shape(rng, cap), _random_shape(rng, cap)
    X = kr.random_rep(w, sx, field, derive_seed(cseed, 1))
    Y = kr.random_rep(w, sy, field, derive_seed(cseed, 2))
    h, e = kr.hom_ext(X, Y)
    predicted = kr.euler_form(w, sx, sy)
    tally = _Tally("hom_minus_ext", predicted)
    tally.add(h - e, cseed)
    rec = tally.record(index, f"w={w} ({sx.s},{sx.t})->({sy.s},{sy.t})", sx, None, 1, 1)
    return [rec]


def euler_experiment(w_values=(3, 4, 5), dim_cap: int = 8, pairs: int = 200,
                     field: FieldSpec = FieldSpec(), seed: int = 1, *,
                     workers: int = 1) -> ExperimentReport:
    """hom - ext against the Euler form for random pairs; no misses allowed."""
    w_values = tuple(int(w) for w in w_values)
    if not w_values:
        raise ValueError("need at least one w")
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    started = time.perf_counter()
    jobs = [(i, w_values, dim_cap, _field_json(field), seed) for i in range(pairs)]
    nested = _run_cells(_euler_cell, jobs, workers)
    params = {"w_values": list(w_values), "dim_cap": dim_cap, "pairs": pairs,
              "field": _field_json(field)}
    return _finish("euler", params, seed, nested, started)


EXPERIMENTS = {
    "kac": kac_experiment,
    "hom_table": hom_table_experiment,
    "euler": euler_experiment,
}
