"""Monte Carlo power and size experiments.

One replicate experiment simulates ``N1 + N2`` series on independent streams
(``stream_id = rep * (N1 + N2) + i``), runs a test and records how many cells
were rejected. A replicate counts towards power or size when at least one
cell is rejected, and towards the "modified" estimate when at least two are.
"""

import csv
import io
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InputError, InsufficientReplicatesError, LSWTestError
from .hypothesis_tests import CORRECTIONS, TEST_KINDS, TestConfig, apply_correction
from .models import ModelId, simulate_model
from .pipeline import normalise_test, run_test_on_periodograms
from .spectral import raw_periodogram

DESK_REPS = 200
FULL_REPS = 1000
CSV_COLUMNS = ("model", "test", "correction", "n", "reps", "percent", "modified_percent", "seed")


@dataclass(frozen=True)
class ExperimentSpec:
    model: str
    test: str
    n_per_group: int = 25
    reps: int = DESK_REPS
    seed: int = 0
    config: TestConfig = field(default_factory=TestConfig)
    n2: int | None = None

    def __post_init__(self):
        ModelId(self.model)
        object.__setattr__(self, "test", normalise_test(self.test))
        if self.reps < 1:
            raise InputError(f"reps must be >= 1, got {self.reps}")
        n1, n2 = self.group_sizes
        if min(n1, n2) < 1:
            raise InsufficientReplicatesError("each group needs at least one series")
        single_hft = self.test == "HFT" and n1 == n2 == 1
        if min(n1, n2) < 2 and self.test != "FT" and not single_hft:
            raise InsufficientReplicatesError(f"{self.test} needs at least two series per group")

    @property
    def group_sizes(self):
        return self.n_per_group, self.n_per_group if self.n2 is None else self.n2

    @property
    def correction(self):
        return self.config.correction


@dataclass(frozen=True)
class ExperimentReport:
    spec: ExperimentSpec
    rejection_counts: tuple
    wall_time: float

    @property
    def reps(self):
        return len(self.rejection_counts)

    @property
    def seed(self):
        return self.spec.seed

    @property
    def percent(self):
        return 100.0 * sum(c >= 1 for c in self.rejection_counts) / self.reps

    @property
    def modified_percent(self):
        return 100.0 * sum(c >= 2 for c in self.rejection_counts) / self.reps

    @property
    def histogram(self):
        return dict(sorted(Counter(self.rejection_counts).items()))

    def csv_row(self):
        s = self.spec
        return {
            "model": s.model,
            "test": s.test,
            "correction": s.correction,
            "n": s.n_per_group,
            "reps": self.reps,
            "percent": f"{self.percent:.1f}",
            "modified_percent": f"{self.modified_percent:.1f}",
            "seed": s.seed,
        }


def _rep_counts(model, rep, seed, n1, n2, jobs):
    """Rejection counts of one replicate for every ``(test, config)`` job.

    Jobs that share a test and differ only in correction reuse one set of
    p-values.
    """
    try:
        X1, X2 = simulate_model(model, n1, seed, rep, n2=n2)
        I1, I2 = raw_periodogram(X1), raw_periodogram(X2)
        cache, out = {}, []
        for test, cfg in jobs:
            key = (test, replace(cfg, correction="bonferroni"))
            if key not in cache:
                cache[key] = run_test_on_periodograms(I1, I2, test, cfg)
            res = cache[key]
            out.append(int(apply_correction(res.p_value, res.degenerate, cfg).sum()))
        return out
    except LSWTestError as exc:
        raise type(exc)(f"rep {rep}: {exc}") from exc


def _run_group(model, seed, n1, n2, reps, jobs, workers):
    def one(rep):
        return _rep_counts(model, rep, seed, n1, n2, jobs)

    if workers <= 1:
        rows = [one(r) for r in range(reps)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(reps)))
    return np.array(rows, dtype=int).reshape(reps, len(jobs))


def run_specs(specs, workers=1):
    """Run many specs, sharing simulations between specs with the same model, seed, sizes and reps."""
    specs = list(specs)
    reports = [None] * len(specs)
    groups = {}
    for i, s in enumerate(specs):
        groups.setdefault((s.model, s.seed, s.group_sizes, s.reps), []).append(i)
    for (model, seed, (n1, n2), reps), idx in groups.items():
        jobs = [(specs[i].test, specs[i].config) for i in idx]
        t0 = time.perf_counter()
        counts = _run_group(model, seed, n1, n2, reps, jobs, workers)
        elapsed = (time.perf_counter() - t0) / len(idx)
        for col, i in enumerate(idx):
            reports[i] = ExperimentReport(specs[i], tuple(counts[:, col].tolist()), elapsed)
    return reports


def run_experiment(spec, workers=1):
    return run_specs([spec], workers)[0]


def table_specs(models, n_per_group=25, reps=DESK_REPS, seed=0, base=TestConfig(), tests=TEST_KINDS, corrections=CORRECTIONS):
    """Specs for a models x tests x corrections grid."""
    return [
        ExperimentSpec(m, t, n_per_group, reps, seed, replace(base, correction=c))
        for m in models
        for t in tests
        for c in corrections
    ]


_SHORT = {"bonferroni": "Bon.", "bh_fdr": "FDR"}


@dataclass(frozen=True)
class Table:
    reports: tuple
    text: str
    csv: str


def format_table(reports):
    """Aligned text (rows = models, columns = test x correction) and CSV."""
    reports = list(reports)
    alphas = {r.spec.config.alpha for r in reports}
    if len(alphas) > 1:
        raise InputError(f"a table needs one alpha, got {sorted(alphas)}")
    columns, models, cells = [], [], {}
    for r in reports:
        col = (r.spec.test, r.spec.correction)
        if col not in columns:
            columns.append(col)
        if r.spec.model not in models:
            models.append(r.spec.model)
        cells[(r.spec.model, col)] = r.percent
    heads = [f"{t} ({_SHORT[c]})" for t, c in columns]
    widths = [max(len(h), 5) for h in heads]
    lines = ["Model  " + "  ".join(h.rjust(w) for h, w in zip(heads, widths))]
    for m in models:
        vals = [f"{cells[(m, c)]:.1f}" if (m, c) in cells else "-" for c in columns]
        lines.append(f"{m:<5}  " + "  ".join(v.rjust(w) for v, w in zip(vals, widths)))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())
    return Table(tuple(reports), "\n".join(lines) + "\n", buf.getvalue())


def run_table(specs, workers=1):
    return format_table(run_specs(specs, workers))
