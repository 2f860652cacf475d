"""Resource estimates: measured counts, the published reference formulas,
extrapolation to a full Shor run, and least-squares scaling fits.
"""
from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .gatecore import Circuit, ResourceReport, measure, reverse
from .modarith import (
    ModulusContext,
    MulStrategy,
    build_add_const_modp,
    build_add_modp,
    build_inv_modp,
    build_mul_modp,
    build_neg_modp,
    build_squ_modp,
)


def _lg(n: float) -> float:
    return math.log2(n)


def _clog(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


@dataclass(frozen=True)
class ReferenceFormula:
    tag: str
    qubits: Callable[[int], int]
    toffoli: Callable[[int], float]
    text: str


REFERENCE: dict[str, ReferenceFormula] = {f.tag: f for f in [
    ReferenceFormula("add_const_modp", lambda n: 2 * n,
                     lambda n: 16 * n * _lg(n) - 26.9 * n, "16n log2 n - 26.9n"),
    ReferenceFormula("ctrl_add_const_modp", lambda n: 2 * n + 1,
                     lambda n: 16 * n * _lg(n) - 26.9 * n, "16n log2 n - 26.9n"),
    ReferenceFormula("ctrl_sub_modp", lambda n: 2 * n + 4,
                     lambda n: 16 * n * _lg(n) - 23.8 * n, "16n log2 n - 23.8n"),
    ReferenceFormula("ctrl_neg_modp", lambda n: n + 3,
                     lambda n: 8 * n * _lg(n) - 14.5 * n, "8n log2 n - 14.5n"),
    ReferenceFormula("mul_modp_dbl_add", lambda n: 3 * n + 2,
                     lambda n: 32 * n * n * _lg(n) - 59.4 * n * n, "32n^2 log2 n - 59.4n^2"),
    ReferenceFormula("mul_modp_montgomery", lambda n: 5 * n + 4,
                     lambda n: 16 * n * n * _lg(n) - 26.3 * n * n, "16n^2 log2 n - 26.3n^2"),
    ReferenceFormula("squ_modp_dbl_add", lambda n: 2 * n + 3,
                     lambda n: 32 * n * n * _lg(n) - 59.4 * n * n, "32n^2 log2 n - 59.4n^2"),
    ReferenceFormula("squ_modp_montgomery", lambda n: 4 * n + 5,
                     lambda n: 16 * n * n * _lg(n) - 26.3 * n * n, "16n^2 log2 n - 26.3n^2"),
    ReferenceFormula("inv_modp", lambda n: 7 * n + 2 * _clog(n) + 9,
                     lambda n: 32 * n * n * _lg(n), "32n^2 log2 n"),
    ReferenceFormula("point_add", lambda n: 9 * n + 2 * _clog(n) + 10,
                     lambda n: 224 * n * n * _lg(n) + 2045 * n * n, "224n^2 log2 n + 2045n^2"),
]}

# published simulation results per bit size: qubits, Toffoli, depth (whole Shor run)
TABLE2: dict[int, tuple[int, float, float]] = {
    110: (1014, 9.44e9, 8.66e9),
    160: (1466, 2.97e10, 2.73e10),
    192: (1754, 5.30e10, 4.86e10),
    224: (2042, 8.43e10, 7.73e10),
    256: (2330, 1.26e11, 1.16e11),
    384: (3484, 4.52e11, 4.15e11),
    521: (4719, 1.14e12, 1.05e12),
}


def paper_shor_toffoli(n: int) -> float:
    """(448 log2 n + 4090) n^3: the fitted per-addition formula times 2n."""
    return (448 * _lg(n) + 4090) * n ** 3


# choosing primes

def prime_for(n: int) -> tuple[int, str]:
    """NIST prime when one has exactly n bits, else the synthetic prime. Returns (p, label)."""
    from .ecc import CURVES, synthetic_prime

    for name, c in CURVES.items():
        if name.startswith("P-") and c.p.bit_length() == n:
            return c.p, name
    return synthetic_prime(n), f"synthetic-{n}"


def curve_for(n: int):
    from .ecc import CURVES, synthetic_curve

    for name, c in CURVES.items():
        if name.startswith("P-") and c.p.bit_length() == n:
            return c
    return synthetic_curve(n)


def _const_for(p: int) -> int:
    return random.Random(p).randrange(1, p)


def build_for_tag(tag: str, p: int) -> Circuit:
    ctx = ModulusContext.of(p, check_prime=False)
    if tag == "add_const_modp":
        return build_add_const_modp(ctx, _const_for(p))[0]
    if tag == "ctrl_add_const_modp":
        return build_add_const_modp(ctx, _const_for(p), controlled=True)[0]
    if tag == "ctrl_sub_modp":
        return reverse(build_add_modp(ctx, controlled=True)[0])
    if tag == "ctrl_neg_modp":
        return build_neg_modp(ctx, controlled=True)[0]
    if tag.startswith(("mul_modp_", "squ_modp_")):
        strategy = MulStrategy.MONTGOMERY if tag.endswith("montgomery") else MulStrategy.DOUBLE_AND_ADD
        fn = build_mul_modp if tag.startswith("mul") else build_squ_modp
        return fn(ctx, strategy)[0]
    if tag == "inv_modp":
        return build_inv_modp(ctx)[0]
    if tag == "point_add":
        from .ecc import build_ctrl_point_add

        curve = curve_for(p.bit_length())
        return build_ctrl_point_add(curve, curve.G)[0]
    raise KeyError(f"unknown tag {tag!r}; known: {', '.join(REFERENCE)}")


@dataclass(frozen=True)
class ReferenceCheck:
    tag: str
    n: int
    expected_qubits: int
    measured_qubits: int
    expected_toffoli: float
    measured_toffoli: int

    @property
    def ratio(self) -> float:
        return self.measured_toffoli / self.expected_toffoli


def reference_check(tag: str, n: int, p: int | None = None) -> ReferenceCheck:
    """Build the circuit for ``tag`` at n bits and compare with its reference formula."""
    if tag not in REFERENCE:
        raise KeyError(f"unknown tag {tag!r}; known: {', '.join(REFERENCE)}")
    ref = REFERENCE[tag]
    if p is None:
        p = prime_for(n)[0]
    circ = build_for_tag(tag, p)
    return ReferenceCheck(tag, n, ref.qubits(n), circ.num_qubits, ref.toffoli(n), circ.toffoli_count)


# point addition and Shor totals

@dataclass(frozen=True)
class PointAddRow:
    n: int
    curve: str
    p: int
    report: ResourceReport

    def as_dict(self) -> dict:
        d = {"n": self.n, "curve": self.curve, "p": hex(self.p)}
        d.update(self.report.as_dict())
        return d


def point_add_resources(ns: Iterable[int] = (), curves: Iterable[str] = (), depth: bool = True) -> list[PointAddRow]:
    """Counts of the controlled point addition; NIST curves where the size matches, synthetic otherwise."""
    from .ecc import build_ctrl_point_add, get_curve

    chosen = [get_curve(c) for c in curves] + [curve_for(int(n)) for n in ns]
    rows = []
    for curve in chosen:
        circ, _ = build_ctrl_point_add(curve, curve.G)
        rows.append(PointAddRow(curve.p.bit_length(), curve.name, curve.p, measure(circ, depth=depth)))
    return rows


@dataclass(frozen=True)
class ShorTotals:
    n: int
    qubits: int
    toffoli: int
    depth: int

    def as_dict(self) -> dict:
        return asdict(self)


def shor_totals(report: ResourceReport, n: int) -> ShorTotals:
    """2n sequential controlled additions; qubits are reused so they do not grow."""
    d = report.toffoli_depth
    return ShorTotals(n, report.qubit_highwater, 2 * n * report.toffoli_count, 2 * n * d if d >= 0 else -1)


# regression

@dataclass(frozen=True)
class ScalingFit:
    alpha: float
    beta: float
    residual: float
    form: str

    def __call__(self, n: float) -> float:
        lead, low = _FORMS[self.form]
        return self.alpha * lead(n) + self.beta * low(n)


_FORMS = {
    "n2logn": (lambda n: n * n * np.log2(n), lambda n: n * n),
    "nlogn": (lambda n: n * np.log2(n), lambda n: n),
}


def fit_scaling(data: Sequence[tuple[float, float]], form: str = "n2logn") -> ScalingFit:
    """Least squares fit of alpha*n^2 log2 n + beta*n^2 (or alpha*n log2 n + beta*n)."""
    if form not in _FORMS:
        raise ValueError(f"unknown form {form!r}")
    arr = np.asarray(data, dtype=float).reshape(-1, 2)
    n, y = arr[:, 0], arr[:, 1]
    if len(np.unique(n)) < 2:
        raise ValueError("need at least two distinct n values")
    lead, low = _FORMS[form]
    A = np.column_stack([lead(n), low(n)])
    if np.linalg.matrix_rank(A) < 2:
        raise ValueError("degenerate design matrix")
    coef, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.linalg.norm(A @ coef - y))
    return ScalingFit(float(coef[0]), float(coef[1]), res, form)


# output

CSV_COLUMNS = ["n", "qubits", "toffoli", "depth", "cnot", "not", "curve", "shor_toffoli", "shor_depth"]


def rows_table(rows: Sequence[PointAddRow]) -> list[dict]:
    out = []
    for r in rows:
        tot = shor_totals(r.report, r.n)
        out.append({
            "n": r.n, "qubits": r.report.qubit_highwater, "toffoli": r.report.toffoli_count,
            "depth": r.report.toffoli_depth, "cnot": r.report.cnot_count, "not": r.report.not_count,
            "curve": r.curve, "shor_toffoli": tot.toffoli, "shor_depth": tot.depth,
        })
    return out


def to_csv(rows: Sequence[PointAddRow]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows_table(rows))
    return buf.getvalue()


def to_json(rows: Sequence[PointAddRow]) -> str:
    table = rows_table(rows)
    for t, r in zip(table, rows):
        t["p"] = hex(r.p)
    return json.dumps({"rows": table}, indent=2, sort_keys=True)
