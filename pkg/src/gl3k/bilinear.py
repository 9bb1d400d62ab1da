"""Bilinear forms in GL(3) long-element Kloosterman sums.

With m1 = n2 = 1 the long-element sum depends on (m, n) = (m2, n1) only
through e(n u / D1 + m v / D2), where u and v are per-term residues. So

    S(1, m, n, 1; D1, D2) = sum_{u, v} W[u, v] e(n u / D1 + m v / D2)

for a fixed phase table W, and the inner bilinear sum becomes A^T W B with
A(u) = sum_n a_n e(n u / D1) and B(v) = sum_m b_m e(m v / D2).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .gl3 import long_terms, s_long_many

__all__ = [
    "GENERATORS",
    "SeqPair",
    "make_seqs",
    "ScanRecord",
    "phase_table",
    "s_from_table",
    "bilinear_form",
    "bilinear_form_naive",
    "envelope",
    "envelope_simple",
    "hybrid_form",
    "GallagherReport",
    "gallagher_check",
    "scan",
    "records_to_jsonl",
    "records_to_csv",
]

GENERATORS = ("unit", "random_pm1", "random_complex", "resonant")
_TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class SeqPair:
    """Sequences a_n, b_n for n = 1..N, stored at index n - 1."""

    a: np.ndarray
    b: np.ndarray
    generator_id: str = "custom"
    seed: int | None = None

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        if a.ndim != 1 or a.shape != b.shape or a.size == 0:
            raise ValueError("a and b must be nonempty 1-d sequences of equal length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("sequences must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def N(self) -> int:
        return int(self.a.size)

    @property
    def norm_a(self) -> float:
        return float(np.linalg.norm(self.a))

    @property
    def norm_b(self) -> float:
        return float(np.linalg.norm(self.b))

    def twisted(self, s1: complex, s2: complex) -> "SeqPair":
        """(a_n n^{-s1}, b_m m^{-s2})."""
        n = np.arange(1, self.N + 1, dtype=float)
        return SeqPair(self.a * n ** (-s1), self.b * n ** (-s2), self.generator_id, self.seed)

    def scaled(self, c: complex) -> "SeqPair":
        return SeqPair(c * self.a, self.b, self.generator_id, self.seed)


def make_seqs(generator: str, N: int, seed: int = 0, theta: float = 0.0) -> SeqPair:
    """Draw a SeqPair of length N; ``theta`` is the frequency of the resonant generator."""
    if N < 1:
        raise ValueError("N must be positive")
    n = np.arange(1, N + 1)
    rng = np.random.default_rng(seed)
    if generator == "unit":
        a = b = np.ones(N)
    elif generator == "random_pm1":
        a = rng.choice([-1.0, 1.0], size=N)
        b = rng.choice([-1.0, 1.0], size=N)
    elif generator == "random_complex":
        a = np.exp(_TWO_PI_I * rng.random(N))
        b = np.exp(_TWO_PI_I * rng.random(N))
    elif generator == "resonant":
        a = b = np.exp(_TWO_PI_I * theta * n)
    else:
        raise ValueError(f"unknown generator {generator!r}; expected one of {GENERATORS}")
    return SeqPair(a, b, generator, seed)


@dataclass(frozen=True)
class ScanRecord:
    X1: int
    X2: int
    N: int
    S_value: float
    envelope: float
    ratio: float
    seed: int | None = None
    generator: str = ""
    T1: float | None = None
    T2: float | None = None
    S1w: float | None = None
    S2w: float | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def csv_row(self) -> list:
        return [self.X1, self.X2, self.N, repr(self.S_value), repr(self.envelope), repr(self.ratio), self.seed]


# -- phase tables -----------------------------------------------------------------

@lru_cache(maxsize=2048)
def phase_table(D1: int, D2: int) -> np.ndarray:
    """W with S(1, m, n, 1; D1, D2) = sum_{u, v} W[u, v] e(n u / D1 + m v / D2)."""
    t = long_terms(D1, D2)
    u = (t.Y1 * D2 - t.Z1 * t.B2) % D1
    v = t.B2 % D2
    c = (t.Y2 * D1 - t.Z2 * t.B1) % D2
    # the remaining phase e(B1 / D1 + c / D2) does not depend on (m, n)
    L = t.order
    ex = (t.B1 * (L // D1) + c * (L // D2)) % L
    W = np.zeros((D1, D2), dtype=complex)
    np.add.at(W, (u, v), np.exp(_TWO_PI_I * (ex / L)))
    W.flags.writeable = False
    return W


def _char_matrix(N: int, D: int) -> np.ndarray:
    """E[u, n-1] = e(n u / D)."""
    u = np.arange(D)[:, None]
    n = np.arange(1, N + 1)[None, :]
    return np.exp(_TWO_PI_I * ((u * n) % D) / D)


def s_from_table(m: int, n: int, D1: int, D2: int) -> complex:
    W = phase_table(D1, D2)
    eu = np.exp(_TWO_PI_I * (n * np.arange(D1) % D1) / D1)
    ev = np.exp(_TWO_PI_I * (m * np.arange(D2) % D2) / D2)
    return complex(eu @ W @ ev)


def _pair_value(seqs: SeqPair, D1: int, D2: int) -> float:
    A = _char_matrix(seqs.N, D1) @ seqs.a
    B = _char_matrix(seqs.N, D2) @ seqs.b
    return abs(complex(A @ phase_table(D1, D2) @ B))


def _pairs(X1: int, X2: int) -> list[tuple[int, int]]:
    return [(d1, d2) for d1 in range(1, int(X1) + 1) for d2 in range(1, int(X2) + 1)]


def bilinear_form(seqs: SeqPair, X1: int, X2: int, workers: int = 1) -> float:
    """sum_{D1 <= X1, D2 <= X2} |sum_{n, m <= N} a_n b_m S(1, m, n, 1; D1, D2)|."""
    if X1 < 1 or X2 < 1:
        raise ValueError("X1, X2 must be >= 1")
    pairs = _pairs(X1, X2)
    if workers > 1:
        # build tables serially so the cache is only read concurrently
        for p in pairs:
            phase_table(*p)
        with ThreadPoolExecutor(workers) as ex:
            vals = list(ex.map(lambda p: _pair_value(seqs, *p), pairs))
    else:
        vals = [_pair_value(seqs, *p) for p in pairs]
    return float(math.fsum(vals))


def bilinear_form_naive(seqs: SeqPair, X1: int, X2: int) -> float:
    """The same quantity from brute-force sums, one per (m, n, D1, D2)."""
    N = seqs.N
    params = [(1, m, n, 1) for n in range(1, N + 1) for m in range(1, N + 1)]
    coef = [seqs.a[n - 1] * seqs.b[m - 1] for _, m, n, _ in params]
    total = 0.0
    for D1, D2 in _pairs(X1, X2):
        vals = s_long_many(D1, D2, params, mode="float")
        total += abs(sum(c * v for c, v in zip(coef, vals)))
    return total


def envelope(X1: float, X2: float, N: float, norm_a: float = 1.0, norm_b: float = 1.0) -> float:
    """||a|| ||b|| (X1 X2 (X1 + X2) + (N X1 X2)^{1/2} (X1 + X2)^{3/2} + N X1 X2)."""
    if min(X1, X2, N) < 1:
        raise ValueError("X1, X2, N must be >= 1")
    s = X1 + X2
    return norm_a * norm_b * (X1 * X2 * s + math.sqrt(N * X1 * X2) * s**1.5 + N * X1 * X2)


def envelope_simple(X: float, N: float) -> float:
    """X^2 (X + N), the balanced form of the envelope without norms."""
    return X * X * (X + N)


def hybrid_form(seqs: SeqPair, X1: int, X2: int, s_grid: Iterable[tuple[complex, complex, float]],
                workers: int = 1) -> float:
    """sum over nodes of |weight| * bilinear_form with a_n n^{-s1}, b_m m^{-s2}."""
    total = 0.0
    for s1, s2, w in s_grid:
        if abs(complex(s1).real) > 1e-12 or abs(complex(s2).real) > 1e-12:
            raise ValueError("grid nodes must satisfy Re s1 = Re s2 = 0")
        total += abs(w) * bilinear_form(seqs.twisted(s1, s2), X1, X2, workers)
    return total


# -- Gallagher diagnostic ---------------------------------------------------------

@dataclass(frozen=True)
class GallagherReport:
    lhs: float
    rhs: float
    ratio: float
    f: int
    X: int
    T: float
    N: int


def gallagher_check(f: int, X: int, T: float, N: int, b: Sequence[complex],
                    t_nodes: Sequence[float] | None = None) -> GallagherReport:
    """Left side of the hybrid large sieve by trapezoid t-quadrature, against (X^2 f T + N) ||b||^2."""
    if min(f, X, N) < 1 or T < 1:
        raise ValueError("f, X, N, T must be >= 1")
    b = np.asarray(b, dtype=complex)
    if b.size != N:
        raise ValueError("b must have length N")
    t = np.linspace(-T, T, 201) if t_nodes is None else np.asarray(t_nodes, dtype=float)
    m = np.arange(1, N + 1, dtype=float)
    twist = b[:, None] * np.exp(-1j * np.outer(np.log(m), t))  # b(m) m^{-it}
    lhs = 0.0
    for F in range(1, X + 1):
        q = F * f
        V = _char_matrix(N, q) @ twist
        lhs += float(np.trapezoid((np.abs(V) ** 2).sum(axis=0), t))
    rhs = (X * X * f * T + N) * float(np.vdot(b, b).real)
    return GallagherReport(lhs, rhs, lhs / rhs, f, X, T, N)


# -- sweeps -------------------------------------------------------------------------

def scan(X_list: Sequence[int], N_list: Sequence[int], generator: str = "random_pm1", seed: int = 0,
         trials: int = 1, paired: bool = False, theta: float = 0.0, workers: int = 1) -> list[ScanRecord]:
    """Bilinear-form sweep over X1 = X2 = X and N.

    ``paired`` zips X_list with N_list instead of taking the product. Trial
    seeds come from ``SeedSequence(seed)`` so records are reproducible.
    """
    grid = list(zip(X_list, N_list)) if paired else [(X, N) for X in X_list for N in N_list]
    children = np.random.SeedSequence(seed).spawn(len(grid) * trials)
    out = []
    for i, (X, N) in enumerate(grid):
        for k in range(trials):
            s = int(children[i * trials + k].generate_state(1, dtype=np.uint64)[0])
            seqs = make_seqs(generator, N, s, theta)
            val = bilinear_form(seqs, X, X, workers)
            env = envelope_simple(X, N)
            out.append(ScanRecord(X, X, N, val, env, val / (seqs.norm_a * seqs.norm_b * env), s, generator))
    return out


def records_to_jsonl(records: Iterable[ScanRecord]) -> str:
    return "".join(json.dumps(r.as_dict(), sort_keys=True) + "\n" for r in records)


def records_to_csv(records: Iterable[ScanRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x1", "x2", "n", "s_value", "envelope", "ratio", "seed"])
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()
