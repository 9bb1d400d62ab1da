"""Global decomposition of S(1, m, n, 1; D1, D2) into classical sums.

The moduli are first split prime by prime into blocks by comparing
valuations (``block_split``). Inside each block the divisor variables are
unitary splits, so every prime power is assigned wholesale; the f-variables
are then forced by support. On top of that come the E/J refinements, the
residue triples (C1, C2, C3) and the twists alpha, beta obtained by CRT.

Each emitted :class:`DecompTuple` contributes

    weight * mu(e7 E8)^2 * S(0, m; e4 e8 J1) * S(0, n; e2 e8 J1)
        * S(m / (e2 E1 E5 J2), F1 alpha; F2 f2 f3 E3 E6 J3)
        * S(n / (E1 e4 E5 J2), F2 beta; F1 E3 f4 f6 E6 J3)

and the total must equal the brute-force value exactly; that equality is
what the test-suite uses to arbitrate every enumeration rule here.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .arith import c_factor, crt, factorize, inv_mod, mobius, unitary_splits, valuation
from .cyclo import CycloValue
from .errors import InternalNonCoprime, NotInvertible
from .gl3 import long_terms, s_long_bruteforce
from .kloosterman import kloosterman_counts, kloosterman_fast, ramanujan

__all__ = [
    "BlockSplit",
    "DecompTuple",
    "block_split",
    "enumerate_tuples",
    "alpha_beta",
    "validate_tuple",
    "s_long_decomposed",
    "decomposition_work",
    "verify_decomposition",
    "VerificationReport",
    "MAX_MN",
    "MAX_MODULUS_PRODUCT",
]

MAX_MN = 10**6
MAX_MODULUS_PRODUCT = 10**6


@dataclass(frozen=True)
class BlockSplit:
    F1: int
    F2: int
    G1: int
    G2: int
    H1: int
    H2: int
    I: int  # noqa: E741

    @property
    def I1(self) -> int:
        return self.I

    @property
    def I2(self) -> int:
        return self.I


def block_split(D1: int, D2: int) -> BlockSplit:
    """Split (D1, D2) prime by prime according to how v_p(D1) compares with v_p(D2)."""
    if D1 < 1 or D2 < 1:
        raise ValueError(f"moduli must be positive, got {(D1, D2)}")
    F1 = F2 = G1 = G2 = H1 = H2 = I = 1  # noqa: E741
    primes = set(factorize(D1).primes) | set(factorize(D2).primes)
    for p in sorted(primes):
        a, b = valuation(D1, p), valuation(D2, p)
        if b == 0:
            F1 *= p**a
        elif a == 0:
            F2 *= p**b
        elif a < b:
            G1 *= p**a
            G2 *= p**b
        elif a > b:
            H1 *= p**a
            H2 *= p**b
        else:
            I *= p**a  # noqa: E741
    return BlockSplit(F1, F2, G1, G2, H1, H2, I)


@dataclass(frozen=True, order=True)
class DecompTuple:
    F1: int
    F2: int
    f2: int
    f3: int
    f4: int
    f6: int
    e2: int
    e3: int
    e4: int
    e6: int
    e7: int
    e8: int
    e9: int
    E1: int
    E3: int
    E5: int
    E6: int
    E8: int
    E9: int
    J1: int
    J2: int
    J3: int
    C1: int = 0
    C2: int = 0
    C3: int = 0
    alpha: int = field(default=1, compare=False)
    beta: int = field(default=1, compare=False)
    weight: Fraction = field(default=Fraction(1), compare=False)
    mobius_sq: int = field(default=1, compare=False)

    @property
    def modulus_m(self) -> int:
        """Modulus of the Kloosterman sum carrying m."""
        return self.F2 * self.f2 * self.f3 * self.E3 * self.E6 * self.J3

    @property
    def modulus_n(self) -> int:
        """Modulus of the Kloosterman sum carrying n."""
        return self.F1 * self.E3 * self.f4 * self.f6 * self.E6 * self.J3

    @property
    def m_divisor(self) -> int:
        return self.e2 * self.E1 * self.E5 * self.J2

    @property
    def n_divisor(self) -> int:
        return self.E1 * self.e4 * self.E5 * self.J2

    @property
    def ramanujan_m_modulus(self) -> int:
        return self.e4 * self.e8 * self.J1

    @property
    def ramanujan_n_modulus(self) -> int:
        return self.e2 * self.e8 * self.J1

    def as_dict(self) -> dict:
        d = asdict(self)
        d["weight"] = str(self.weight)
        return d


# -- local enumeration helpers ----------------------------------------------

def _forced_cofactor(e: int, big: int) -> int:
    """prod over p | e of p^(v_p(big) - v_p(e))."""
    out = 1
    for p, k in factorize(e).factors:
        out *= p ** (valuation(big, p) - k)
    return out


def _square_splits(e: int, g: int) -> list[tuple[int, int]]:
    """Pairs (E_a, E_b) with E_a * E_b^2 = e, rad(e) | E_b and E_a | g."""
    choices = []
    for p, v in factorize(e).factors:
        local = []
        for b in range(1, v // 2 + 1):
            a = v - 2 * b
            if g % p**a == 0:
                local.append((p**a, p**b))
        if not local:
            return []
        choices.append(local)
    out = []
    for combo in itertools.product(*choices):
        out.append((math.prod(c[0] for c in combo), math.prod(c[1] for c in combo)))
    return out


def _i_block_splits(e9: int, g: int) -> list[tuple[int, int, int, int, int]]:
    """(J1, J2, J3, E8, E9) with product e9 and the coprimality/divisibility rules.

    Rules: J3 | E9, rad(e9) | E9, (E8, J1 J2 J3) = 1, (J1, J2 J3) = 1, J2 | g,
    and rad(J2) | J3 (v_p(J2) < v_p(e9/E9) wherever p | J2).
    They are local at each prime, so enumerate exponent 5-tuples per prime.
    """
    per_prime = []
    for p, v in factorize(e9).factors:
        local = []
        for x9 in range(1, v + 1):
            rest = v - x9
            for x8, j1, j2, j3 in itertools.product(range(rest + 1), repeat=4):
                if x8 + j1 + j2 + j3 != rest or j3 > x9:
                    continue
                if x8 and (j1 or j2 or j3):
                    continue
                if j1 and (j2 or j3):
                    continue
                # J2 only carries primes whose exponent falls short of e9/E9
                if j2 and not j3:
                    continue
                if g % p**j2:
                    continue
                local.append((p**j1, p**j2, p**j3, p**x8, p**x9))
        per_prime.append(local)
    out = []
    for combo in itertools.product(*per_prime):
        out.append(tuple(math.prod(c[k] for c in combo) for k in range(5)))
    return out


def _c1_set(E3: int, f3: int) -> list[int]:
    return [c for c in range(E3) if math.gcd(c, E3) == 1 and math.gcd(1 - c * f3, f3 * E3) == 1]


def _c2_set(E6: int, f6: int) -> list[int]:
    return [c for c in range(E6) if math.gcd(c, E6) == 1 and math.gcd(1 - c * f6, f6 * E6) == 1]


def _c3_set(J3: int, E9: int) -> list[int]:
    return [c for c in range(J3) if math.gcd(c, J3) == 1 and math.gcd(E9 // J3 - c, J3) == 1]


def _inv(a: int, q: int) -> int:
    try:
        return inv_mod(a, q)
    except NotInvertible:
        raise InternalNonCoprime(f"{a} not invertible mod {q}") from None


def alpha_beta(t: DecompTuple) -> tuple[int, int]:
    """The twists alpha (mod ``t.modulus_m / F2 * F2``) and beta, by CRT.

    alpha is determined modulo F2 f2 f3 E3 E6 J3 by one congruence on each of
    F2 f2, f3 E3, E6 and J3; beta likewise modulo F1 E3 f4 f6 E6 J3 on
    F1 f4, E3, f6 E6 and J3. C1* = 1 - C1 f3, C2* = 1 - C2 f6, C3* = E9/J3 - C3.
    """
    c1s = 1 - t.C1 * t.f3
    c2s = 1 - t.C2 * t.f6
    c3s = t.E9 // t.J3 - t.C3
    common_a = t.e4 * t.e7 * t.e8 * t.J1 * t.E8
    common_b = t.e2 * t.e7 * t.e8 * t.J1 * t.E8

    q = t.F2 * t.f2
    a1 = _inv(common_a * t.E9, q) * t.f4 * t.f6 * t.J3
    q2 = t.f3 * t.E3
    a2 = _inv(common_a * t.E9, q2) * t.f4 * t.f6 * t.J3 * _inv(c1s, q2)
    a3 = _inv(common_a * t.E9, t.E6) * t.f4 * t.J3 * _inv(t.C2, t.E6)
    a4 = _inv(common_a, t.J3) * t.f4 * t.f6 * _inv(c3s, t.J3)
    alpha, _ = crt([(a1, q), (a2, q2), (a3, t.E6), (a4, t.J3)])

    q = t.F1 * t.f4
    b1 = _inv(common_b * t.E9, q) * t.f2 * t.f3 * t.J3
    b2 = _inv(common_b * t.E9, t.E3) * t.f2 * t.J3 * _inv(t.C1, t.E3)
    q3 = t.f6 * t.E6
    b3 = _inv(common_b * t.E9, q3) * t.f2 * t.f3 * t.J3 * _inv(c2s, q3)
    b4 = _inv(common_b, t.J3) * t.f2 * t.f3 * _inv(t.C3, t.J3)
    beta, _ = crt([(b1, q), (b2, t.E3), (b3, q3), (b4, t.J3)])
    return alpha, beta


def _check_inputs(m: int, n: int, D1: int, D2: int) -> None:
    if m < 1 or n < 1:
        raise ValueError(f"the decomposition needs m, n >= 1, got {(m, n)}")
    if m > MAX_MN or n > MAX_MN:
        raise ValueError(f"m, n capped at {MAX_MN}")
    if D1 < 1 or D2 < 1:
        raise ValueError(f"moduli must be positive, got {(D1, D2)}")
    if D1 * D2 > MAX_MODULUS_PRODUCT:
        raise ValueError(f"D1*D2 capped at {MAX_MODULUS_PRODUCT}")


def enumerate_tuples(m: int, n: int, D1: int, D2: int) -> Iterator[DecompTuple]:
    """Every term of the decomposition of S(1, m, n, 1; D1, D2), in sorted order."""
    _check_inputs(m, n, D1, D2)
    bs = block_split(D1, D2)
    g = math.gcd(m, n)

    g_block = []
    for e2, e3 in unitary_splits(bs.G1, 2):
        if m % e2:
            continue
        f2, f3 = _forced_cofactor(e2, bs.G2), _forced_cofactor(e3, bs.G2)
        for E1, E3 in _square_splits(e3, g):
            g_block.append((e2, e3, f2, f3, E1, E3))

    h_block = []
    for e4, e6 in unitary_splits(bs.H2, 2):
        if n % e4:
            continue
        f4, f6 = _forced_cofactor(e4, bs.H1), _forced_cofactor(e6, bs.H1)
        for E5, E6 in _square_splits(e6, g):
            h_block.append((e4, e6, f4, f6, E5, E6))

    i_block = []
    for e7, e8, e9 in unitary_splits(bs.I, 3):
        for J1, J2, J3, E8, E9 in _i_block_splits(e9, g):
            i_block.append((e7, e8, e9, J1, J2, J3, E8, E9))

    out = []
    for (e2, e3, f2, f3, E1, E3), (e4, e6, f4, f6, E5, E6), (e7, e8, e9, J1, J2, J3, E8, E9) in itertools.product(
        g_block, h_block, i_block
    ):
        weight = Fraction(e2 * E1**2 * E3 * e4 * E5**2 * E6 * J2**2 * E9) / c_factor(e9, E9)
        mu_sq = mobius(e7 * E8) ** 2
        for C1, C2, C3 in itertools.product(_c1_set(E3, f3), _c2_set(E6, f6), _c3_set(J3, E9)):
            t = DecompTuple(
                bs.F1, bs.F2, f2, f3, f4, f6, e2, e3, e4, e6, e7, e8, e9,
                E1, E3, E5, E6, E8, E9, J1, J2, J3, C1, C2, C3,
                weight=weight, mobius_sq=mu_sq,
            )
            a, b = alpha_beta(t)
            out.append(_replace(t, alpha=a, beta=b))
    out.sort()
    yield from out


def _replace(t: DecompTuple, **kw) -> DecompTuple:
    d = {f: getattr(t, f) for f in t.__dataclass_fields__}
    d.update(kw)
    return DecompTuple(**d)


def validate_tuple(t: DecompTuple, m: int, n: int, D1: int, D2: int) -> list[str]:
    """Names of the tuple invariants that ``t`` violates (empty when admissible)."""
    bad = []

    def need(cond, name):
        if not cond:
            bad.append(name)

    e_all = t.e2 * t.e3 * t.e4 * t.e6 * t.e7 * t.e8 * t.e9
    need(t.F1 * t.f4 * t.f6 * e_all == D1, "product D1")
    need(t.F2 * t.f2 * t.f3 * e_all == D2, "product D2")
    need(m % t.e2 == 0, "e2 | m")
    need(n % t.e4 == 0, "e4 | n")
    need(math.gcd(t.F1, t.F2) == 1, "(F1, F2) = 1")
    need(math.gcd(t.F1 * t.F2, e_all) == 1, "(F1 F2, e...) = 1")
    g = math.gcd(m, n)
    rad = lambda x: math.prod(factorize(x).primes)  # noqa: E731
    need(t.E1 * t.E3**2 == t.e3, "E1 E3^2 = e3")
    need(t.E3 % rad(t.e3) == 0, "rad(e3) | E3")
    need(g % t.E1 == 0, "E1 | (m, n)")
    need(t.E5 * t.E6**2 == t.e6, "E5 E6^2 = e6")
    need(t.E6 % rad(t.e6) == 0, "rad(e6) | E6")
    need(g % t.E5 == 0, "E5 | (m, n)")
    need(t.J1 * t.J2 * t.J3 * t.E8 * t.E9 == t.e9, "J1 J2 J3 E8 E9 = e9")
    need(t.E9 % t.J3 == 0, "J3 | E9")
    need(t.E9 % rad(t.e9) == 0, "rad(e9) | E9")
    need(math.gcd(t.E8, t.J1 * t.J2 * t.J3) == 1, "(E8, J1 J2 J3) = 1")
    need(math.gcd(t.J1, t.J2 * t.J3) == 1, "(J1, J2 J3) = 1")
    need(g % t.J2 == 0, "J2 | (m, n)")
    need(t.J3 % rad(t.J2) == 0, "rad(J2) | J3")
    need(0 <= t.C1 < t.E3 and math.gcd(t.C1, t.E3) == 1, "(C1, E3) = 1")
    need(math.gcd(1 - t.C1 * t.f3, t.f3 * t.E3) == 1, "(C1*, f3 E3) = 1")
    need(0 <= t.C2 < t.E6 and math.gcd(t.C2, t.E6) == 1, "(C2, E6) = 1")
    need(math.gcd(1 - t.C2 * t.f6, t.f6 * t.E6) == 1, "(C2*, f6 E6) = 1")
    need(0 <= t.C3 < t.J3 and math.gcd(t.C3, t.J3) == 1, "(C3, J3) = 1")
    need(math.gcd(t.E9 // t.J3 - t.C3, t.J3) == 1, "(C3*, J3) = 1")
    w = Fraction(t.e2 * t.E1**2 * t.E3 * t.e4 * t.E5**2 * t.E6 * t.J2**2 * t.E9) / c_factor(t.e9, t.E9)
    need(t.weight == w, "weight")
    need(t.mobius_sq == mobius(t.e7 * t.E8) ** 2, "mobius_sq")
    need(math.gcd(t.alpha, t.modulus_m) == 1, "(alpha, modulus) = 1")
    need(math.gcd(t.beta, t.modulus_n) == 1, "(beta, modulus) = 1")
    return bad


# -- evaluation ---------------------------------------------------------------

def _term_scalar(t: DecompTuple, m: int, n: int) -> Fraction:
    if not t.mobius_sq:
        return Fraction(0)
    return t.weight * ramanujan(m, t.ramanujan_m_modulus) * ramanujan(n, t.ramanujan_n_modulus)


def _product_counts(k1: np.ndarray, c1: int, k2: np.ndarray, c2: int, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices (mod L) and multiplicities of the product of two count vectors."""
    i = np.flatnonzero(k1)
    j = np.flatnonzero(k2)
    idx = (i[:, None] * (L // c1) + j[None, :] * (L // c2)) % L
    val = k1[i][:, None] * k2[j][None, :]
    return idx.ravel(), val.ravel()


def s_long_decomposed(m: int, n: int, D1: int, D2: int, mode: str = "exact", tuples=None):
    """S(1, m, n, 1; D1, D2) assembled from the decomposition terms.

    Only m, n >= 1 have a displayed decomposition; other signs fall back to
    the brute-force sum.
    """
    if (m < 1 or n < 1) and tuples is None:
        return s_long_bruteforce(1, m, n, 1, D1, D2, mode=mode)
    if tuples is None:
        tuples = list(enumerate_tuples(m, n, D1, D2))
    L = math.lcm(D1, D2)
    if mode == "float":
        total = 0j
        for t in tuples:
            s = _term_scalar(t, m, n)
            if s == 0:
                continue
            k1 = kloosterman_fast(m // t.m_divisor, t.F1 * t.alpha, t.modulus_m, "float")
            k2 = kloosterman_fast(n // t.n_divisor, t.F2 * t.beta, t.modulus_n, "float")
            total += float(s) * k1 * k2
        return total
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    # group terms by rational scalar so each group is an integer accumulation
    groups: dict[Fraction, np.ndarray] = {}
    for t in tuples:
        s = _term_scalar(t, m, n)
        if s == 0:
            continue
        c1, c2 = t.modulus_m, t.modulus_n
        k1 = kloosterman_counts(m // t.m_divisor, t.F1 * t.alpha, c1)
        k2 = kloosterman_counts(n // t.n_divisor, t.F2 * t.beta, c2)
        idx, val = _product_counts(k1, c1, k2, c2, L)
        acc = groups.get(s)
        if acc is None:
            acc = groups[s] = np.zeros(L, dtype=np.int64)
        np.add.at(acc, idx, val)
    total = CycloValue(L)
    for s, acc in groups.items():
        total = total + CycloValue.from_int_array(L, acc).scale(s)
    return total


def decomposition_work(m: int, n: int, D1: int, D2: int) -> dict:
    """Term-count accounting: tuples, and classical-sum residues summed over."""
    tuples = list(enumerate_tuples(m, n, D1, D2))
    live = [t for t in tuples if _term_scalar(t, m, n) != 0]
    return {
        "n_tuples": len(tuples),
        "n_live": len(live),
        "classical_terms": sum(t.modulus_m + t.modulus_n for t in live),
        "bruteforce_terms": D1 * D1 * D2,
    }


# -- verification sweep -------------------------------------------------------

@dataclass
class VerificationReport:
    records: list[dict]
    mismatches: list[dict]
    n_pairs: int
    n_cases: int
    seconds: float
    mode: str

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> dict:
        return {
            "kind": "verify_summary",
            "mode": self.mode,
            "pairs": self.n_pairs,
            "cases": self.n_cases,
            "mismatches": len(self.mismatches),
            "total_tuples": sum(r["n_tuples"] for r in self.records),
            "seconds": round(self.seconds, 3),
        }

    def jsonl(self) -> Iterator[str]:
        for r in self.records:
            yield json.dumps(r, sort_keys=True)


def _verify_pair(D1: int, D2: int, mn: list[tuple[int, int]], mode: str) -> list[dict]:
    terms = long_terms(D1, D2)
    out = []
    for m, n in mn:
        ex = terms.exponents(1, m, n, 1)
        L = terms.order
        tuples = list(enumerate_tuples(m, n, D1, D2))
        dec = s_long_decomposed(m, n, D1, D2, mode, tuples=tuples)
        if mode == "exact":
            brute = CycloValue.from_exponents(L, ex)
            match = brute == dec
            z = dec.to_complex()
        else:
            brute = complex(np.exp(2j * np.pi * (ex / L)).sum())
            z = dec
            match = abs(brute - dec) <= 1e-6 * max(1.0, abs(brute))
        out.append({
            "d1": D1, "d2": D2, "m": m, "n": n,
            "value_re": round(z.real, 12) + 0.0, "value_im": round(z.imag, 12) + 0.0,
            "n_tuples": len(tuples), "match": bool(match), "mode": mode,
        })
    return out


def verify_decomposition(pairs: Iterable[tuple[int, int]], mn_set: Iterable[tuple[int, int]],
                         mode: str = "exact", workers: int = 1) -> VerificationReport:
    """Compare decomposed and brute-force values on every (pair, (m, n)) case."""
    pairs = sorted(set(pairs))
    mn = sorted(set(mn_set))
    t0 = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            chunks = list(ex.map(lambda p: _verify_pair(p[0], p[1], mn, mode), pairs))
    else:
        chunks = [_verify_pair(D1, D2, mn, mode) for D1, D2 in pairs]
    records = [r for c in chunks for r in c]
    return VerificationReport(
        records=records,
        mismatches=[r for r in records if not r["match"]],
        n_pairs=len(pairs),
        n_cases=len(records),
        seconds=time.perf_counter() - t0,
        mode=mode,
    )
