"""Integer arithmetic support: factorization, modular square roots, CRT.

Everything here is exact integer work.  The quadratic congruence solver
`quad_roots` is the workhorse: it solves coeff*x^2 = D (mod q) for
coeff in {1, 4} by prime powers and recombines with the CRT.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BudgetError, PreconditionError

# Prime powers up to this bound are handled by direct enumeration in the
# non-generic branches (p in {2,3}, or p dividing D).  4 MiB of int64 per
# call at the limit, transient.
_ENUM_LIMIT = 1 << 22


@dataclass(frozen=True)
class SpfTable:
    """Smallest-prime-factor sieve up to `limit` (inclusive)."""

    limit: int
    spf: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.limit < 2:
            raise PreconditionError("sieve limit must be >= 2")


def build_spf(limit: int) -> SpfTable:
    """Sieve smallest prime factors for 0..limit.

    spf[0] = 0, spf[1] = 1, spf[p] = p for primes.
    """
    if limit < 2:
        raise PreconditionError("sieve limit must be >= 2")
    spf = np.zeros(limit + 1, dtype=np.int32)
    if limit >= 1:
        spf[1] = 1
    if limit >= 2:
        spf[2::2] = 2
    i = 3
    while i * i <= limit:
        if spf[i] == 0:
            block = spf[i * i :: 2 * i]
            block[block == 0] = i
        i += 2
    # remaining zeros at odd indices are primes
    view = spf[3::2]
    mask = view == 0
    if mask.any():
        view[mask] = np.arange(3, limit + 1, 2, dtype=np.int32)[mask]
    return SpfTable(limit=limit, spf=spf)


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]  # ((p, exponent), ...) ascending p

    @property
    def mobius(self) -> int:
        if any(a > 1 for _, a in self.factors):
            return 0
        return -1 if len(self.factors) % 2 else 1

    @property
    def squarefree(self) -> bool:
        return all(a == 1 for _, a in self.factors)


def factorize(n: int, table: SpfTable | None = None) -> Factorization:
    """Factor n >= 1, using the sieve when n is inside its range."""
    if n < 1:
        raise PreconditionError(f"factorize requires n >= 1, got {n}")
    if n == 1:
        return Factorization(1, ())
    factors: list[tuple[int, int]] = []
    m = n
    if table is not None and n <= table.limit:
        spf = table.spf
        while m > 1:
            p = int(spf[m])
            a = 0
            while m % p == 0:
                m //= p
                a += 1
            factors.append((p, a))
    else:
        for p in (2, 3):
            if m % p == 0:
                a = 0
                while m % p == 0:
                    m //= p
                    a += 1
                factors.append((p, a))
        d = 5
        while d * d <= m:
            for p in (d, d + 2):
                if m % p == 0:
                    a = 0
                    while m % p == 0:
                        m //= p
                        a += 1
                    factors.append((p, a))
            d += 6
        if m > 1:
            factors.append((m, 1))
    factors.sort()
    return Factorization(n, tuple(factors))


def mod_inverse(a: int, m: int) -> int:
    if m < 1:
        raise PreconditionError(f"modulus must be >= 1, got {m}")
    try:
        return pow(a, -1, m)
    except ValueError:
        raise PreconditionError(f"{a} is not invertible mod {m}") from None


def _sqrt_mod_prime(n: int, p: int) -> int | None:
    """One square root of n mod an odd prime p, or None if n is a non-residue."""
    n %= p
    if n == 0:
        return 0
    if p % 4 == 3:
        x = pow(n, (p + 1) // 4, p)
        return x if x * x % p == n else None
    if pow(n, (p - 1) // 2, p) != 1:
        return None
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, x = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        t2, i = t * t % p, 1
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, x = t * c % p, x * b % p
    return x


def _roots_prime_power(d: int, p: int, a: int, coeff: int) -> list[int]:
    """All x in [0, p^a) with coeff*x^2 = d (mod p^a).  d already reduced."""
    pa = p**a
    vc = 2 if (p == 2 and coeff == 4) else 0
    if d == 0:
        # coeff*x^2 = 0 needs v_p(x) >= ceil((a - vc)/2)
        e = max(0, (a - vc + 1) // 2)
        step = p**e
        return list(range(0, pa, step))
    if p == 2 or p == 3 or d % p == 0:
        if pa > _ENUM_LIMIT:
            raise BudgetError(
                f"quadratic congruence mod {p}^{a} exceeds enumeration limit"
            )
        xs = np.arange(pa, dtype=np.int64)
        hits = np.nonzero((coeff * xs * xs - d) % pa == 0)[0]
        return [int(x) for x in hits]
    # generic branch: p >= 5, p coprime to 2*coeff*d
    dd = d * pow(coeff, -1, pa) % pa if coeff != 1 else d
    x = _sqrt_mod_prime(dd % p, p)
    if x is None:
        return []
    e = 1
    while e < a:
        e2 = min(2 * e, a)
        mod = p**e2
        x = (x - (x * x - dd) * pow(2 * x, -1, mod)) % mod
        e = e2
    return sorted((x, pa - x))


@dataclass(frozen=True)
class RootSet:
    """Solutions of coeff*x^2 = D (mod q), as residues in [0, q)."""

    q: int
    d: int  # D reduced mod q
    coeff: int
    roots: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def quad_roots_factored(
    D: int, q: int, factors: tuple[tuple[int, int], ...], coeff: int = 4
) -> RootSet:
    """Like `quad_roots` but with the factorization of q supplied.

    Sum engines that sweep many D over one modulus factor q once and
    come through here.
    """
    if coeff not in (1, 4):
        raise PreconditionError(f"coeff must be 1 or 4, got {coeff}")
    dq = D % q
    if q == 1:
        return RootSet(1, 0, coeff, (0,))
    parts: list[tuple[int, list[int]]] = []
    for p, a in factors:
        pa = p**a
        r = _roots_prime_power(dq % pa, p, a, coeff)
        if not r:
            return RootSet(q, dq, coeff, ())
        parts.append((pa, r))
    res = [0]
    mod = 1
    for pa, roots in parts:
        inv = pow(mod, -1, pa)
        res = [
            (r + mod * ((s - r) * inv % pa)) % (mod * pa) for r in res for s in roots
        ]
        mod *= pa
    return RootSet(q, dq, coeff, tuple(sorted(res)))


def quad_roots(D: int, q: int, table: SpfTable | None = None, coeff: int = 4) -> RootSet:
    """Solve coeff*x^2 = D (mod q) exactly.

    Works prime power by prime power: a closed form when p^a divides D,
    direct enumeration in the remaining non-generic cases (p in {2,3} or
    p | D), and Tonelli-Shanks plus a Newton lift otherwise.  Aborts
    early when any prime power has no solution.
    """
    if q < 1:
        raise PreconditionError(f"modulus must be >= 1, got {q}")
    return quad_roots_factored(D, q, factorize(q, table).factors, coeff=coeff)


def poly_phase_mod(x: int, D: int, l: int) -> int:
    """(4x^3 - 3Dx) mod 27 l^2, exact."""
    return (4 * x**3 - 3 * D * x) % (27 * l * l)


@lru_cache(maxsize=None)
def sqrt_table(p: int) -> np.ndarray:
    """Lookup table t with t[v] = some x such that x^2 = v (mod p), else -1.

    Vectorized residue screening in the sum engines reads this.  Cached
    per prime; callers keep p modest (a few times 1e4).
    """
    if p < 2 or p > 1 << 26:
        raise PreconditionError(f"sqrt_table expects 2 <= p <= 2^26, got {p}")
    t = np.full(p, -1, dtype=np.int32)
    xs = np.arange(p, dtype=np.int64)
    t[(xs * xs) % p] = xs
    return t
