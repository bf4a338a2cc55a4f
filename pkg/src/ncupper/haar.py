"""Exact Haar-unitary expectations of traces of words, plus a Monte Carlo
cross-check oracle.

A trace word is a cyclic sequence of atoms: Haar-unitary letters ``U`` / its
adjoint, and fixed signature matrices diag(I_r, -I_{dim-r}). The exact value
of E[tr w] is computed by the standard pairing expansion for moments of Haar
unitaries: for each independent unitary symbol, sum over pairs of pairings of
its starred/unstarred occurrences; each configuration contributes a product
of Weingarten weights times the product of loop traces induced on the index
structure of the word. Constants being diagonal +-1 matrices keeps loop
values integer, so every result is an exact rational.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

import numpy as np

from .errors import BudgetExceededError, InputError
from .symcomb import compose, cycle_type, inverse, weingarten

DEFAULT_BUDGET = 10 ** 8


@dataclass(frozen=True)
class UnitaryAtom:
    symbol: str
    star: bool = False


@dataclass(frozen=True)
class ConstantAtom:
    name: str


Atom = UnitaryAtom | ConstantAtom
TraceWord = tuple[Atom, ...]


@dataclass(frozen=True)
class SignatureMatrix:
    """diag(I_r, -I_{dim-r}); trace = 2r - dim."""

    dim: int
    r: int

    def __post_init__(self):
        if not (0 <= self.r <= self.dim):
            raise InputError("signature needs 0 <= r <= dim")

    @property
    def trace(self) -> int:
        return 2 * self.r - self.dim

    def sign(self, i: int) -> int:
        return 1 if i < self.r else -1


def _resolved_atoms(word: TraceWord,
                    constants: Mapping[str, SignatureMatrix]) -> tuple:
    out = []
    for a in word:
        if isinstance(a, UnitaryAtom):
            out.append(("u", a.symbol, a.star))
        elif isinstance(a, ConstantAtom):
            try:
                m = constants[a.name]
            except KeyError:
                raise InputError(f"missing constant {a.name!r}") from None
            out.append(("c", m.dim, m.r))
        else:
            raise InputError(f"bad atom {a!r}")
    return tuple(out)


def _star_reverse(resolved: tuple) -> tuple:
    out = []
    for a in reversed(resolved):
        if a[0] == "u":
            out.append(("u", a[1], not a[2]))
        else:
            out.append(a)  # signature matrices are self-adjoint
    return tuple(out)


def _cyclic_min(t: tuple) -> tuple:
    reprs = [t[i:] + t[:i] for i in range(len(t))]
    return min(reprs, key=repr)


def _cache_key(resolved: tuple, dim: int) -> tuple:
    # fold both trace cyclicity and conjugate symmetry into the key
    a = _cyclic_min(resolved)
    b = _cyclic_min(_star_reverse(resolved))
    return (min(a, b, key=repr), dim)


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


_MOMENT_CACHE: dict[tuple, Fraction] = {}


def exact_trace_moment(word: Sequence[Atom], dim: int,
                       constants: Mapping[str, SignatureMatrix] | None = None,
                       budget: int = DEFAULT_BUDGET) -> Fraction:
    """Exact value of E[tr w(U_1, ..., U_k, D_1, ...)] over independent Haar
    unitaries of size dim, with fixed signature-matrix constants."""
    constants = constants or {}
    if dim < 1:
        raise InputError("dim must be >= 1")
    if not word:
        raise InputError("trace word must be non-empty")
    resolved = _resolved_atoms(tuple(word), constants)
    for a in resolved:
        if a[0] == "c" and a[1] != dim:
            raise InputError(f"constant of dim {a[1]} used at dim {dim}")
    key = _cache_key(resolved, dim)
    cached = _MOMENT_CACHE.get(key)
    if cached is not None:
        return cached
    value = _evaluate_moment(resolved, dim, budget)
    _MOMENT_CACHE[key] = value
    return value


def _evaluate_moment(resolved: tuple, dim: int, budget: int) -> Fraction:
    L = len(resolved)
    # occurrence lists per unitary symbol
    unstarred: dict[str, list[int]] = {}
    starred: dict[str, list[int]] = {}
    const_pos: list[int] = []
    for pos, a in enumerate(resolved):
        if a[0] == "u":
            (starred if a[2] else unstarred).setdefault(a[1], []).append(pos)
        else:
            const_pos.append(pos)
    symbols = sorted(set(unstarred) | set(starred))
    for s in symbols:
        if len(unstarred.get(s, ())) != len(starred.get(s, ())):
            return Fraction(0)  # phase invariance kills unbalanced words
    counts = [len(unstarred[s]) for s in symbols]
    n_configs = 1
    for k in counts:
        n_configs *= factorial(k) ** 2
    if n_configs > budget:
        raise BudgetExceededError(
            f"Weingarten expansion needs {n_configs} configurations "
            f"(budget {budget})")

    # base gluing from diagonal constants: D[g_c, g_{c+1}] forces equality
    base = _UnionFind(L)
    for c in const_pos:
        base.union(c, (c + 1) % L)
    base_parent = list(base.parent)

    total = Fraction(0)
    perm_lists = [list(itertools.permutations(range(k))) for k in counts]
    for sigmas in itertools.product(*perm_lists):
        # row deltas: gap(P[i]) == gap(Q[sigma(i)] + 1)
        uf_rows = []
        for s, sigma in zip(symbols, sigmas):
            P, Q = unstarred[s], starred[s]
            for i, qi in enumerate(sigma):
                uf_rows.append((P[i], (Q[qi] + 1) % L))
        for taus in itertools.product(*perm_lists):
            uf = _UnionFind(L)
            uf.parent = list(base_parent)
            for a, b in uf_rows:
                uf.union(a, b)
            weight = Fraction(1)
            for s, sigma, tau in zip(symbols, sigmas, taus):
                P, Q = unstarred[s], starred[s]
                # column deltas: gap(P[i] + 1) == gap(Q[tau(i)])
                for i, ti in enumerate(tau):
                    uf.union((P[i] + 1) % L, Q[ti])
                weight *= weingarten(cycle_type(compose(sigma, inverse(tau))),
                                     dim)
            total += weight * _loop_value(uf, resolved, const_pos, dim, L)
    return total


def _loop_value(uf: _UnionFind, resolved: tuple, const_pos: list[int],
                dim: int, L: int) -> int:
    """Product over index classes of sum over index values of the signs of
    the constants sitting on the class; a class with no constants gives dim."""
    classes: dict[int, list[tuple[int, int]]] = {}
    roots = set()
    for g in range(L):
        roots.add(uf.find(g))
    for c in const_pos:
        classes.setdefault(uf.find(c), []).append((resolved[c][1], resolved[c][2]))
    value = 1
    for root in roots:
        consts = classes.get(root)
        if not consts:
            value *= dim
            continue
        s = 0
        for i in range(dim):
            prod = 1
            for (_, r) in consts:
                if i >= r:
                    prod = -prod
            s += prod
        value *= s
    return value


# --- Monte Carlo oracle ---------------------------------------------------

def haar_sample(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Batch of Haar unitaries via QR of complex Ginibre matrices with the
    diagonal-phase correction (plain QR is not Haar-distributed)."""
    z = (rng.standard_normal((count, dim, dim))
         + 1j * rng.standard_normal((count, dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.einsum("...ii->...i", r)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def _signature_array(m: SignatureMatrix) -> np.ndarray:
    d = np.ones(m.dim)
    d[m.r:] = -1.0
    return np.diag(d).astype(complex)


def mc_trace_moments(words: Sequence[Sequence[Atom]], dim: int,
                     constants: Mapping[str, SignatureMatrix] | None = None,
                     samples: int = 10 ** 5, seed: int = 0,
                     chunk: int = 20000) -> list[tuple[float, float]]:
    """Monte Carlo (estimate, stderr) of tr w for several words sharing one
    Haar sample stream. Deterministic given the seed."""
    constants = constants or {}
    if samples < 2:
        raise InputError("need samples >= 2")
    words = [tuple(w) for w in words]
    symbols = sorted({a.symbol for w in words for a in w
                      if isinstance(a, UnitaryAtom)})
    const_arrays = {}
    for w in words:
        for a in w:
            if isinstance(a, ConstantAtom) and a.name not in const_arrays:
                if a.name not in constants:
                    raise InputError(f"missing constant {a.name!r}")
                m = constants[a.name]
                if m.dim != dim:
                    raise InputError(f"constant of dim {m.dim} used at dim {dim}")
                const_arrays[a.name] = _signature_array(m)
    rng = np.random.default_rng(seed)
    sums = np.zeros(len(words))
    sqsums = np.zeros(len(words))
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        us = {s: haar_sample(rng, n, dim) for s in symbols}
        for wi, w in enumerate(words):
            acc = None
            for a in w:
                if isinstance(a, UnitaryAtom):
                    m = us[a.symbol]
                    m = m.conj().transpose(0, 2, 1) if a.star else m
                else:
                    m = np.broadcast_to(const_arrays[a.name], (n, dim, dim))
                acc = m if acc is None else acc @ m
            tr = np.einsum("...ii->...", acc).real
            sums[wi] += tr.sum()
            sqsums[wi] += (tr * tr).sum()
        done += n
    out = []
    for wi in range(len(words)):
        mean = sums[wi] / samples
        var = max(sqsums[wi] / samples - mean * mean, 0.0)
        stderr = np.sqrt(var / (samples - 1))
        out.append((float(mean), float(stderr)))
    return out


def mc_trace_moment(word: Sequence[Atom], dim: int,
                    constants: Mapping[str, SignatureMatrix] | None = None,
                    samples: int = 10 ** 5, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo mean and standard error of tr w; see mc_trace_moments."""
    return mc_trace_moments([word], dim, constants, samples, seed)[0]
