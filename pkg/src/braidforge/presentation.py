"""Finitely presented groups: Tietze simplification, abelianization, exact
Smith normal form and first homology."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from . import words as W


@dataclass
class FPGroup:
    generators: tuple[str, ...]
    relators: tuple[tuple[int, ...], ...]
    provenance: tuple[str | None, ...] = ()

    def __post_init__(self):
        if any(not name for name in self.generators):
            raise ValueError("empty generator name")
        ng = len(self.generators)
        for rel in self.relators:
            for x in rel:
                if x == 0 or abs(x) > ng:
                    raise ValueError(f"relator letter {x} out of range")
        if not self.provenance:
            self.provenance = (None,) * len(self.relators)
        if len(self.provenance) != len(self.relators):
            raise ValueError("provenance length mismatch")

    def word_str(self, word) -> str:
        if not word:
            return "1"
        return " ".join(self.generators[abs(x) - 1] + ("" if x > 0 else "^-1")
                        for x in word)

    def __str__(self) -> str:
        gens = ", ".join(self.generators)
        rels = ", ".join(self.word_str(r) for r in self.relators)
        return f"⟨{gens} | {rels}⟩"


def from_morse(mp) -> FPGroup:
    return FPGroup(tuple(str(c) for c in mp.generators),
                   tuple(w for w, _ in mp.relators),
                   tuple(str(src) for _, src in mp.relators))


# ---------------------------------------------------------------------------
# Tietze minimization


@dataclass
class Elimination:
    generator: str
    relator: tuple[tuple[str, int], ...]     # relator used, over generator names
    expression: tuple[tuple[str, int], ...]  # generator = this word


@dataclass
class TietzeResult:
    group: FPGroup
    eliminations: list[Elimination]
    target: int | None
    reached: bool | None


def _named(word, names) -> tuple[tuple[str, int], ...]:
    return tuple((names[abs(x) - 1], 1 if x > 0 else -1) for x in word)


def tietze_minimize(p: FPGroup, target: int | None = None,
                    sizes: dict[str, int] | None = None) -> TietzeResult:
    """Eliminate generators that occur exactly once in some relator.

    Candidates are preferred by largest cell size, then shortest eliminating
    relator, then lowest generator and relator index; this repeats to a
    fixpoint.  The elimination log records, per removed generator, the
    relator used and the substituted expression, both over generator names
    (the names stay meaningful after renumbering)."""
    sizes = sizes or {}
    names = list(p.generators)
    relators = [W.free_reduce(r) for r in p.relators]
    prov = list(p.provenance)
    log: list[Elimination] = []

    while True:
        best = None
        for gi in range(1, len(names) + 1):
            for ri, rel in enumerate(relators):
                if W.occurrences(rel, gi) != 1:
                    continue
                key = (-sizes.get(names[gi - 1], 0), len(rel), gi, ri)
                if best is None or key < best[0]:
                    best = (key, gi, ri)
        if best is None:
            break
        _, gi, ri = best
        rel = relators[ri]
        expr = W.solve_for(rel, gi)
        log.append(Elimination(names[gi - 1], _named(rel, names), _named(expr, names)))

        del relators[ri]
        del prov[ri]
        relators = [W.substitute(r, gi, expr) for r in relators]
        # renumber: drop generator gi, shift the ones above down by one
        def shift(word):
            out = []
            for x in word:
                a = abs(x)
                out.append(x if a < gi else (a - 1) * (1 if x > 0 else -1))
            return tuple(out)
        relators = [shift(r) for r in relators]
        del names[gi - 1]
        keep = [i for i, r in enumerate(relators) if r]
        relators = [relators[i] for i in keep]
        prov = [prov[i] for i in keep]

    group = FPGroup(tuple(names), tuple(relators), tuple(prov))
    reached = None if target is None else len(names) <= target
    return TietzeResult(group, log, target, reached)


def named_word_to_indices(word, generators) -> tuple[int, ...]:
    index = {g: i + 1 for i, g in enumerate(generators)}
    return tuple(s * index[name] for name, s in word)


# ---------------------------------------------------------------------------
# abelianization and Smith normal form


def abelianization_matrix(p: FPGroup) -> list[list[int]]:
    """Relators x generators matrix of signed occurrence counts."""
    return [W.exponent_sums(r, len(p.generators)) for r in p.relators]


@dataclass
class SNF:
    diagonal: tuple[int, ...]     # nonzero invariant factors d1 | d2 | ...
    rank: int
    row_transform: tuple[tuple[int, ...], ...]   # U with U A V = D
    col_transform: tuple[tuple[int, ...], ...]   # V


def smith_normal_form(matrix) -> SNF:
    """Exact integer Smith normal form with transforms, U A V = D.

    Runs on checked int64 arithmetic first (entries are watched against an
    overflow budget) and falls back to arbitrary-precision Python integers
    when the budget would be exceeded."""
    try:
        return _snf_numpy(matrix)
    except _EntryOverflow:
        return _snf_python(matrix)


class _EntryOverflow(Exception):
    pass


def _snf_numpy(matrix) -> SNF:
    import numpy as np

    try:
        a = np.array([list(map(int, row)) for row in matrix], dtype=np.int64)
    except OverflowError:
        raise _EntryOverflow
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    a = a.reshape(m, n)
    u = np.eye(m, dtype=np.int64)
    v = np.eye(n, dtype=np.int64)
    budget = 2**60

    def guard(*values):
        if any(abs(int(x)) > budget for x in values):
            raise _EntryOverflow

    t = 0
    while t < min(m, n):
        block = a[t:, t:]
        nz = np.nonzero(block)
        if len(nz[0]) == 0:
            break
        flat = np.abs(block[nz])
        k = int(np.argmin(flat))
        pi, pj = int(nz[0][k]) + t, int(nz[1][k]) + t
        a[[t, pi]] = a[[pi, t]]
        u[[t, pi]] = u[[pi, t]]
        a[:, [t, pj]] = a[:, [pj, t]]
        v[:, [t, pj]] = v[:, [pj, t]]

        pivot = int(a[t, t])
        col = a[t + 1:, t]
        row = a[t, t + 1:]
        done = True
        if col.any():
            q = col // pivot
            guard(int(np.abs(q).max(initial=0)) * max(int(np.abs(a).max()), int(np.abs(u).max())))
            a[t + 1:, :] -= q[:, None] * a[t, :]
            u[t + 1:, :] -= q[:, None] * u[t, :]
            if a[t + 1:, t].any():
                done = False
        if row.any():
            q = a[t, t + 1:] // pivot
            guard(int(np.abs(q).max(initial=0)) * max(int(np.abs(a).max()), int(np.abs(v).max())))
            a[:, t + 1:] -= a[:, t][:, None] * q[None, :]
            v[:, t + 1:] -= v[:, t][:, None] * q[None, :]
            if a[t, t + 1:].any():
                done = False
        guard(int(np.abs(a).max(initial=0)), int(np.abs(u).max(initial=0)),
              int(np.abs(v).max(initial=0)))
        if not done:
            continue
        rest = a[t + 1:, t + 1:]
        if rest.size and (rest % pivot).any():
            bad = int(np.nonzero((rest % pivot).any(axis=1))[0][0]) + t + 1
            a[t, :] += a[bad, :]
            u[t, :] += u[bad, :]
            continue
        if a[t, t] < 0:
            a[t, :] = -a[t, :]
            u[t, :] = -u[t, :]
        t += 1

    diag = tuple(int(a[i, i]) for i in range(min(m, n)) if a[i, i] != 0)
    return SNF(diag, len(diag),
               tuple(tuple(int(x) for x in r) for r in u),
               tuple(tuple(int(x) for x in r) for r in v))


def _snf_python(matrix) -> SNF:
    a = [list(map(int, row)) for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0 and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        done = True
        for i in range(t + 1, m):
            if a[i][t] != 0:
                add_row(i, t, -(a[i][t] // a[t][t]))
                if a[i][t] != 0:
                    done = False
        for j in range(t + 1, n):
            if a[t][j] != 0:
                add_col(j, t, -(a[t][j] // a[t][t]))
                if a[t][j] != 0:
                    done = False
        if not done:
            continue
        # force divisibility of the rest of the block by the pivot
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % a[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        if a[t][t] < 0:
            negate_row(t)
        t += 1

    diag = tuple(a[i][i] for i in range(min(m, n)) if a[i][i] != 0)
    return SNF(diag, len(diag),
               tuple(tuple(r) for r in u), tuple(tuple(r) for r in v))


def in_row_lattice(matrix, vector) -> bool:
    """Is `vector` an integer combination of the rows of `matrix`?"""
    if not matrix:
        return all(x == 0 for x in vector)
    snf = smith_normal_form(matrix)
    n = len(matrix[0])
    if len(vector) != n:
        raise ValueError("length mismatch")
    # y A = v  <=>  z D = v V with integer z
    vv = [sum(vector[i] * snf.col_transform[i][j] for i in range(n)) for j in range(n)]
    for j, d in enumerate(snf.diagonal):
        if vv[j] % d != 0:
            return False
    return all(x == 0 for x in vv[len(snf.diagonal):])


# ---------------------------------------------------------------------------
# homology


@dataclass(frozen=True)
class HomologyClass:
    free_rank: int
    torsion: tuple[int, ...]

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        groups: dict[int, int] = {}
        for d in self.torsion:
            groups[d] = groups.get(d, 0) + 1
        for d in sorted(groups):
            c = groups[d]
            parts.append(f"Z_{d}" if c == 1 else f"Z_{d}^{c}")
        return " (+) ".join(parts) if parts else "0"


def homology_h1(p: FPGroup, warn_unexpected_torsion: bool = False) -> HomologyClass:
    """Cokernel of the abelianization matrix as free rank plus torsion."""
    snf = smith_normal_form(abelianization_matrix(p))
    torsion = tuple(d for d in snf.diagonal if d > 1)
    if warn_unexpected_torsion and any(d != 2 for d in torsion):
        warnings.warn(f"unexpected torsion factors {torsion}; graph pipelines "
                      "should only produce Z_2 torsion", stacklevel=2)
    return HomologyClass(len(p.generators) - snf.rank, torsion)
