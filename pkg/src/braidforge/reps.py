"""Unitary representations of finitely presented groups.

A representation assigns a k x k unitary to each generator; relators then
evaluate to matrices whose Frobenius distance from the identity measures how
far the assignment is from a representation point.  The solver runs
projected gradient descent over products of unitary groups with a polar
retraction after every step, restarted from seeded Haar-random points.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import NoRepresentationFound, ValidationError
from .presentation import FPGroup

UNITARITY_TOL = 1e-10


@dataclass
class UnitaryAssignment:
    k: int
    matrices: dict[str, np.ndarray]

    def __post_init__(self):
        checked = {}
        for name, mat in self.matrices.items():
            mat = np.asarray(mat, dtype=complex)
            if mat.shape != (self.k, self.k):
                raise ValidationError(f"matrix for {name} is not {self.k}x{self.k}")
            if unitarity_defect(mat) > UNITARITY_TOL:
                raise ValidationError(f"matrix for {name} is not unitary "
                                      f"(defect {unitarity_defect(mat):.2e})")
            checked[name] = mat
        self.matrices = checked

    def conjugated(self, v: np.ndarray) -> "UnitaryAssignment":
        return UnitaryAssignment(self.k, {name: v @ m @ v.conj().T
                                          for name, m in self.matrices.items()})

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "matrices": {name: [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
                         for name, m in sorted(self.matrices.items())},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "UnitaryAssignment":
        k = int(data["k"])
        mats = {}
        for name, entries in data["matrices"].items():
            flat = np.array([complex(re, im) for re, im in entries])
            if flat.size != k * k:
                raise ValidationError(f"matrix for {name} has {flat.size} entries, needs {k * k}")
            mats[name] = flat.reshape(k, k)
        return cls(k, mats)


def unitarity_defect(mat: np.ndarray) -> float:
    k = mat.shape[0]
    return float(np.linalg.norm(mat.conj().T @ mat - np.eye(k)))


def eval_word(word, assignment: UnitaryAssignment, generators) -> np.ndarray:
    """Ordered product over the word; inverses are conjugate transposes."""
    out = np.eye(assignment.k, dtype=complex)
    for x in word:
        name = generators[abs(x) - 1]
        if name not in assignment.matrices:
            raise ValidationError(f"no matrix assigned to generator {name}")
        m = assignment.matrices[name]
        out = out @ (m if x > 0 else m.conj().T)
    return out


@dataclass
class ResidualReport:
    deviations: list[float]
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviations, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def verify_representation(p: FPGroup, assignment: UnitaryAssignment,
                          tol: float = 1e-8) -> ResidualReport:
    eye = np.eye(assignment.k)
    devs = [float(np.linalg.norm(eval_word(r, assignment, p.generators) - eye))
            for r in p.relators]
    return ResidualReport(devs, tol)


# ---------------------------------------------------------------------------
# solver


def haar_unitary(k: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def polar_retract(mat: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(mat)
    return u @ vh


def _loss_and_grads(relators, mats: list[np.ndarray], k: int):
    """Sum of squared Frobenius residuals and its Euclidean gradients.

    For a relator word with letter matrices A_1..A_L and residual M = prod - I,
    the gradient contribution at letter j is P^dag M S^dag with P, S the
    products before and after the letter (transposed into the variable when
    the letter is an inverse)."""
    loss = 0.0
    grads = [np.zeros((k, k), dtype=complex) for _ in mats]
    eye = np.eye(k)
    for rel in relators:
        letters = [(abs(x) - 1, x > 0) for x in rel]
        factors = [mats[g] if pos else mats[g].conj().T for g, pos in letters]
        prefix = [eye]
        for f in factors:
            prefix.append(prefix[-1] @ f)
        suffix = [eye]
        for f in reversed(factors):
            suffix.append(f @ suffix[-1])
        suffix.reverse()
        m = prefix[-1] - eye
        loss += float(np.linalg.norm(m) ** 2)
        for j, (g, pos) in enumerate(letters):
            y = prefix[j].conj().T @ m @ suffix[j + 1].conj().T
            grads[g] += y if pos else y.conj().T
    return loss, grads


@dataclass
class SolveOptions:
    restarts: int = 20
    iterations: int = 2000
    step: float = 0.2
    step_decay: float = 0.002
    tol: float = 1e-8


@dataclass
class SolveOutcome:
    assignment: UnitaryAssignment
    report: ResidualReport
    seed: int
    restart: int
    restart_seeds: list[int] = field(default_factory=list)


def _solve_one(p: FPGroup, k: int, seed: int, opts: SolveOptions):
    rng = np.random.default_rng(seed)
    mats = [haar_unitary(k, rng) for _ in p.generators]
    if not p.relators:
        return mats, 0.0
    step = opts.step
    for it in range(opts.iterations):
        loss, grads = _loss_and_grads(p.relators, mats, k)
        if loss < (opts.tol * 0.1) ** 2:
            break
        eta = step / (1.0 + opts.step_decay * it)
        mats = [polar_retract(m - eta * g) for m, g in zip(mats, grads)]
    return mats, _loss_and_grads(p.relators, mats, k)[0]


def worker_count() -> int:
    cap = os.environ.get("BRAIDFORGE_THREADS")
    if cap is None:
        return 1
    return max(1, int(cap))


def solve_representation(p: FPGroup, k: int, seed: int = 0,
                         opts: SolveOptions | None = None) -> SolveOutcome:
    """Best-of-restarts local minimization; deterministic in `seed`.

    Restarts are independent (restart i uses seed + i) and may run on a
    thread pool capped by BRAIDFORGE_THREADS; results merge by best residual
    with ties broken by restart index, so parallelism cannot change the
    answer."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    opts = opts or SolveOptions()
    restart_seeds = [seed + i for i in range(opts.restarts)]

    def run(i):
        return i, _solve_one(p, k, restart_seeds[i], opts)

    workers = worker_count()
    results = []
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(opts.restarts)))
    else:
        results = [run(i) for i in range(opts.restarts)]
    best_i, (best_mats, best_loss) = min(results, key=lambda t: (t[1][1], t[0]))

    assignment = UnitaryAssignment(
        k, {name: polar_retract(m) for name, m in zip(p.generators, best_mats)})
    report = verify_representation(p, assignment, opts.tol)
    if not report.passed:
        raise NoRepresentationFound(
            f"no representation found at tolerance {opts.tol} after "
            f"{opts.restarts} restarts (best residual {report.max_deviation:.3e}); "
            "this is not a nonexistence proof")
    return SolveOutcome(assignment, report, seed, best_i, restart_seeds)


# ---------------------------------------------------------------------------
# locally abelian ansatz


@dataclass
class PhaseConstraint:
    """Integer congruence sum_j coefficients[j] * phi_j = 0 (mod 2 pi)."""
    coefficients: tuple[int, ...]

    def __str__(self) -> str:
        return " + ".join(f"{c}*phi_{j + 1}" for j, c in enumerate(self.coefficients)
                          if c != 0) + " = 0 (mod 2pi)"


@dataclass
class LocallyAbelianAnsatz:
    phase_generators: list[str]          # Y loops, scalar e^{i phi} 1
    free_unitaries: list[str]            # O loops, unconstrained unless residual
    constraints: list[PhaseConstraint]
    trivial_relators: list[str]          # identically satisfied under the ansatz
    residual_relators: list[tuple[str, tuple[int, ...], tuple[int, ...]]]
    # (origin, phase coefficient vector, O-letter word over O indices)


def _normalize_constraint(vec) -> tuple[int, ...] | None:
    from math import gcd
    g = 0
    for x in vec:
        g = gcd(g, abs(x))
    if g == 0:
        return None
    out = [x // g for x in vec]
    for x in out:
        if x != 0:
            if x < 0:
                out = [-y for y in out]
            break
    return tuple(out)


def locally_abelian_solve(pp) -> LocallyAbelianAnsatz:
    """Scalar phases on Y loops, free unitaries on O loops.

    Scalars are central, so every relator splits into a net phase and the
    O-letter subword.  If the subword freely cancels the relator is a pure
    phase congruence (or trivially satisfied); otherwise it is returned as a
    residual matrix equation."""
    y_idx = [i for i, lg in enumerate(pp.loops) if lg.kind == "Y"]
    o_idx = [i for i, lg in enumerate(pp.loops) if lg.kind == "O"]
    y_pos = {gi: j for j, gi in enumerate(y_idx)}
    o_pos = {gi: j for j, gi in enumerate(o_idx)}

    constraints: list[PhaseConstraint] = []
    trivial: list[str] = []
    residual = []
    seen: set[tuple[int, ...]] = set()
    for origin, rel in pp.relators:
        phases = [0] * len(y_idx)
        o_word: list[int] = []
        for x in rel:
            gi = abs(x) - 1
            if gi in y_pos:
                phases[y_pos[gi]] += 1 if x > 0 else -1
            else:
                j = o_pos[gi] + 1
                letter = j if x > 0 else -j
                if o_word and o_word[-1] == -letter:
                    o_word.pop()
                else:
                    o_word.append(letter)
        if o_word:
            residual.append((origin, tuple(phases), tuple(o_word)))
            continue
        norm = _normalize_constraint(phases)
        if norm is None:
            trivial.append(origin)
        elif norm not in seen:
            seen.add(norm)
            constraints.append(PhaseConstraint(norm))

    return LocallyAbelianAnsatz(
        phase_generators=[pp.loops[i].name for i in y_idx],
        free_unitaries=[pp.loops[i].name for i in o_idx],
        constraints=constraints, trivial_relators=trivial,
        residual_relators=residual)


def locally_abelian_assignment(pp, phases, unitaries, k: int) -> UnitaryAssignment:
    """Build the full assignment from Y-loop phases and O-loop unitaries."""
    mats: dict[str, np.ndarray] = {}
    pi = 0
    for lg in pp.loops:
        if lg.kind == "Y":
            mats[lg.name] = np.exp(1j * phases[pi]) * np.eye(k)
            pi += 1
        else:
            mats[lg.name] = np.asarray(unitaries[lg.name], dtype=complex)
    return UnitaryAssignment(k, mats)


# ---------------------------------------------------------------------------
# component classification for single-commutator presentations


@dataclass(frozen=True)
class ComponentLabel:
    kind: str                     # "M0", "MP" or "MPd"
    permutation: tuple[int, ...] | None = None
    degeneracy: int | None = None

    def __str__(self) -> str:
        if self.kind == "M0":
            return "M_0"
        perm = "(" + ",".join(map(str, self.permutation)) + ")"
        if self.kind == "MP":
            return f"M_P{perm}"
        return f"M_P{perm}^({self.degeneracy})"


def classify_theta_component(p: FPGroup, assignment: UnitaryAssignment,
                             tol: float = 1e-8, degeneracy_tol: float = 1e-6,
                             exchange: str | None = None) -> ComponentLabel:
    """Connected-component label for a verified point of a single-relator,
    commutator-shaped presentation.

    The exchange generator (the one whose matrix spectrum is inspected)
    defaults to the first letter of the relator; the conjugator is the
    product of the remaining generators in presentation order.  A scalar
    exchange matrix lands in the unique component M_0; a nondegenerate
    spectrum labels a permutation component M_P; partial degeneracy gives
    the block variant."""
    if len(p.relators) != 1:
        raise ValidationError("component classification needs exactly one relator")
    report = verify_representation(p, assignment, tol)
    if not report.passed:
        raise ValidationError(
            f"assignment fails verification (max residual {report.max_deviation:.3e})")
    if exchange is None:
        exchange = p.generators[abs(p.relators[0][0]) - 1]
    if exchange not in p.generators:
        raise ValidationError(f"unknown exchange generator {exchange}")
    others = [g for g in p.generators if g != exchange]

    u_gamma = assignment.matrices[exchange]
    conj = np.eye(assignment.k, dtype=complex)
    for g in others:
        conj = conj @ assignment.matrices[g]

    eigvals, eigvecs = np.linalg.eig(u_gamma)
    order = np.argsort(np.mod(np.angle(eigvals), 2 * np.pi), kind="stable")
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    # cluster eigenvalues on the unit circle
    clusters: list[list[int]] = []
    for i, lam in enumerate(eigvals):
        if clusters and abs(lam - eigvals[clusters[-1][-1]]) <= degeneracy_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    if len(clusters) > 1 and abs(eigvals[clusters[0][0]] - eigvals[clusters[-1][-1]]) <= degeneracy_tol:
        clusters[0] = clusters.pop() + clusters[0]

    if len(clusters) == 1:
        return ComponentLabel("M0")

    # permutation induced on eigenvalue clusters by conjugation
    b = eigvecs.conj().T @ conj @ eigvecs
    weight = np.abs(b) ** 2
    perm = []
    for cl in clusters:
        mass = [sum(weight[i, j] for i in target for j in cl)
                for target in clusters]
        perm.append(int(np.argmax(mass)))
    if sorted(perm) != list(range(len(clusters))):
        raise ValidationError("conjugation does not permute eigenspaces cleanly")

    if all(len(cl) == 1 for cl in clusters):
        return ComponentLabel("MP", tuple(perm))
    d = max(len(cl) for cl in clusters)
    return ComponentLabel("MPd", tuple(perm), d)
