"""Word rewriting through the Morse matching and presentation assembly.

Three moves reduce any edge-path word to an invariant word over critical
1-cells: free cancellation of adjacent inverse letters, deletion of
collapsible letters, and the simple homotopy that replaces a redundant
letter by the rest of the boundary square it is matched with.  The move
kinds are tried in that priority order, leftmost occurrence first, purely
for reproducibility of traces; the final word does not depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cells import (COLLAPSIBLE, REDUNDANT, Cell, CellWord, CubeComplex,
                    inverse_word, word_str)
from .errors import MatchingError, RewriteLimitError

DEFAULT_MAX_STEPS = 10**6


@dataclass
class RewriteStep:
    move: str                   # free_cancel | collapse | simple_homotopy
    position: int
    cells: tuple[Cell, ...]


@dataclass
class RewriteTrace:
    input: CellWord
    output: CellWord
    steps: list[RewriteStep] = field(default_factory=list)


def rewrite_word(cx: CubeComplex, word, max_steps: int = DEFAULT_MAX_STEPS) -> RewriteTrace:
    """Reduce `word` to the invariant word over critical 1-cells."""
    current = list(word)
    trace = RewriteTrace(input=tuple(word), output=())
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise RewriteLimitError(
                f"rewriting exceeded {max_steps} steps; the matching is "
                "probably broken (raise --max-steps only if you are sure)")

        moved = False
        for j in range(len(current) - 1):
            (c1, s1), (c2, s2) = current[j], current[j + 1]
            if c1 == c2 and s1 == -s2:
                trace.steps.append(RewriteStep("free_cancel", j, (c1,)))
                del current[j:j + 2]
                moved = True
                break
        if moved:
            continue

        kinds = [cx.classify(c).kind for c, _ in current]

        if COLLAPSIBLE in kinds:
            j = kinds.index(COLLAPSIBLE)
            trace.steps.append(RewriteStep("collapse", j, (current[j][0],)))
            del current[j]
            continue

        if REDUNDANT in kinds:
            j = kinds.index(REDUNDANT)
            sigma, sign = current[j]
            tau = cx.matching_image(sigma)
            boundary = cx.boundary_word(tau)
            occ = [i for i, (c, _) in enumerate(boundary) if c == sigma]
            if len(occ) != 1:
                raise MatchingError(
                    f"{sigma} occurs {len(occ)} times in the boundary of its "
                    f"matched 2-cell {tau}")
            i = occ[0]
            eps = boundary[i][1]
            rest = boundary[i + 1:] + boundary[:i]
            # sigma^eps * rest is null-homotopic, so sigma = rest^(-eps)
            replacement = rest if eps * sign < 0 else inverse_word(rest)
            trace.steps.append(RewriteStep("simple_homotopy", j, (sigma, tau)))
            current[j:j + 1] = list(replacement)
            continue

        break

    trace.output = tuple(current)
    return trace


@dataclass
class MorsePresentation:
    generators: list[Cell]                      # critical 1-cells, canonical order
    relators: list[tuple[tuple[int, ...], Cell]]  # (signed index word, source 2-cell)

    @property
    def generator_names(self) -> list[str]:
        return [str(c) for c in self.generators]

    def __str__(self) -> str:
        gens = ", ".join(map(str, self.generators))
        rels = ", ".join(word_str(self.index_word_to_cells(w)) for w, _ in self.relators)
        return f"⟨{gens} | {rels}⟩"

    def index_word_to_cells(self, word) -> CellWord:
        return tuple((self.generators[abs(x) - 1], 1 if x > 0 else -1) for x in word)


def cell_word_to_indices(word: CellWord, generators: list[Cell]) -> tuple[int, ...]:
    index = {c: i + 1 for i, c in enumerate(generators)}
    out = []
    for c, s in word:
        if c not in index:
            raise MatchingError(f"{c} is not a critical generator")
        out.append(s * index[c])
    return tuple(out)


def morse_presentation(cx: CubeComplex, max_steps: int = DEFAULT_MAX_STEPS) -> MorsePresentation:
    """Generators are the critical 1-cells; every critical 2-cell contributes
    its rewritten boundary word as a relator."""
    cx.assert_unique_critical_zero_cell()
    generators = cx.critical_cells(1)
    relators = []
    for tau in cx.critical_cells(2):
        reduced = rewrite_word(cx, cx.boundary_word(tau), max_steps).output
        relators.append((cell_word_to_indices(reduced, generators), tau))
    return MorsePresentation(generators, relators)
