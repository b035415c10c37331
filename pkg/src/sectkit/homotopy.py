"""Integral homology of nerves via exact Smith normal form.

Normalized chain complexes of truncated simplicial sets, Smith normal form
over the integers (arbitrary precision; torsion is reported exactly), and the
three-valued contractibility verdict used by the resolution diagnostics:
an initial or terminal object certifies contractibility, homology can only
certify the negative or provide evidence up to the truncation depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .config import DEFAULT_CAP, DEFAULT_DEPTH
from .deltacat import TruncatedSSet, collapse, nerve, skip
from .errors import TruncationBudgetError, ValidationError
from .fincat import FinCat, find_initial, find_terminal, guard_cap


# -- sparse integer matrices ---------------------------------------------------


class IntMatrix:
    """A sparse integer matrix with explicit shape."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict[tuple[int, int], int]):
        self.rows = rows
        self.cols = cols
        self.entries = {k: v for k, v in entries.items() if v != 0}

    def __getitem__(self, rc: tuple[int, int]) -> int:
        return self.entries.get(rc, 0)

    def nnz(self) -> int:
        return len(self.entries)

    def multiply(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValidationError("matrix shapes do not compose")
        by_row: dict[int, dict[int, int]] = {}
        for (r, c), v in self.entries.items():
            by_row.setdefault(r, {})[c] = v
        by_col: dict[int, dict[int, int]] = {}
        for (r, c), v in other.entries.items():
            by_col.setdefault(c, {})[r] = v
        out: dict[tuple[int, int], int] = {}
        for r, row in by_row.items():
            for c, col in by_col.items():
                s = sum(row[k] * col[k] for k in row.keys() & col.keys())
                if s:
                    out[(r, c)] = s
        return IntMatrix(self.rows, other.cols, out)

    def is_zero(self) -> bool:
        return not self.entries


def smith_invariant_factors(mat: IntMatrix) -> list[int]:
    """Invariant factors d1 | d2 | ... of an integer matrix, exactly.

    A sparse pass eliminates unit pivots first (boundary matrices are almost
    entirely made of them), then the small remainder goes through the dense
    textbook algorithm.
    """
    row_data: dict[int, dict[int, int]] = {}
    col_data: dict[int, dict[int, int]] = {}
    for (r, c), v in mat.entries.items():
        row_data.setdefault(r, {})[c] = v
        col_data.setdefault(c, {})[r] = v
    units = 0
    while True:
        pivot = None
        best = None
        for r, row in row_data.items():
            for c, v in row.items():
                if v in (1, -1):
                    fill = (len(row) - 1) * (len(col_data[c]) - 1)
                    if best is None or fill < best:
                        best = fill
                        pivot = (r, c)
                    if fill == 0:
                        break
            if best == 0:
                break
        if pivot is None:
            break
        r0, c0 = pivot
        pv = row_data[r0][c0]
        prow = dict(row_data[r0])
        for r in list(col_data[c0].keys()):
            if r == r0:
                continue
            mult = col_data[c0][r] * pv  # v / pivot with pivot = +-1
            for c, v in prow.items():
                new = row_data[r].get(c, 0) - mult * v
                if new:
                    row_data[r][c] = new
                    col_data[c][r] = new
                else:
                    row_data[r].pop(c, None)
                    col_data[c].pop(r, None)
                    if not col_data[c]:
                        del col_data[c]
            if r in row_data and not row_data[r]:
                del row_data[r]
        # pivot row is now alone in its column; drop the pair entirely
        for c in prow:
            col_data.get(c, {}).pop(r0, None)
            if c in col_data and not col_data[c]:
                del col_data[c]
        del row_data[r0]
        units += 1
    # densify the remainder
    rest_rows = sorted(row_data.keys())
    rest_cols = sorted({c for row in row_data.values() for c in row})
    ridx = {r: i for i, r in enumerate(rest_rows)}
    cidx = {c: i for i, c in enumerate(rest_cols)}
    dense = [[0] * len(rest_cols) for _ in rest_rows]
    for r, row in row_data.items():
        for c, v in row.items():
            dense[ridx[r]][cidx[c]] = v
    return [1] * units + _dense_snf(dense)


def _dense_snf(a: list[list[int]]) -> list[int]:
    m = len(a)
    n = len(a[0]) if a else 0
    factors: list[int] = []
    top = 0
    while True:
        pr = pc = None
        best = None
        for i in range(top, m):
            for j in range(top, n):
                v = abs(a[i][j])
                if v and (best is None or v < best):
                    best, pr, pc = v, i, j
        if pr is None:
            break
        a[top], a[pr] = a[pr], a[top]
        for row in a:
            row[top], row[pc] = row[pc], row[top]
        while True:
            changed = False
            for i in range(top + 1, m):
                if a[i][top]:
                    q = a[i][top] // a[top][top]
                    for j in range(top, n):
                        a[i][j] -= q * a[top][j]
                    if a[i][top]:
                        a[top], a[i] = a[i], a[top]
                        changed = True
            for j in range(top + 1, n):
                if a[top][j]:
                    q = a[top][j] // a[top][top]
                    for i in range(top, m):
                        a[i][j] -= q * a[i][top]
                    if a[top][j]:
                        for i in range(top, m):
                            a[i][top], a[i][j] = a[i][j], a[i][top]
                        changed = True
            if not changed:
                break
        # ensure the pivot divides the rest of the block
        piv = abs(a[top][top])
        offender = None
        for i in range(top + 1, m):
            for j in range(top + 1, n):
                if a[i][j] % piv:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            for j in range(top, n):
                a[top][j] += a[offender][j]
            continue
        factors.append(piv)
        top += 1
    return factors


def matrix_rank(mat: IntMatrix) -> int:
    return len(smith_invariant_factors(mat))


# -- chain complexes -------------------------------------------------------------


@dataclass(frozen=True)
class ChainComplex:
    """Normalized chains: bases are nondegenerate simplices, boundaries integral.

    ``boundary[i]`` maps degree-i chains to degree i-1 (for 1 <= i <= depth);
    the square-zero law is asserted at construction.
    """

    depth: int
    basis: tuple[tuple[str, ...], ...]
    boundary: tuple[IntMatrix, ...]

    def rank(self, i: int) -> int:
        return len(self.basis[i]) if 0 <= i <= self.depth else 0


def nondegenerate_indices(x: TruncatedSSet, n: int) -> list[int]:
    """Indices of simplices at level n not hit by any degeneracy map."""
    if n == 0:
        return list(range(x.size(0)))
    degenerate: set[int] = set()
    for i in range(n):
        degenerate.update(x.action(collapse(n, i)))
    return [k for k in range(x.size(n)) if k not in degenerate]


def normalized_chains(x: TruncatedSSet, depth: int = DEFAULT_DEPTH,
                      cap: int = DEFAULT_CAP) -> ChainComplex:
    """The normalized chain complex of a truncated simplicial set.

    Boundaries are alternating face sums with degenerate faces dropped; the
    composite of consecutive boundaries is asserted to vanish.
    """
    if depth > x.N:
        raise TruncationBudgetError(
            f"chains to depth {depth} need truncation >= {depth}, have {x.N}")
    nondeg = [nondegenerate_indices(x, n) for n in range(depth + 1)]
    guard_cap("chain basis", sum(len(b) for b in nondeg), cap)
    pos = [{k: j for j, k in enumerate(level)} for level in nondeg]
    basis = tuple(tuple(x.simplices[n][k] for k in level)
                  for n, level in enumerate(nondeg))
    boundaries: list[IntMatrix] = []
    for n in range(1, depth + 1):
        entries: dict[tuple[int, int], int] = {}
        faces = [x.action(skip(n, i)) for i in range(n + 1)]
        for j, k in enumerate(nondeg[n]):
            for i in range(n + 1):
                fk = faces[i][k]
                if fk in pos[n - 1]:
                    r = pos[n - 1][fk]
                    entries[(r, j)] = entries.get((r, j), 0) + (-1) ** i
        boundaries.append(IntMatrix(len(nondeg[n - 1]), len(nondeg[n]), entries))
    for n in range(1, depth):
        if not boundaries[n - 1].multiply(boundaries[n]).is_zero():
            raise ValidationError(f"boundary squared is nonzero in degree {n + 1}")
    return ChainComplex(depth, basis, tuple(boundaries))


@dataclass(frozen=True)
class HomologyResult:
    """Betti numbers and torsion coefficients per degree.

    Degrees above ``valid_to`` are artifacts of the truncation and are
    excluded from comparisons.
    """

    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]
    valid_to: int

    def describe(self, i: int) -> str:
        parts = ["Z"] * self.betti[i] + [f"Z/{t}" for t in self.torsion[i]]
        return " + ".join(parts) if parts else "0"


def homology(cc: ChainComplex) -> HomologyResult:
    """Integral homology from Smith normal forms of the boundary matrices."""
    factors = [smith_invariant_factors(b) for b in cc.boundary]
    ranks = [len(f) for f in factors]
    betti = []
    torsion = []
    for i in range(cc.depth + 1):
        rank_i = ranks[i - 1] if i >= 1 else 0            # rank of d_i: C_i -> C_{i-1}
        rank_next = ranks[i] if i < len(ranks) else 0     # rank of d_{i+1}
        betti.append(cc.rank(i) - rank_i - rank_next)
        if i < len(factors):
            torsion.append(tuple(f for f in factors[i] if f > 1))
        else:
            torsion.append(())
    for i, b in enumerate(betti):
        if b < 0:
            raise ValidationError(f"negative betti number in degree {i}")
    for f in factors:
        for a, b in zip(f, f[1:]):
            if b % a:
                raise ValidationError("invariant factors do not divide in sequence")
    return HomologyResult(tuple(betti), tuple(torsion), cc.depth - 1)


def homology_of_sset(x: TruncatedSSet, depth: int = DEFAULT_DEPTH,
                     cap: int = DEFAULT_CAP) -> HomologyResult:
    return homology(normalized_chains(x, depth, cap))


@dataclass(frozen=True)
class HomologyComparison:
    equal: bool
    compared_to: int
    detail: str = ""


def homology_equal(x: TruncatedSSet, y: TruncatedSSet, depth: int = DEFAULT_DEPTH,
                   cap: int = DEFAULT_CAP) -> HomologyComparison:
    """Equality of homology in the mutually valid range of degrees."""
    dx = min(depth, x.N)
    dy = min(depth, y.N)
    hx = homology_of_sset(x, dx, cap)
    hy = homology_of_sset(y, dy, cap)
    upto = min(hx.valid_to, hy.valid_to)
    for i in range(upto + 1):
        if hx.betti[i] != hy.betti[i] or hx.torsion[i] != hy.torsion[i]:
            return HomologyComparison(
                False, upto,
                f"degree {i}: {hx.describe(i)} vs {hy.describe(i)}")
    return HomologyComparison(True, upto)


# -- contractibility verdicts ------------------------------------------------------


CERTIFIED = "CERTIFIED_CONTRACTIBLE"
HOMOLOGY_TRIVIAL = "HOMOLOGY_TRIVIAL"
NOT_CONTRACTIBLE = "NOT_CONTRACTIBLE"
EMPTY = "EMPTY"


@dataclass(frozen=True)
class ContractibilityVerdict:
    """Outcome of the contractibility ladder.

    CERTIFIED_CONTRACTIBLE when an initial or terminal object exists;
    HOMOLOGY_TRIVIAL(depth) records necessary evidence only and is never
    upgraded; NOT_CONTRACTIBLE carries a homological witness; EMPTY follows
    the reduced-homology convention (the empty category is not contractible).
    """

    kind: str
    depth: int
    witness: str = ""
    result: Optional[HomologyResult] = None

    @property
    def certified(self) -> bool:
        return self.kind == CERTIFIED

    @property
    def refuted(self) -> bool:
        return self.kind in (NOT_CONTRACTIBLE, EMPTY)


def contractibility(c: FinCat, depth: int = DEFAULT_DEPTH,
                    cap: int = DEFAULT_CAP) -> ContractibilityVerdict:
    """Decide contractibility of the nerve as far as the ladder allows."""
    if c.n_objects() == 0:
        return ContractibilityVerdict(EMPTY, depth, witness="no objects")
    if find_initial(c).object is not None:
        return ContractibilityVerdict(CERTIFIED, depth, witness="initial object")
    if find_terminal(c).object is not None:
        return ContractibilityVerdict(CERTIFIED, depth, witness="terminal object")
    res = homology_of_sset(nerve(c, depth, cap), depth, cap)
    if res.betti[0] != 1:
        return ContractibilityVerdict(
            NOT_CONTRACTIBLE, depth, witness=f"H0 has rank {res.betti[0]}", result=res)
    for i in range(1, res.valid_to + 1):
        if res.betti[i] or res.torsion[i]:
            return ContractibilityVerdict(
                NOT_CONTRACTIBLE, depth, witness=f"H{i} = {res.describe(i)}", result=res)
    return ContractibilityVerdict(HOMOLOGY_TRIVIAL, depth, result=res)
