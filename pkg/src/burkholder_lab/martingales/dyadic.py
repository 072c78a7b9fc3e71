"""Exact expectations over dyadic martingales: transforms, Haar sums, Burkholder's U.

A `DyadicTree` of depth n is a martingale on 2^n equally likely leaves. At a
node of level k the next increment is +a or -a with probability 1/2 each, so
every node stores a single vector a. A `TransformSpec` stores its multipliers
on the same nodes: the multiplier of the increment leaving a node is fixed at
that node, which is exactly predictability. Expectations are plain means over
the nodes of a level; nothing is sampled.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from burkholder_lab.constants import ExponentContext, choi_bracket, p_star
from burkholder_lab.errors import DomainError
from burkholder_lab.functions import eval_U, eval_V
from burkholder_lab.sampling import block_generators

logger = logging.getLogger(__name__)

MAX_DEPTH = 12
MAX_SEARCH_DEPTH = 10
# Relative slack on the zero-tolerance inequalities; only float rounding lives below it.
ROUNDING = 1e-12


# --------------------------------------------------------------------------- #
# Haar system
# --------------------------------------------------------------------------- #


def haar_matrix(count: int) -> np.ndarray:
    """The first `count` Haar functions sampled on the finest dyadic cells they need.

    Row 0 is the constant 1; then level by level, h_{n,j} is +1 on the left half
    of [j 2^-n, (j+1) 2^-n) and -1 on the right half.
    """
    if count < 1:
        raise DomainError("at least one Haar coefficient is required")
    levels = max(1, int(np.ceil(np.log2(count)))) if count > 1 else 0
    cells = 2**levels
    rows = [np.ones(cells)]
    for n in range(levels):
        width = cells // 2**n
        for j in range(2**n):
            if len(rows) == count:
                break
            row = np.zeros(cells)
            row[j * width : j * width + width // 2] = 1.0
            row[j * width + width // 2 : (j + 1) * width] = -1.0
            rows.append(row)
    return np.array(rows[:count])


def haar_paley_check(
    coefficients: list[float] | np.ndarray, signs: list[int] | np.ndarray, p: float
) -> tuple[float, float]:
    """(||sum eps_k a_k h_k||_p, (p*-1) ||sum a_k h_k||_p), integrated exactly on dyadic cells."""
    a = np.asarray(coefficients, dtype=float)
    eps = np.asarray(signs, dtype=float)
    if a.shape != eps.shape or a.ndim != 1:
        raise DomainError("coefficients and signs must be equal-length lists")
    if not np.all(np.abs(eps) == 1.0):
        raise DomainError("signs must be +1 or -1")
    star = p_star(p)
    h = haar_matrix(len(a))
    f = a @ h
    g = (eps * a) @ h
    lhs = float(np.mean(np.abs(g) ** p) ** (1.0 / p))
    rhs = (star - 1.0) * float(np.mean(np.abs(f) ** p) ** (1.0 / p))
    return lhs, rhs


# --------------------------------------------------------------------------- #
# Trees and transforms
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class DyadicTree:
    """Initial value d0 and, per level k, the up-branch increments of its 2^k nodes.

    increments[k] has shape (2^k, dim); the down branch is the negative, so
    each node's two increments average to zero. dim is 1 or 2.
    """

    d0: np.ndarray
    increments: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        d0 = np.atleast_1d(np.asarray(self.d0, dtype=float))
        if d0.shape[0] not in (1, 2):
            raise DomainError(f"tree values must have dimension 1 or 2, got {d0.shape[0]}")
        if len(self.increments) > MAX_DEPTH:
            raise DomainError(f"depth {len(self.increments)} exceeds the limit {MAX_DEPTH}")
        increments = []
        for k, level in enumerate(self.increments):
            level = np.asarray(level, dtype=float).reshape(2**k, -1)
            if level.shape[1] != d0.shape[0]:
                raise DomainError(f"level {k} increments have the wrong dimension")
            increments.append(level)
        object.__setattr__(self, "d0", d0)
        object.__setattr__(self, "increments", tuple(increments))

    @classmethod
    def from_branch_pairs(cls, d0: np.ndarray, pairs: list[np.ndarray]) -> DyadicTree:
        """Build from explicit (up, down) increments, shape (2^k, 2, dim) per level."""
        ups = []
        for k, level in enumerate(pairs):
            level = np.asarray(level, dtype=float)
            if not np.allclose(level[:, 0] + level[:, 1], 0.0, atol=1e-15):
                raise DomainError(f"level {k}: branch increments must average to zero")
            ups.append(level[:, 0])
        return cls(d0, tuple(ups))

    @property
    def depth(self) -> int:
        return len(self.increments)

    @property
    def dim(self) -> int:
        return int(self.d0.shape[0])


class TransformKind(StrEnum):
    SIGNS = "signs"
    INTERVAL = "interval"
    CHOI = "choi"
    MATRIX = "matrix"


@dataclass(frozen=True, eq=False)
class TransformSpec:
    """Predictable multipliers: v0 for d0, and values[k][node] for the increment leaving `node`.

    Scalar kinds store values[k] of shape (2^k,); the matrix kind stores
    (2^k, dim, dim) matrices of operator norm at most 1.
    """

    kind: TransformKind
    v0: Any
    values: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        kind = TransformKind(self.kind)
        object.__setattr__(self, "kind", kind)
        v0 = np.asarray(self.v0, dtype=float)
        values = tuple(np.asarray(level, dtype=float) for level in self.values)
        for level in (v0[None, ...], *values):
            self._check(kind, level)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "values", values)

    @staticmethod
    def _check(kind: TransformKind, level: np.ndarray) -> None:
        if kind is TransformKind.SIGNS and not np.all(np.abs(level) == 1.0):
            raise DomainError("sign transforms take the values +1 and -1")
        if kind is TransformKind.INTERVAL and np.any(np.abs(level) > 1.0):
            raise DomainError("interval transforms take values in [-1, 1]")
        if kind is TransformKind.CHOI and (np.any(level < 0.0) or np.any(level > 1.0)):
            raise DomainError("Choi transforms take values in [0, 1]")
        if kind is TransformKind.MATRIX:
            if level.ndim != 3 or level.shape[-1] != level.shape[-2]:
                raise DomainError("matrix transforms need square matrices per node")
            if np.any(np.linalg.norm(level, ord=2, axis=(-2, -1)) > 1.0 + ROUNDING):
                raise DomainError("matrix transforms need operator norm at most 1")

    def apply(self, v: np.ndarray, d: np.ndarray) -> np.ndarray:
        """v d for a batch of multipliers and increments (shape (m, dim))."""
        if self.kind is TransformKind.MATRIX:
            return np.einsum("mij,mj->mi", v, d)
        return v[..., None] * d


def _node_signs(level: int, depth_of_node: int) -> np.ndarray:
    """Branch sign (+1 up, -1 down) taken at `level` by each node of depth `depth_of_node`."""
    nodes = np.arange(2**depth_of_node)
    bit = (nodes >> (depth_of_node - 1 - level)) & 1
    return np.where(bit == 0, 1.0, -1.0)


def level_values(tree: DyadicTree, spec: TransformSpec, k: int) -> tuple[np.ndarray, np.ndarray]:
    """(f_k, g_k) at the 2^k nodes of level k, each of shape (2^k, dim)."""
    if len(spec.values) < tree.depth:
        raise DomainError("the transform has fewer levels than the tree")
    count = 2**k
    nodes = np.arange(count)
    f = np.tile(tree.d0, (count, 1))
    v0 = np.broadcast_to(spec.v0, (count, *spec.v0.shape))
    g = spec.apply(v0, f)
    for j in range(k):
        parent = nodes >> (k - j)
        d = _node_signs(j, k)[:, None] * tree.increments[j][parent]
        f = f + d
        g = g + spec.apply(spec.values[j][parent], d)
    return f, g


def _norm(values: np.ndarray) -> np.ndarray:
    return np.linalg.norm(values, axis=-1)


def exhaustive_transform_ratio(tree: DyadicTree, spec: TransformSpec, p: float) -> float:
    """(E|g_n|^p / E|f_n|^p)^(1/p) by enumerating all 2^n leaves."""
    f, g = level_values(tree, spec, tree.depth)
    numerator = float(np.mean(_norm(g) ** p))
    denominator = float(np.mean(_norm(f) ** p))
    if denominator == 0.0:
        raise DomainError("E|f_n|^p vanishes; the ratio is undefined")
    return (numerator / denominator) ** (1.0 / p)


def transform_bound(kind: TransformKind, p: float) -> float:
    """p* - 1 for the symmetric kinds, p*/2 (the upper end of the Choi bracket) for [0, 1]."""
    if TransformKind(kind) is TransformKind.CHOI:
        return choi_bracket(p)[1]
    return p_star(p) - 1.0


# --------------------------------------------------------------------------- #
# Random trees
# --------------------------------------------------------------------------- #


def random_tree(rng: np.random.Generator, depth: int, dim: int = 1) -> DyadicTree:
    d0 = rng.standard_normal(dim)
    increments = tuple(rng.standard_normal((2**k, dim)) for k in range(depth))
    return DyadicTree(d0, increments)


def random_transform(
    rng: np.random.Generator, depth: int, kind: TransformKind | str, dim: int = 1
) -> TransformSpec:
    kind = TransformKind(kind)

    def draw(shape: tuple[int, ...]) -> np.ndarray:
        if kind is TransformKind.SIGNS:
            return rng.choice([-1.0, 1.0], size=shape)
        if kind is TransformKind.INTERVAL:
            return rng.uniform(-1.0, 1.0, shape)
        if kind is TransformKind.CHOI:
            return rng.uniform(0.0, 1.0, shape)
        matrices = rng.standard_normal((*shape, dim, dim))
        norms = np.linalg.norm(matrices, ord=2, axis=(-2, -1))
        return matrices / np.maximum(norms, 1.0)[..., None, None]

    v0 = draw((1,))[0]
    return TransformSpec(kind, v0, tuple(draw((2**k,)) for k in range(depth)))


# --------------------------------------------------------------------------- #
# Supermartingale property of U
# --------------------------------------------------------------------------- #


class SupermartingaleReport(BaseModel):
    p: float
    depth: int
    expectations: list[float]
    final_v: float
    monotone: bool
    initial_nonpositive: bool
    final_ordered: bool

    @property
    def passed(self) -> bool:
        return self.monotone and self.initial_nonpositive and self.final_ordered


def _plane(values: np.ndarray) -> np.ndarray:
    if values.shape[-1] == 2:
        return values
    return np.concatenate([values, np.zeros_like(values)], axis=-1)


def supermartingale_check(
    tree: DyadicTree, spec: TransformSpec, ctx: ExponentContext
) -> SupermartingaleReport:
    """Track E U(f_k, g_k) over every level of the tree.

    Passes when the sequence is non-increasing and E V <= E U <= 0 holds at the
    last level.

    The initial condition is only asserted when |g_0| <= |f_0|, which every
    admissible multiplier guarantees.
    """
    expectations = []
    for k in range(tree.depth + 1):
        f, g = level_values(tree, spec, k)
        expectations.append(float(np.mean(eval_U(_plane(f), _plane(g), ctx))))
    f, g = level_values(tree, spec, tree.depth)
    final_v = float(np.mean(eval_V(_plane(f), _plane(g), ctx)))
    scale = max(1.0, max(abs(e) for e in expectations))
    slack = ROUNDING * scale
    monotone = all(b <= a + slack for a, b in zip(expectations, expectations[1:], strict=False))
    f0, g0 = level_values(tree, spec, 0)
    subordinate_start = bool(_norm(g0)[0] <= _norm(f0)[0])
    report = SupermartingaleReport(
        p=ctx.p,
        depth=tree.depth,
        expectations=expectations,
        final_v=final_v,
        monotone=monotone,
        initial_nonpositive=(not subordinate_start) or expectations[0] <= slack,
        final_ordered=final_v <= expectations[-1] + slack and expectations[-1] <= slack,
    )
    if not report.passed:
        logger.warning("supermartingale property failed at p=%s: %s", ctx.p, expectations)
    return report


# --------------------------------------------------------------------------- #
# Near-extremal search
# --------------------------------------------------------------------------- #


class SearchReport(BaseModel):
    p: float
    depth: int
    iterations: int
    best_ratio: float
    bound: float
    trajectory: list[float] = Field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(b >= a for a, b in zip(self.trajectory, self.trajectory[1:], strict=False))

    @property
    def passed(self) -> bool:
        return self.monotone and self.best_ratio <= self.bound * (1.0 + ROUNDING)


def near_extremal_search(
    p: float, depth: int, iterations: int, seed: int, *, block_count: int = 1
) -> SearchReport:
    """Accept-if-improved search for scalar trees and sign transforms with a large ratio.

    Each iteration either rescales one increment or flips one sign, so the
    search can shape asymmetric trees out of symmetric coin flips.
    """
    if not 1 <= depth <= MAX_SEARCH_DEPTH:
        raise DomainError(f"search depth must lie in 1..{MAX_SEARCH_DEPTH}, got {depth}")
    rng = block_generators(seed, block_count)[0]
    tree = random_tree(rng, depth)
    spec = random_transform(rng, depth, TransformKind.SIGNS)
    best = exhaustive_transform_ratio(tree, spec, p)
    trajectory = [best]
    for _ in range(iterations):
        level = int(rng.integers(0, depth))
        node = int(rng.integers(0, 2**level))
        increments = [level_.copy() for level_ in tree.increments]
        values = [level_.copy() for level_ in spec.values]
        if rng.random() < 0.5:
            increments[level][node] *= np.exp(rng.normal(0.0, 0.5))
        else:
            values[level][node] *= -1.0
        candidate_tree = DyadicTree(tree.d0, tuple(increments))
        candidate_spec = TransformSpec(spec.kind, spec.v0, tuple(values))
        ratio = exhaustive_transform_ratio(candidate_tree, candidate_spec, p)
        if ratio > best:
            best, tree, spec = ratio, candidate_tree, candidate_spec
        trajectory.append(best)
    logger.info("near-extremal search p=%s depth=%d: best ratio %.6f", p, depth, best)
    return SearchReport(
        p=p,
        depth=depth,
        iterations=iterations,
        best_ratio=best,
        bound=p_star(p) - 1.0,
        trajectory=trajectory,
    )
