"""States, Hermitian observables, projectors, and the weak-value calculus.

A weak value of an operator O between a pre-selected state |a> and a
post-selected state |b> is <b|O|a> / <b|a>.  It is classified against the
operator's eigenvalue set:

* sharp (SWV): coincides with an eigenvalue,
* unsharp (UWV): real and inside the eigenvalue range, but not an eigenvalue,
* strange (STWV): outside the range, or not real at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

import numpy as np

from .errors import NormalizationError, NotHermitian, UndefinedWeakValue
from .linalg import ATOL, CMat, CVec, apply, inner, outer

#: Eigenvalues closer than this are merged into one degenerate projector.
DEGENERACY_TOL = 1e-8

#: Pre/post overlaps at or below this magnitude count as orthogonal.
ORTHO_TOL = 1e-12


class WeakValueClass(Enum):
    SWV = "SWV"
    UWV = "UWV"
    STWV = "STWV"


@dataclass(frozen=True, eq=False)
class State:
    """Normalized pure state over a labeled basis."""

    vec: CVec
    label: str = ""

    def __post_init__(self):
        norm = self.vec.norm()
        if abs(norm - 1.0) > ATOL:
            raise NormalizationError(
                f"state {self.label or '<unnamed>'} has norm {norm:.12g}, expected 1"
            )

    @property
    def dim(self) -> int:
        return self.vec.dim

    @property
    def labels(self) -> tuple[str, ...]:
        return self.vec.labels

    @classmethod
    def normalized(
        cls, amps: Sequence[complex] | CVec, labels: Sequence[str] = (), label: str = ""
    ) -> "State":
        """Build a state from raw amplitudes, dividing out the norm."""
        vec = amps if isinstance(amps, CVec) else CVec(np.asarray(amps), tuple(labels))
        norm = vec.norm()
        if norm <= ORTHO_TOL:
            raise NormalizationError(f"cannot normalize zero vector {label!r}")
        return cls(vec / norm, label)


@dataclass(frozen=True, eq=False)
class Projector:
    """Hermitian idempotent matrix; rank is recovered from the trace."""

    mat: CMat
    rank: int = field(init=False)

    def __post_init__(self):
        m = self.mat.entries
        if self.mat.hermiticity_defect() > ATOL:
            raise NotHermitian("projector matrix is not Hermitian")
        if np.max(np.abs(m @ m - m)) > ATOL:
            raise ValueError("projector matrix is not idempotent")
        object.__setattr__(self, "rank", int(round(np.trace(m).real)))

    @property
    def dim(self) -> int:
        return self.mat.dim

    @property
    def labels(self) -> tuple[str, ...]:
        return self.mat.labels

    def complement(self) -> "Projector":
        return Projector(CMat.identity(self.labels) - self.mat)

    def eigenvalue_set(self) -> tuple[float, ...]:
        """Spectrum actually attained: 0 and/or 1 depending on rank."""
        vals = []
        if self.rank < self.dim:
            vals.append(0.0)
        if self.rank > 0:
            vals.append(1.0)
        return tuple(vals)

    @classmethod
    def onto(cls, target: Union[State, CVec]) -> "Projector":
        """Rank-one projector |v><v| onto a (normalized) vector."""
        vec = target.vec if isinstance(target, State) else target
        norm = vec.norm()
        if norm <= ORTHO_TOL:
            raise ValueError("cannot project onto the zero vector")
        vec = vec / norm
        return cls(outer(vec, vec))

    @classmethod
    def span(cls, vectors: Sequence[CVec]) -> "Projector":
        """Projector onto the span of the given vectors (orthonormalized)."""
        if not vectors:
            raise ValueError("span requires at least one vector")
        labels = vectors[0].labels
        cols = np.column_stack([v.amps for v in vectors])
        q, r = np.linalg.qr(cols)
        keep = np.abs(np.diag(r)) > 1e-12
        q = q[:, keep]
        return cls(CMat(q @ q.conj().T, labels))

    @classmethod
    def on_labels(cls, labels: Sequence[str], subset: Sequence[str]) -> "Projector":
        """Diagonal projector onto a subset of the basis labels."""
        labels = tuple(labels)
        diag = np.zeros(len(labels), dtype=complex)
        for name in subset:
            diag[labels.index(name)] = 1.0
        return cls(CMat(np.diag(diag), labels))

    @classmethod
    def identity(cls, labels: Sequence[str]) -> "Projector":
        return cls(CMat.identity(labels))


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian operator with its spectral decomposition.

    `eigenvalues` are the distinct eigenvalues in ascending order and
    `projectors` the matching spectral projectors (degenerate eigenvalues
    share one higher-rank projector).
    """

    mat: CMat
    eigenvalues: tuple[float, ...]
    projectors: tuple[Projector, ...]

    def __post_init__(self):
        if self.mat.hermiticity_defect() > ATOL:
            raise NotHermitian("observable matrix is not Hermitian")
        if len(self.eigenvalues) != len(self.projectors):
            raise ValueError("eigenvalue list and projector list differ in length")
        if list(self.eigenvalues) != sorted(self.eigenvalues):
            raise ValueError("eigenvalues must be ascending")
        total = np.zeros((self.mat.dim, self.mat.dim), dtype=complex)
        for i, p in enumerate(self.projectors):
            total += p.mat.entries
            for q in self.projectors[i + 1 :]:
                if np.max(np.abs(p.mat.entries @ q.mat.entries)) > ATOL:
                    raise ValueError("spectral projectors are not orthogonal")
        if np.max(np.abs(total - np.eye(self.mat.dim))) > ATOL:
            raise ValueError("spectral projectors do not sum to the identity")

    @property
    def dim(self) -> int:
        return self.mat.dim

    @property
    def labels(self) -> tuple[str, ...]:
        return self.mat.labels

    def projector_for(self, outcome: float, tol: float = DEGENERACY_TOL) -> Projector:
        for lam, proj in zip(self.eigenvalues, self.projectors):
            if abs(lam - outcome) <= tol:
                return proj
        raise KeyError(outcome)


#: Operators accepted by the weak-value calculus.
OperatorLike = Union[Observable, Projector]


def spectral_decompose(mat: CMat) -> Observable:
    """Eigendecompose a Hermitian matrix into distinct-eigenvalue projectors.

    Eigenvalues within DEGENERACY_TOL of each other are merged into a single
    rank-k projector, so exactly degenerate operators come out with the
    expected multiplicities despite numerical jitter.
    """
    if mat.hermiticity_defect() > ATOL:
        raise NotHermitian(
            f"matrix deviates from Hermitian by {mat.hermiticity_defect():.3g}"
        )
    w, v = np.linalg.eigh(mat.entries)
    eigenvalues: list[float] = []
    projectors: list[Projector] = []
    start = 0
    for stop in range(1, len(w) + 1):
        if stop == len(w) or w[stop] - w[stop - 1] > DEGENERACY_TOL:
            block = v[:, start:stop]
            eigenvalues.append(float(np.mean(w[start:stop])))
            projectors.append(Projector(CMat(block @ block.conj().T, mat.labels)))
            start = stop
    return Observable(mat, tuple(eigenvalues), tuple(projectors))


def as_observable(op: OperatorLike) -> Observable:
    """View a projector as a two-outcome observable; pass observables through."""
    if isinstance(op, Observable):
        return op
    if isinstance(op, Projector):
        pairs: list[tuple[float, Projector]] = []
        if op.rank < op.dim:
            pairs.append((0.0, op.complement()))
        if op.rank > 0:
            pairs.append((1.0, op))
        eigenvalues = tuple(lam for lam, _ in pairs)
        projectors = tuple(p for _, p in pairs)
        return Observable(op.mat, eigenvalues, projectors)
    raise TypeError(f"expected Observable or Projector, got {type(op).__name__}")


def _operator_parts(op: OperatorLike) -> tuple[CMat, tuple[float, ...]]:
    if isinstance(op, Projector):
        return op.mat, op.eigenvalue_set()
    if isinstance(op, Observable):
        return op.mat, op.eigenvalues
    raise TypeError(f"expected Observable or Projector, got {type(op).__name__}")


def classify(value: complex, eigenvalues: Sequence[float]) -> WeakValueClass:
    """Classify a weak value against an eigenvalue set.

    Sharp when within ATOL of some eigenvalue; unsharp when real and inside
    the closed eigenvalue range; strange otherwise, including every value
    with a non-negligible imaginary part.
    """
    if not eigenvalues:
        raise ValueError("eigenvalue list must be non-empty")
    v = complex(value)
    if any(abs(v - lam) <= ATOL for lam in eigenvalues):
        return WeakValueClass.SWV
    if abs(v.imag) <= ATOL and min(eigenvalues) <= v.real <= max(eigenvalues):
        return WeakValueClass.UWV
    return WeakValueClass.STWV


@dataclass(frozen=True)
class WeakValueReport:
    """A weak value together with its classification and the pre/post overlap."""

    value: complex
    wv_class: WeakValueClass
    overlap: complex


def weak_value(op: OperatorLike, pre: State, post: State) -> WeakValueReport:
    """Weak value <post|op|pre> / <post|pre> with classification.

    Raises UndefinedWeakValue when pre and post are orthogonal.
    """
    mat, eigenvalues = _operator_parts(op)
    overlap = inner(post.vec, pre.vec)
    if abs(overlap) <= ORTHO_TOL:
        raise UndefinedWeakValue(
            "pre- and post-selection states are orthogonal; weak value undefined"
        )
    value = inner(post.vec, apply(mat, pre.vec)) / overlap
    return WeakValueReport(value, classify(value, eigenvalues), overlap)


def weak_value_sum(a: OperatorLike, b: OperatorLike, pre: State, post: State) -> complex:
    """Weak value of the operator sum a + b.

    By linearity this equals weak_value(a) + weak_value(b); computing it on
    the summed matrix keeps the two routes independent for testing.
    """
    mat_a, _ = _operator_parts(a)
    mat_b, _ = _operator_parts(b)
    total = mat_a + mat_b
    overlap = inner(post.vec, pre.vec)
    if abs(overlap) <= ORTHO_TOL:
        raise UndefinedWeakValue(
            "pre- and post-selection states are orthogonal; weak value undefined"
        )
    return inner(post.vec, apply(total, pre.vec)) / overlap
