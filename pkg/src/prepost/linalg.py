"""Dense complex linear algebra over small labeled Hilbert spaces.

Vectors and matrices carry the labels of the basis they are expressed in;
every binary operation checks that its operands share one labeled basis,
so amplitudes written in different bases can never be mixed silently.
All values are immutable after construction and safe to share between
concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union, overload

import numpy as np

from .errors import BasisMismatch, DimensionError

#: Default absolute tolerance for floating-point equality checks.
ATOL = 1e-10

#: Separator used when tensor products concatenate factor basis labels.
LABEL_JOIN = "_"


def index_labels(n: int) -> tuple[str, ...]:
    """Default basis labels "0", "1", ... for unlabeled data."""
    return tuple(str(i) for i in range(n))


def _check_same_basis(a: "CVec | CMat", b: "CVec | CMat") -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.labels != b.labels:
        raise BasisMismatch(
            f"basis mismatch: {list(a.labels)} vs {list(b.labels)}"
        )


@dataclass(frozen=True, eq=False)
class CVec:
    """Complex amplitude vector over a labeled finite basis."""

    amps: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size < 1:
            raise DimensionError("amplitude vector must be 1-d and non-empty")
        labels = tuple(self.labels) if self.labels else index_labels(amps.size)
        if len(labels) != amps.size:
            raise DimensionError(
                f"{len(labels)} labels for {amps.size} amplitudes"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def allclose(self, other: "CVec", tol: float = ATOL) -> bool:
        return self.labels == other.labels and bool(
            np.allclose(self.amps, other.amps, rtol=0.0, atol=tol)
        )

    def __add__(self, other: "CVec") -> "CVec":
        _check_same_basis(self, other)
        return CVec(self.amps + other.amps, self.labels)

    def __sub__(self, other: "CVec") -> "CVec":
        _check_same_basis(self, other)
        return CVec(self.amps - other.amps, self.labels)

    def __mul__(self, scalar: complex) -> "CVec":
        return CVec(self.amps * scalar, self.labels)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "CVec":
        return CVec(self.amps / scalar, self.labels)

    def __neg__(self) -> "CVec":
        return CVec(-self.amps, self.labels)

    @classmethod
    def basis_vector(cls, label: str, labels: Sequence[str]) -> "CVec":
        """Unit vector along the basis element named `label`."""
        labels = tuple(labels)
        amps = np.zeros(len(labels), dtype=complex)
        amps[labels.index(label)] = 1.0
        return cls(amps, labels)


@dataclass(frozen=True, eq=False)
class CMat:
    """Dense complex square matrix over a labeled finite basis."""

    entries: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError(f"matrix must be square, got {entries.shape}")
        if entries.shape[0] < 1:
            raise DimensionError("matrix must be non-empty")
        labels = tuple(self.labels) if self.labels else index_labels(entries.shape[0])
        if len(labels) != entries.shape[0]:
            raise DimensionError(
                f"{len(labels)} labels for dimension {entries.shape[0]}"
            )
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def allclose(self, other: "CMat", tol: float = ATOL) -> bool:
        return self.labels == other.labels and bool(
            np.allclose(self.entries, other.entries, rtol=0.0, atol=tol)
        )

    def hermiticity_defect(self) -> float:
        """Max-abs deviation of the matrix from its own adjoint."""
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def __add__(self, other: "CMat") -> "CMat":
        _check_same_basis(self, other)
        return CMat(self.entries + other.entries, self.labels)

    def __sub__(self, other: "CMat") -> "CMat":
        _check_same_basis(self, other)
        return CMat(self.entries - other.entries, self.labels)

    def __mul__(self, scalar: complex) -> "CMat":
        return CMat(self.entries * scalar, self.labels)

    __rmul__ = __mul__

    def __neg__(self) -> "CMat":
        return CMat(-self.entries, self.labels)

    @classmethod
    def identity(cls, labels: Sequence[str]) -> "CMat":
        labels = tuple(labels)
        return cls(np.eye(len(labels), dtype=complex), labels)

    @classmethod
    def zeros(cls, labels: Sequence[str]) -> "CMat":
        labels = tuple(labels)
        n = len(labels)
        return cls(np.zeros((n, n), dtype=complex), labels)


def inner(u: CVec, v: CVec) -> complex:
    """Hermitian inner product, conjugating the first argument."""
    _check_same_basis(u, v)
    return complex(np.vdot(u.amps, v.amps))


def outer(u: CVec, v: CVec) -> CMat:
    """Rank-one matrix with entries u_i * conj(v_j)."""
    _check_same_basis(u, v)
    return CMat(np.outer(u.amps, v.amps.conj()), u.labels)


def matmul(a: CMat, b: CMat) -> CMat:
    _check_same_basis(a, b)
    return CMat(a.entries @ b.entries, a.labels)


def apply(a: CMat, v: CVec) -> CVec:
    _check_same_basis(a, v)
    return CVec(a.entries @ v.amps, v.labels)


def adjoint(a: CMat) -> CMat:
    return CMat(a.entries.conj().T, a.labels)


def trace(a: CMat) -> complex:
    return complex(np.trace(a.entries))


def tensor_labels(a: Sequence[str], b: Sequence[str]) -> tuple[str, ...]:
    """Row-major concatenation of factor labels, joined by an underscore."""
    return tuple(f"{la}{LABEL_JOIN}{lb}" for la in a for lb in b)


@overload
def tensor(a: CVec, b: CVec) -> CVec: ...
@overload
def tensor(a: CMat, b: CMat) -> CMat: ...


def tensor(a: Union[CVec, CMat], b: Union[CVec, CMat]) -> Union[CVec, CMat]:
    """Kronecker product of two vectors or two matrices."""
    labels = tensor_labels(a.labels, b.labels)
    if isinstance(a, CVec) and isinstance(b, CVec):
        return CVec(np.kron(a.amps, b.amps), labels)
    if isinstance(a, CMat) and isinstance(b, CMat):
        return CMat(np.kron(a.entries, b.entries), labels)
    raise TypeError("tensor expects two CVec or two CMat operands")
