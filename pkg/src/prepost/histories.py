"""Two-outcome history families, consistency, ABL probabilities, and weights.

A history is an ordered triple of projector events d -> e -> f at successive
times (no evolution in between).  A family pairs the history with its
complement d -> (1-e) -> f.  The family is consistent when the interference
functional Tr[F E D E'] vanishes; for rank-1 d and f this factors as

    |<f|d>|^2 * wv(e) * conj(wv(1-e))

so consistency holds exactly when the weak value of e is 0 or 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import (
    BasisMismatch,
    DimensionError,
    UndefinedABL,
    UndefinedWeight,
    UnknownEigenvalue,
)
from .linalg import CVec
from .quantum import Observable, Projector, State, weak_value

#: Interference functionals at or below this magnitude count as zero.
CONSISTENCY_TOL = 1e-10

#: Agreement tolerance between ABL probabilities and conditional weights.
AGREEMENT_TOL = 1e-10


class FailureMode(Enum):
    NONE = "None"
    UNSHARP = "Unsharp"
    STRANGE = "Strange"


def _check_conformable(*projs: Projector):
    dims = {p.dim for p in projs}
    if len(dims) != 1:
        raise DimensionError(f"projectors have mixed dimensions {sorted(dims)}")
    labels = {p.labels for p in projs}
    if len(labels) != 1:
        raise BasisMismatch(f"projectors have mixed basis labels {sorted(labels)}")


@dataclass(frozen=True, eq=False)
class History:
    """Ordered projector events at three times: d, then e, then f."""

    d: Projector
    e: Projector
    f: Projector

    def __post_init__(self):
        _check_conformable(self.d, self.e, self.f)

    @property
    def dim(self) -> int:
        return self.d.dim


@dataclass(frozen=True, eq=False)
class Family:
    """A history and its complement, sharing endpoints and partitioning time 1.

    Endpoints d and f must be rank-1 (pure pre/post-selection); the two
    middle events must sum to the identity.
    """

    base: History
    complement: History

    def __post_init__(self):
        b, c = self.base, self.complement
        if b.d is not c.d and np.max(np.abs(b.d.mat.entries - c.d.mat.entries)) > 1e-10:
            raise ValueError("base and complement histories disagree on d")
        if b.f is not c.f and np.max(np.abs(b.f.mat.entries - c.f.mat.entries)) > 1e-10:
            raise ValueError("base and complement histories disagree on f")
        total = b.e.mat.entries + c.e.mat.entries
        if np.max(np.abs(total - np.eye(b.dim))) > 1e-10:
            raise ValueError("middle events do not sum to the identity")
        if b.d.rank != 1 or b.f.rank != 1:
            raise ValueError(
                f"family endpoints must be rank-1, got ranks {b.d.rank} and {b.f.rank}"
            )

    @property
    def d(self) -> Projector:
        return self.base.d

    @property
    def e(self) -> Projector:
        return self.base.e

    @property
    def f(self) -> Projector:
        return self.base.f

    @classmethod
    def build(cls, d: Projector, e: Projector, f: Projector) -> "Family":
        """Family {d -> e -> f, d -> (1-e) -> f}."""
        return cls(History(d, e, f), History(d, e.complement(), f))

    @classmethod
    def from_states(cls, pre: State, e: Projector, post: State) -> "Family":
        return cls.build(Projector.onto(pre), e, Projector.onto(post))


def rank_one_vector(p: Projector) -> CVec:
    """Unit vector spanning the range of a rank-1 projector (phase arbitrary)."""
    if p.rank != 1:
        raise ValueError(f"expected a rank-1 projector, got rank {p.rank}")
    m = p.mat.entries
    col = int(np.argmax(np.linalg.norm(m, axis=0)))
    vec = CVec(m[:, col], p.labels)
    return vec / vec.norm()


@dataclass(frozen=True)
class ConsistencyReport:
    """Interference functional of a family with its factored form.

    `functional` is Tr[F E D E'].  For non-orthogonal endpoints it factors
    into factor_overlap_sq * factor_wv * factor_wv_conj, where factor_wv is
    the weak value of e and factor_wv_conj the conjugated weak value of 1-e.
    Orthogonal endpoints leave the weak-value factors undefined (None).
    """

    functional: complex
    consistent: bool
    failure_mode: FailureMode
    factor_overlap_sq: float
    factor_wv: Optional[complex]
    factor_wv_conj: Optional[complex]


def _classify_functional(functional: complex, consistent: bool) -> FailureMode:
    if consistent:
        return FailureMode.NONE
    real_enough = abs(functional.imag) <= CONSISTENCY_TOL
    if real_enough and 0.0 < functional.real < 1.0:
        return FailureMode.UNSHARP
    return FailureMode.STRANGE


def consistency(fam: Family) -> ConsistencyReport:
    """Evaluate Tr[F E D E'] and classify the family.

    The trace form is authoritative; the weak-value factorization is
    recomputed independently and must agree to CONSISTENCY_TOL.
    """
    d, e, f = fam.d.mat.entries, fam.e.mat.entries, fam.f.mat.entries
    e_prime = fam.complement.e.mat.entries
    functional = complex(np.trace(f @ e @ d @ e_prime))
    consistent = abs(functional) <= CONSISTENCY_TOL

    d_vec = rank_one_vector(fam.d)
    f_vec = rank_one_vector(fam.f)
    overlap = np.vdot(f_vec.amps, d_vec.amps)
    overlap_sq = float(abs(overlap) ** 2)
    if abs(overlap) <= 1e-12:
        factor_wv: Optional[complex] = None
        factor_wv_conj: Optional[complex] = None
    else:
        pre = State(d_vec)
        post = State(f_vec)
        factor_wv = weak_value(fam.e, pre, post).value
        factor_wv_conj = np.conj(weak_value(fam.complement.e, pre, post).value)
        factored = overlap_sq * factor_wv * factor_wv_conj
        assert abs(factored - functional) <= CONSISTENCY_TOL, (
            f"factorization mismatch: trace {functional} vs factored {factored}"
        )

    return ConsistencyReport(
        functional=functional,
        consistent=consistent,
        failure_mode=_classify_functional(functional, consistent),
        factor_overlap_sq=overlap_sq,
        factor_wv=factor_wv,
        factor_wv_conj=factor_wv_conj,
    )


def abl_probability(obs: Observable, pre: State, post: State, outcome: float) -> float:
    """Probability of `outcome` in a sharp measurement of obs between pre and post.

    Degenerate-spectrum form: |<post|P_outcome|pre>|^2 over the sum of the
    same quantity across all spectral projectors.
    """
    try:
        obs.projector_for(outcome)
    except KeyError:
        raise UnknownEigenvalue(
            f"{outcome!r} is not an eigenvalue of the observable"
        ) from None
    phi = post.vec.amps
    psi = pre.vec.amps
    terms = {
        lam: abs(np.vdot(phi, proj.mat.entries @ psi)) ** 2
        for lam, proj in zip(obs.eigenvalues, obs.projectors)
    }
    denom = sum(terms.values())
    if denom <= 1e-12:
        raise UndefinedABL(
            "every intermediate outcome is incompatible with this pre/post pair"
        )
    for lam in terms:
        if abs(lam - outcome) <= 1e-8:
            return terms[lam] / denom
    raise UnknownEigenvalue(f"{outcome!r} is not an eigenvalue of the observable")


def abl_from_weak_values(wv: complex) -> float:
    """ABL probability of a projector outcome from its weak value alone.

    |wv|^2 / (|wv|^2 + |1-wv|^2); valid because projector weak values
    determine both branch amplitudes up to a common factor.
    """
    num = abs(wv) ** 2
    alt = abs(1.0 - wv) ** 2
    if num < 1e-24 and alt < 1e-24:
        raise UndefinedABL("both branch moduli vanish; cannot normalize")
    return num / (num + alt)


def history_weight(h: History) -> float:
    """Weight Tr[D E F E] of a single history (real by cyclic symmetry)."""
    d, e, f = h.d.mat.entries, h.e.mat.entries, h.f.mat.entries
    w = complex(np.trace(d @ e @ f @ e))
    assert abs(w.imag) <= 1e-10, f"history weight has imaginary part {w.imag:.3g}"
    return w.real


def conditional_weight(e: Projector, d: Projector, f: Projector) -> float:
    """Multiple-time conditional weight Tr[DEFE]/Tr[DF].

    Equals |weak value of e|^2 when d and f are rank-1.  Not clamped to
    [0, 1]; it is a probability only on consistent families.
    """
    _check_conformable(e, d, f)
    dm, em, fm = d.mat.entries, e.mat.entries, f.mat.entries
    denom = complex(np.trace(dm @ fm))
    if abs(denom) <= 1e-12:
        raise UndefinedWeight("Tr[DF] vanishes; conditional weight undefined")
    w = complex(np.trace(dm @ em @ fm @ em)) / denom
    assert abs(w.imag) <= 1e-10, f"conditional weight has imaginary part {w.imag:.3g}"
    return w.real


def abl_weight_agreement(fam: Family) -> bool:
    """Whether the ABL probability and conditional weight of e agree.

    Guaranteed true on consistent families; the gap on inconsistent ones is
    the operational difference between sharp and unsharp intermediate
    measurements.
    """
    pre = State(rank_one_vector(fam.d))
    post = State(rank_one_vector(fam.f))
    wv = weak_value(fam.e, pre, post).value
    abl = abl_from_weak_values(wv)
    weight = conditional_weight(fam.e, fam.d, fam.f)
    return abs(abl - weight) <= AGREEMENT_TOL
