"""Shared random-object builders and the acceptance summary hook.

All randomness flows through seeded generators created per test, so every
run sees the same draws.
"""

import numpy as np
import pytest

from prepost import CMat, CVec, Projector, State
from prepost.linalg import index_labels

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per criterion, then enforce it."""

    def check(num: int, description: str, ok: bool):
        line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {description}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return check


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_vector(rng, dim: int, real: bool = False) -> CVec:
    amps = rng.standard_normal(dim)
    if not real:
        amps = amps + 1j * rng.standard_normal(dim)
    return CVec(amps, index_labels(dim))


def random_state(rng, dim: int, real: bool = False) -> State:
    return State.normalized(random_vector(rng, dim, real))


def random_state_pair(rng, dim: int, min_overlap: float = 0.05, real: bool = False):
    """Pre/post pair with overlap bounded away from zero."""
    while True:
        pre = random_state(rng, dim, real)
        post = random_state(rng, dim, real)
        if abs(np.vdot(post.vec.amps, pre.vec.amps)) >= min_overlap:
            return pre, post


def random_hermitian(rng, dim: int) -> CMat:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return CMat((m + m.conj().T) / 2.0, index_labels(dim))


def _haar_columns(rng, dim: int) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(m)
    return q


def random_projector(rng, dim: int, rank: int | None = None) -> Projector:
    if rank is None:
        rank = int(rng.integers(1, dim))
    cols = _haar_columns(rng, dim)[:, :rank]
    return Projector(CMat(cols @ cols.conj().T, index_labels(dim)))


def _basis_through(rng, vec: CVec) -> np.ndarray:
    """Orthonormal basis whose first column spans vec."""
    dim = vec.dim
    m = np.column_stack(
        [vec.amps, rng.standard_normal((dim, dim - 1)) + 1j * rng.standard_normal((dim, dim - 1))]
    )
    q, _ = np.linalg.qr(m)
    return q


def projector_containing(rng, vec: CVec, rank: int | None = None) -> Projector:
    """Random projector whose range includes the direction of vec."""
    dim = vec.dim
    if rank is None:
        rank = int(rng.integers(1, dim))
    q = _basis_through(rng, vec)
    cols = q[:, :rank]
    return Projector(CMat(cols @ cols.conj().T, vec.labels))


def projector_orthogonal_to(rng, vec: CVec, rank: int | None = None) -> Projector:
    """Random projector whose range is orthogonal to vec."""
    dim = vec.dim
    if rank is None:
        rank = int(rng.integers(1, dim))
    q = _basis_through(rng, vec)
    cols = q[:, 1 : 1 + rank]
    return Projector(CMat(cols @ cols.conj().T, vec.labels))
