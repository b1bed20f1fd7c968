"""Gaussian-pointer measurement model: entangle, post-select, read the pointer.

The apparatus starts in a Gaussian ready state of spread delta centered at
x0.  Coupling to an observable shifts each eigenvalue branch by
coupling * eigenvalue.  Post-selecting the system leaves a superposition of
shifted Gaussians whose interference encodes the weak value: for large
delta the pointer mean approaches x0 + coupling * Re(weak value), while for
small delta the branch masses reproduce the ABL probabilities.

All first and second moments of the post-selected density have closed
forms through the overlap kernel

    K_ij = exp(-(c_i - c_j)^2 / (8 delta^2)),

with int G_i G_j = K_ij and int x G_i G_j = ((c_i + c_j)/2) K_ij; the exact
mean and post-selection rate below use these rather than the grid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BasisMismatch, DimensionError, PostSelectionImpossible
from .linalg import CVec
from .quantum import Observable, State

#: Branches with squared norm at or below this are dropped as empty.
BRANCH_TOL = 1e-12


@dataclass(frozen=True)
class PointerConfig:
    """Apparatus geometry: spread, ready position, coupling, density grid.

    The default grid spans x0 +- (8*delta + 2) with 2^14 points, which
    holds essentially all mass whenever branch centers stay within 2 units
    of x0; pass an explicit grid for larger couplings or eigenvalues.
    """

    delta: float
    x0: float = 0.0
    coupling: float = 1.0
    grid: Optional[tuple[float, float, int]] = None

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.grid is None:
            span = 8.0 * self.delta + 2.0
            object.__setattr__(self, "grid", (self.x0 - span, self.x0 + span, 2**14))
        x_min, x_max, n_points = self.grid
        if n_points < 2:
            raise ValueError(f"grid needs at least 2 points, got {n_points}")
        if not x_min < x_max:
            raise ValueError(f"empty grid range [{x_min}, {x_max}]")

    def grid_points(self) -> np.ndarray:
        x_min, x_max, n_points = self.grid
        return np.linspace(x_min, x_max, n_points)


@dataclass(frozen=True)
class Branch:
    """One eigenvalue branch: shifted pointer center, unnormalized system part."""

    pointer_center: float
    system_component: CVec


@dataclass(frozen=True)
class BranchState:
    """Entangled system-apparatus state, one branch per surviving eigenvalue."""

    branches: tuple[Branch, ...]

    def __post_init__(self):
        total = sum(b.system_component.norm() ** 2 for b in self.branches)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"branch norms sum to {total:.12g}, expected 1")


def gaussian_amplitude(x, center: float, delta: float):
    """Normalized Gaussian amplitude; its square integrates to 1 with sd delta."""
    return (2.0 * np.pi * delta**2) ** -0.25 * np.exp(-((x - center) ** 2) / (4.0 * delta**2))


def entangle(obs: Observable, pre: State, cfg: PointerConfig) -> BranchState:
    """Couple the pointer to obs: branch lambda carries P_lambda|pre> at

    center x0 + coupling * lambda.  Branches with no amplitude are dropped,
    so an eigenstate input yields a single branch of norm 1.
    """
    if obs.dim != pre.dim:
        raise DimensionError(
            f"observable dim {obs.dim} does not match state dim {pre.dim}"
        )
    if obs.labels != pre.labels:
        raise BasisMismatch(
            f"observable basis {obs.labels} does not match state basis {pre.labels}"
        )
    branches = []
    for lam, proj in zip(obs.eigenvalues, obs.projectors):
        component = CVec(proj.mat.entries @ pre.vec.amps, pre.labels)
        if component.norm() ** 2 > BRANCH_TOL:
            branches.append(Branch(cfg.x0 + cfg.coupling * lam, component))
    return BranchState(tuple(branches))


def postselect(
    bs: BranchState, post: State, cfg: PointerConfig
) -> tuple[list[tuple[float, complex]], float]:
    """Project the system on |post>; returns per-branch apparatus amplitudes

    [(center, <post|component>)] and the exact post-selection rate.  The
    rate needs cfg because finite-delta Gaussian overlaps between branch
    pointer states contribute interference terms.
    """
    amps = []
    for b in bs.branches:
        if post.labels != b.system_component.labels:
            raise BasisMismatch(
                f"post-selection basis {post.labels} does not match "
                f"branch basis {b.system_component.labels}"
            )
        amps.append(
            (b.pointer_center, complex(np.vdot(post.vec.amps, b.system_component.amps)))
        )
    if not amps or max(abs(a) for _, a in amps) <= 1e-12:
        raise PostSelectionImpossible(
            "post-selection state is orthogonal to every branch"
        )
    return amps, exact_rate(amps, cfg.delta)


def _overlap_kernel(centers: np.ndarray, delta: float) -> np.ndarray:
    diff = centers[:, None] - centers[None, :]
    return np.exp(-(diff**2) / (8.0 * delta**2))


def exact_rate(amps: Sequence[tuple[float, complex]], delta: float) -> float:
    """Post-selection probability: the squared norm of the apparatus mixture."""
    centers = np.array([c for c, _ in amps], dtype=float)
    alphas = np.array([a for _, a in amps], dtype=complex)
    kernel = _overlap_kernel(centers, delta)
    return float(np.real(alphas.conj() @ kernel @ alphas))


def exact_mean(amps: Sequence[tuple[float, complex]], delta: float) -> float:
    """Mean pointer position of the post-selected density, grid-free."""
    centers = np.array([c for c, _ in amps], dtype=float)
    alphas = np.array([a for _, a in amps], dtype=complex)
    kernel = _overlap_kernel(centers, delta)
    pair_weight = np.real(np.outer(alphas.conj(), alphas) * kernel)
    midpoints = (centers[:, None] + centers[None, :]) / 2.0
    total = pair_weight.sum()
    if total <= 1e-24:
        raise PostSelectionImpossible("post-selected state carries no weight")
    return float((pair_weight * midpoints).sum() / total)


@dataclass(frozen=True)
class Density:
    """Tabulated post-selected pointer density, normalized on its grid."""

    xs: np.ndarray
    ps: np.ndarray
    rate: float

    def mean(self) -> float:
        return float(np.trapezoid(self.xs * self.ps, self.xs))

    def mass_between(self, lo: float, hi: float) -> float:
        mask = (self.xs >= lo) & (self.xs <= hi)
        return float(np.trapezoid(self.ps[mask], self.xs[mask]))


def pointer_density(
    amps: Sequence[tuple[float, complex]], cfg: PointerConfig
) -> Density:
    """|sum_lambda amp_lambda G(x; center_lambda)|^2, normalized on the grid."""
    amps = list(amps)
    if not amps:
        raise PostSelectionImpossible("no branches to build a density from")
    rate = exact_rate(amps, cfg.delta)
    if rate <= 1e-24:
        raise PostSelectionImpossible("post-selected state carries no weight")
    xs = cfg.grid_points()
    psi = np.zeros_like(xs, dtype=complex)
    for center, amp in amps:
        psi += amp * gaussian_amplitude(xs, center, cfg.delta)
    raw = np.abs(psi) ** 2
    norm = np.trapezoid(raw, xs)
    return Density(xs=xs, ps=raw / norm, rate=rate)


@dataclass(frozen=True)
class PointerEnsemble:
    """Monte Carlo pointer readings together with their source density."""

    samples: np.ndarray
    mean: float
    variance: float
    density: Density
    postselect_rate: float


def _uniforms(seed: int, n: int, workers: int) -> np.ndarray:
    """Uniform draws, split into counter-aligned streams per worker.

    Philox advances in blocks of four doubles, so chunk boundaries are kept
    at multiples of four; the concatenation is then bit-identical to a
    single stream for every worker count.
    """
    if workers <= 1:
        return np.random.Generator(np.random.Philox(key=seed)).random(n)
    chunk = -(-n // workers)
    chunk += (-chunk) % 4
    parts = []
    for start in range(0, n, chunk):
        bits = np.random.Philox(key=seed)
        bits.advance(start // 4)
        parts.append(np.random.Generator(bits).random(min(chunk, n - start)))
    return np.concatenate(parts)


def sample(density: Density, n: int, seed: int, workers: int = 1) -> PointerEnsemble:
    """Draw n pointer readings by inverse-CDF on the tabulated density."""
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    xs, ps = density.xs, density.ps
    widths = np.diff(xs)
    cdf = np.concatenate(([0.0], np.cumsum((ps[1:] + ps[:-1]) / 2.0 * widths)))
    cdf /= cdf[-1]
    u = _uniforms(seed, n, workers)
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.clip(idx, 1, len(cdf) - 1)
    seg = cdf[idx] - cdf[idx - 1]
    frac = (u - cdf[idx - 1]) / np.where(seg > 0, seg, 1.0)
    draws = xs[idx - 1] + frac * widths[idx - 1]
    return PointerEnsemble(
        samples=draws,
        mean=float(np.mean(draws)),
        variance=float(np.var(draws)),
        density=density,
        postselect_rate=density.rate,
    )


def weak_value_estimate(ens: PointerEnsemble, cfg: PointerConfig) -> float:
    """Invert the pointer shift: (mean reading - x0) / coupling."""
    return (ens.mean - cfg.x0) / cfg.coupling


def simulate(
    obs: Observable,
    pre: State,
    post: State,
    cfg: PointerConfig,
    n: int,
    seed: int,
    workers: int = 1,
) -> PointerEnsemble:
    """Full pipeline: entangle, post-select, tabulate the density, sample it."""
    bs = entangle(obs, pre, cfg)
    amps, _ = postselect(bs, post, cfg)
    density = pointer_density(amps, cfg)
    return sample(density, n, seed, workers)


def write_density_csv(density: Density, path: str):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "p_x"])
        for x, p in zip(density.xs, density.ps):
            writer.writerow([repr(float(x)), repr(float(p))])


def write_samples_csv(ens: PointerEnsemble, path: str):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "x"])
        for i, x in enumerate(ens.samples):
            writer.writerow([i, repr(float(x))])
