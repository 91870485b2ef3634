"""Inverse-iteration sampling of the balanced measure.

The measure we are after is the unique probability measure mu with
f^* mu = d * mu that puts no mass on exceptional points; its support is
the Julia set.  We approximate it the classical way: run many chains of
random backward iteration, choosing one of the d preimages at each step
with probability proportional to multiplicity, and harvest the chain
states after a burn-in.  Chains are advanced in lockstep so the fiber
polynomials of a whole batch can be solved simultaneously, and each
chain draws from its own counter-based random stream, which makes the
output a pure function of (seed, config) regardless of scheduling.

Alongside the sampler live the measure-side utilities that the analysis
stages share: empirical potentials, probe circles, the energy integral
of the closed-form potential, and the pushforward-invariance residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import escape
from .errors import (
    ExceptionalStart,
    TreeTooLarge,
    ValidationError,
)
from .maps import (
    CHORDAL_MATCH,
    ProjectivePoint,
    RationalMap,
    batch_fiber_roots,
    exceptional_set,
)
from .rng import JULIA_CHAIN_BASE, STREAM_START_POINT, rng_stream, stream_key, uniform_at

# Default start for backward orbits: 1 + golden-ratio offset.  Almost
# surely non-exceptional; re-randomized from the seed when it is not.
START_POINT = 1.6180339 + 0.7320508j

# Chains advanced in lockstep.  A power of two amortizes the batched
# root solves nicely; the value is a knob, not a contract.
DEFAULT_CHAINS = 256

# Hard ceiling on full preimage trees (d^depth leaves).
TREE_LEAF_LIMIT = 10**6

# Tolerance for refusing starts that sit on the exceptional set.
EXCEPTIONAL_AVOID = CHORDAL_MATCH


# --------------------------------------------------------------------------
# empirical measures


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Finitely many weighted atoms in the plane.

    Points are affine and finite by construction (atoms that land exactly
    at infinity are dropped and the weights renormalized; that event has
    measure zero for the maps this package targets).  Weights are
    positive and sum to one.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        w = np.asarray(self.weights, dtype=np.float64)
        if pts.ndim != 1 or w.shape != pts.shape:
            raise ValidationError("points and weights must be 1-d and aligned")
        if pts.size == 0:
            raise ValidationError("empirical measure needs at least one atom")
        if not np.all(np.isfinite(pts.view(np.float64))):
            raise ValidationError("empirical measure atoms must be finite")
        if np.any(w <= 0.0):
            raise ValidationError("weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValidationError("weights must sum to 1 within 1e-12")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.points.size

    # -- geometry helpers used by the grid/probe machinery ----------------

    def centroid(self) -> complex:
        return complex(np.sum(self.weights * self.points))

    def hull_radius(self, center=None) -> float:
        c = self.centroid() if center is None else center
        return float(np.max(np.abs(self.points - c)))

    def bounds(self):
        """(x0, y0, x1, y1) of the atom cloud."""
        x = self.points.real
        y = self.points.imag
        return float(x.min()), float(y.min()), float(x.max()), float(y.max())


def from_atoms(points, weights=None) -> EmpiricalMeasure:
    """Build an EmpiricalMeasure, dropping non-finite atoms.

    Weights default to uniform; after dropping, the remainder is
    renormalized.  Raising on an empty result is left to the type.
    """
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if weights is None:
        w = np.full(pts.size, 1.0, dtype=np.float64)
    else:
        w = np.asarray(weights, dtype=np.float64).ravel().copy()
    keep = np.isfinite(pts.real) & np.isfinite(pts.imag)
    pts, w = pts[keep], w[keep]
    if pts.size == 0:
        raise ValidationError("no finite atoms")
    return EmpiricalMeasure(points=pts, weights=w / w.sum())


def empirical_potential(points, weights, z) -> np.ndarray:
    """Sum_i w_i log|z - p_i| for each probe z (pairwise logs).

    Probes are expected to keep their distance from the atoms; an exact
    coincidence produces -inf rather than an exception.
    """
    pts = np.asarray(points, dtype=np.complex128).ravel()
    w = np.asarray(weights, dtype=np.float64).ravel()
    zz = np.asarray(z, dtype=np.complex128)
    flat = zz.ravel()
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(flat[:, None] - pts[None, :]))
    out = logs @ w
    return out.reshape(zz.shape) if zz.shape else out[0]


def probe_circle(points, n_probes: int = 50, factor: float = 2.0, center=None):
    """n probe points on a circle of `factor` times the hull radius.

    Centered on the centroid of the cloud by default so off-origin Julia
    sets (the special family has one) get a sensible circle.
    """
    pts = np.asarray(points, dtype=np.complex128).ravel()
    c = complex(pts.mean()) if center is None else complex(center)
    r = factor * max(1e-9, float(np.max(np.abs(pts - c))))
    theta = 2.0 * np.pi * np.arange(n_probes) / n_probes
    return c + r * np.exp(1j * theta)


# --------------------------------------------------------------------------
# sampler configuration


@dataclass(frozen=True)
class SamplerConfig:
    n_samples: int
    burn_in: int = 30
    seed: int = 0
    full_tree_depth: int = 0
    chains: int = DEFAULT_CHAINS

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValidationError("n_samples must be >= 1")
        if self.burn_in < 10:
            raise ValidationError("burn_in must be >= 10")
        if self.full_tree_depth < 0:
            raise ValidationError("full_tree_depth must be >= 0")
        if self.chains < 1:
            raise ValidationError("chains must be >= 1")


# --------------------------------------------------------------------------
# backward orbits


def _as_unit_pair(z) -> np.ndarray:
    if isinstance(z, ProjectivePoint):
        return z.as_array()
    zc = complex(z)
    return ProjectivePoint.from_affine(zc).as_array()


def _resolve_start(f: RationalMap, start, seed: int):
    """Start point for backward orbits, guaranteed off E(f).

    An explicit start that sits on the exceptional set is refused; the
    default start is silently re-randomized instead (only degenerate
    maps can make that happen).
    """
    exc = exceptional_set(f)

    def clear_of_exceptional(p: ProjectivePoint) -> bool:
        return all(p.chordal(e) > EXCEPTIONAL_AVOID for e in exc)

    if start is not None:
        p = start if isinstance(start, ProjectivePoint) else ProjectivePoint.from_affine(complex(start))
        if not clear_of_exceptional(p):
            raise ExceptionalStart(f"start point {p!r} lies in the exceptional set")
        return p

    p = ProjectivePoint.from_affine(START_POINT)
    if clear_of_exceptional(p):
        return p
    st = rng_stream(seed, STREAM_START_POINT)
    for _ in range(64):
        u = st.uniform(2)
        p = ProjectivePoint.from_affine(complex(4.0 * u[0] - 2.0, 4.0 * u[1] - 2.0))
        if clear_of_exceptional(p):
            return p
    raise ExceptionalStart("could not find a non-exceptional start point")


def _advance_chains(f: RationalMap, W: np.ndarray, keys: np.ndarray, counter: int) -> np.ndarray:
    """One lockstep backward step for all chains.

    Each chain picks uniformly among d preimage slots (finite roots with
    multiplicity, then infinity filling the degree drop), which realizes
    the multiplicity-weighted branch choice d^{-1} f^*.
    """
    d = f.degree
    roots, eff = batch_fiber_roots(f, W)
    u = uniform_at(keys, counter)
    slot = np.minimum((u * d).astype(np.int64), d - 1)
    take_inf = slot >= eff
    z = roots[np.arange(W.shape[0]), np.minimum(slot, np.maximum(eff - 1, 0))]
    out = np.empty_like(W)
    nrm = np.sqrt(1.0 + np.abs(z) ** 2)
    out[:, 0] = 1.0 / nrm
    out[:, 1] = z / nrm
    out[take_inf, 0] = 0.0
    out[take_inf, 1] = 1.0
    return out


def sample_julia(f: RationalMap, cfg: SamplerConfig, start=None) -> EmpiricalMeasure:
    """Backward-orbit sample of the balanced measure.

    Runs cfg.chains independent chains in lockstep from a common start,
    discards cfg.burn_in steps per chain, then harvests states until
    cfg.n_samples points are collected (chain-major order, so the output
    is independent of how many harvest rounds were needed).  Setting
    cfg.full_tree_depth > 0 bypasses the Monte Carlo walk entirely and
    returns the full preimage tree of that depth instead.
    """
    start_p = _resolve_start(f, start, cfg.seed)
    if cfg.full_tree_depth > 0:
        return full_preimage_tree(f, start_p, cfg.full_tree_depth)

    C = cfg.chains
    rounds = -(-cfg.n_samples // C)  # ceil
    keys = stream_key(cfg.seed, JULIA_CHAIN_BASE + np.arange(C, dtype=np.uint64))
    W = np.tile(start_p.as_array(), (C, 1))

    harvested = np.empty((rounds, C), dtype=np.complex128)
    for t in range(cfg.burn_in + rounds):
        W = _advance_chains(f, W, keys, t)
        if t >= cfg.burn_in:
            with np.errstate(divide="ignore", invalid="ignore"):
                harvested[t - cfg.burn_in] = W[:, 1] / W[:, 0]

    # chain-major: all of chain 0's harvest, then chain 1's, ...
    flat = harvested.T.reshape(-1)[: cfg.n_samples]
    return from_atoms(flat)


def full_preimage_tree(f: RationalMap, z0, depth: int) -> EmpiricalMeasure:
    """All d^depth preimages of z0 under f^depth, equally weighted.

    Realizes d^{-n} (f^n)^* delta_{z0}.  Multiple roots appear as slot
    repetitions, so leaf weights are uniformly d^{-depth}.
    """
    d = f.degree
    if d**depth > TREE_LEAF_LIMIT:
        raise TreeTooLarge(f"d^depth = {d**depth} exceeds {TREE_LEAF_LIMIT}")
    p = z0 if isinstance(z0, ProjectivePoint) else ProjectivePoint.from_affine(complex(z0))
    exc = exceptional_set(f)
    if any(p.chordal(e) <= EXCEPTIONAL_AVOID for e in exc):
        raise ExceptionalStart(f"tree root {p!r} lies in the exceptional set")

    frontier = p.as_array()[None, :]
    for _ in range(depth):
        B = frontier.shape[0]
        roots, eff = batch_fiber_roots(f, frontier)
        child = np.empty((B, d, 2), dtype=np.complex128)
        slot = np.arange(d)[None, :]
        z = roots
        nrm = np.sqrt(1.0 + np.abs(z) ** 2)
        child[:, :, 0] = 1.0 / nrm
        child[:, :, 1] = z / nrm
        at_inf = slot >= eff[:, None]
        child[at_inf, 0] = 0.0
        child[at_inf, 1] = 1.0
        frontier = child.reshape(B * d, 2)

    with np.errstate(divide="ignore", invalid="ignore"):
        zs = frontier[:, 1] / frontier[:, 0]
    zs = np.where(frontier[:, 0] == 0.0, np.inf + 0j, zs)
    return from_atoms(zs)


# --------------------------------------------------------------------------
# measure-side functionals


def energy(f: RationalMap, mu: EmpiricalMeasure, ev: "escape.EscapeRateEvaluator") -> float:
    """Estimate of I = integral of the potential against the measure.

    The closed-form potential is evaluated at every atom, so there is no
    diagonal singularity to excise.
    """
    return float(np.sum(mu.weights * escape.potential(ev, mu.points)))


def balance_residual(
    f: RationalMap,
    mu: EmpiricalMeasure,
    n_probes: int = 64,
    probe_factor: float = 2.0,
) -> float:
    """Invariance defect of the sampled measure under pushforward by f.

    The balanced measure satisfies f_* mu = mu; we compare the empirical
    potentials of mu and f_* mu on a probe circle comfortably outside
    both supports and report the max absolute difference.  Statistical
    noise scales like n_samples^{-1/2}.
    """
    pts = mu.points
    img = f(pts)
    keep = np.isfinite(img.real) & np.isfinite(img.imag)
    img_w = mu.weights[keep] / mu.weights[keep].sum()
    img = img[keep]

    c = complex(pts.mean())
    probes = probe_circle(np.concatenate([pts, img]), n_probes, probe_factor, center=c)

    p_mu = empirical_potential(pts, mu.weights, probes)
    p_push = empirical_potential(img, img_w, probes)
    return float(np.max(np.abs(p_mu - p_push)))


def potential_consistency(
    f: RationalMap,
    mu: EmpiricalMeasure,
    ev: "escape.EscapeRateEvaluator",
    n_probes: int = 50,
    probe_factor: float = 1.5,
) -> float:
    """Max gap between the empirical and the closed-form potential.

    Probes sit on a circle strictly outside the sample hull, where both
    potentials are smooth; the gap is Monte Carlo error plus escape-rate
    truncation and should obey ~ 5 n^{-1/2} + 1e-3.
    """
    probes = probe_circle(mu.points, n_probes, probe_factor)
    emp = empirical_potential(mu.points, mu.weights, probes)
    exact = escape.potential(ev, probes)
    return float(np.max(np.abs(emp - exact)))
