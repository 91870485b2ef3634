"""Harmonic measure of the unbounded Fatou component, by Brownian hitting.

The harmonic measure with pole at infinity is the hitting distribution
on the boundary of D_inf of Brownian motion started far away.  Nothing
dynamical is needed once we know which part of the plane belongs to
D_inf, so the component is represented combinatorially: a grid whose
cells are NEAR_JULIA (within delta of a Julia witness), D_INF (flood
filled from the exterior frame through cells that are not near the
Julia set), or COMPLEMENT (everything else: bounded Fatou components
and interstices).  This deliberately avoids escape-time tests, which
would silently assume f(D_inf) = D_inf.

Walkers then run walk-on-spheres against the labeled grid.  Inside the
bounding box the step radius is the grid's conservative clearance
(distance transform minus one cell diagonal); outside the box a single
exact jump through the exterior-disk Poisson kernel returns the walker
to a circle that encloses every non-D_INF cell.  A walker terminates
when it is within eps_hit of a non-D_INF cell, and each walker draws
from its own counter-based stream, so the hit cloud is reproducible
under any scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree
from scipy.stats import kstest

from .equilibrium import EmpiricalMeasure, empirical_potential, from_atoms
from .errors import InsufficientWitnesses, ValidationError, WalkerBudgetExceeded
from .maps import RationalMap
from .rng import WALKER_BASE, stream_key, uniform_at

# cell labels (int8 grid)
D_INF = 0
COMPLEMENT = 1
NEAR_JULIA = 2

# labeling needs enough witnesses to fatten into a connected barrier
MIN_WITNESSES = 1000

# bbox must exceed the witness hull by this fraction of its extent
BBOX_MARGIN_FRACTION = 0.25

# default walker budget; exceeding it abandons the walker
MAX_WALKER_STEPS = 100_000

# fraction of abandoned walkers above which the sample is rejected
ABANDON_LIMIT = 1e-3


# --------------------------------------------------------------------------
# grid labeling


@dataclass
class GridLabeling:
    """Cell classification of a bounding box around the Julia witnesses.

    labels[iy, ix] is one of D_INF / COMPLEMENT / NEAR_JULIA for the cell
    centered at (x0 + (ix+0.5)dx, y0 + (iy+0.5)dy).  clearance holds, for
    D_INF cells, the conservative walk-on-spheres radius: the distance
    transform to the nearest non-D_INF cell minus one cell diagonal.
    """

    bbox: tuple
    nx: int
    ny: int
    labels: np.ndarray
    julia_witnesses: EmpiricalMeasure
    delta: float
    clearance: np.ndarray

    @property
    def dx(self) -> float:
        x0, _, x1, _ = self.bbox
        return (x1 - x0) / self.nx

    @property
    def dy(self) -> float:
        _, y0, _, y1 = self.bbox
        return (y1 - y0) / self.ny

    @property
    def cell_diagonal(self) -> float:
        return float(np.hypot(self.dx, self.dy))

    def cell_centers(self):
        x0, y0, x1, y1 = self.bbox
        xs = x0 + (np.arange(self.nx) + 0.5) * self.dx
        ys = y0 + (np.arange(self.ny) + 0.5) * self.dy
        return xs, ys

    def in_bbox(self, z: np.ndarray) -> np.ndarray:
        x0, y0, x1, y1 = self.bbox
        return (z.real >= x0) & (z.real < x1) & (z.imag >= y0) & (z.imag < y1)

    def cell_of(self, z: np.ndarray):
        """(iy, ix) of the cells containing z (clipped to the grid)."""
        x0, y0, _, _ = self.bbox
        ix = np.clip(((z.real - x0) / self.dx).astype(np.int64), 0, self.nx - 1)
        iy = np.clip(((z.imag - y0) / self.dy).astype(np.int64), 0, self.ny - 1)
        return iy, ix

    def near_julia_hull_radius(self) -> float:
        """Largest |center| over NEAR_JULIA cells (for launch circles)."""
        xs, ys = self.cell_centers()
        iy, ix = np.nonzero(self.labels == NEAR_JULIA)
        return float(np.max(np.hypot(xs[ix], ys[iy])))

    def frontier_mask(self) -> np.ndarray:
        """NEAR_JULIA cells 4-adjacent to a D_INF cell (the outer boundary)."""
        dinf = self.labels == D_INF
        near = self.labels == NEAR_JULIA
        pad = np.pad(dinf, 1, constant_values=True)
        touch = pad[:-2, 1:-1] | pad[2:, 1:-1] | pad[1:-1, :-2] | pad[1:-1, 2:]
        return near & touch


def label_grid(
    f: RationalMap,
    mu: EmpiricalMeasure,
    bbox,
    nx: int,
    ny: int,
    delta: float | None = None,
) -> GridLabeling:
    """Classify grid cells as D_INF / COMPLEMENT / NEAR_JULIA.

    Cells within delta of a witness are NEAR_JULIA; the rest are flood
    filled with 4-connectivity from the bounding-box frame, and the
    components that reach the frame become D_INF.  delta defaults to two
    cell diagonals so the fattened Julia set cannot leak diagonally.
    """
    if len(mu) < MIN_WITNESSES:
        raise InsufficientWitnesses(
            f"{len(mu)} witnesses; labeling needs at least {MIN_WITNESSES}"
        )
    x0, y0, x1, y1 = (float(v) for v in bbox)
    if not (x1 > x0 and y1 > y0):
        raise ValidationError("bounding box is degenerate")
    wx0, wy0, wx1, wy1 = mu.bounds()
    extent = max(wx1 - wx0, wy1 - wy0, 1e-6)
    margin = BBOX_MARGIN_FRACTION * extent
    if wx0 - x0 < margin or x1 - wx1 < margin or wy0 - y0 < margin or y1 - wy1 < margin:
        raise ValidationError(
            "bounding box must exceed the witness hull by a 25% margin on every side"
        )
    if nx < 8 or ny < 8:
        raise ValidationError("grid must be at least 8x8")

    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    diag = float(np.hypot(dx, dy))
    if delta is None:
        delta = 2.0 * diag
    if delta <= 0.0:
        raise ValidationError("delta must be positive")

    xs = x0 + (np.arange(nx) + 0.5) * dx
    ys = y0 + (np.arange(ny) + 0.5) * dy
    cx, cy = np.meshgrid(xs, ys)
    centers = np.column_stack([cx.ravel(), cy.ravel()])

    tree = cKDTree(np.column_stack([mu.points.real, mu.points.imag]))
    dist, _ = tree.query(centers, k=1, distance_upper_bound=delta)
    near = (dist <= delta).reshape(ny, nx)

    free = ~near
    four = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.int8)
    comp, _ = ndimage.label(free, structure=four)
    border_ids = np.unique(
        np.concatenate([comp[0, :], comp[-1, :], comp[:, 0], comp[:, -1]])
    )
    border_ids = border_ids[border_ids != 0]
    dinf = np.isin(comp, border_ids)
    if not dinf.any():
        raise ValidationError("no exterior cells; the fattened Julia set fills the box")

    labels = np.full((ny, nx), COMPLEMENT, dtype=np.int8)
    labels[near] = NEAR_JULIA
    labels[dinf] = D_INF

    edt = ndimage.distance_transform_edt(labels == D_INF, sampling=(dy, dx))
    clearance = np.maximum(edt - diag, 0.0)

    return GridLabeling(
        bbox=(x0, y0, x1, y1),
        nx=nx,
        ny=ny,
        labels=labels,
        julia_witnesses=mu,
        delta=float(delta),
        clearance=clearance,
    )


def default_bbox(mu: EmpiricalMeasure, margin: float = 0.35):
    """Witness hull expanded by `margin` times its larger extent per side."""
    wx0, wy0, wx1, wy1 = mu.bounds()
    pad = margin * max(wx1 - wx0, wy1 - wy0, 1e-6)
    return (wx0 - pad, wy0 - pad, wx1 + pad, wy1 + pad)


# --------------------------------------------------------------------------
# walk on spheres


@dataclass
class HarmonicSample:
    """Hit distribution plus bookkeeping from a walker run."""

    hits: EmpiricalMeasure
    walker_stats: dict
    r_launch: float
    eps_hit: float
    delta: float

    def __post_init__(self):
        total = self.walker_stats["abandoned"] + len(self.hits)
        if self.walker_stats["abandoned"] > ABANDON_LIMIT * total:
            raise WalkerBudgetExceeded(
                f"{self.walker_stats['abandoned']} of {total} walkers abandoned"
            )


def sample_harmonic(
    f: RationalMap,
    grid: GridLabeling,
    n_walkers: int,
    seed: int,
    R_launch: float | None = None,
    eps_hit: float | None = None,
    max_steps: int = MAX_WALKER_STEPS,
) -> HarmonicSample:
    """Hitting distribution of Brownian motion from a distant circle.

    Walkers start uniformly on |z| = R_launch (the pole-at-infinity
    approximation; the bias is O(hull / R_launch) and controlled by the
    launch-radius stability property).  Inside the box they advance by
    walk-on-spheres on the conservative grid clearance; outside they
    jump in one exact step, via the Poisson kernel of the exterior of a
    disk enclosing all non-D_INF cells, back onto that disk's boundary.
    A walker hits when its cell is not D_INF or its clearance drops to
    eps_hit; it is abandoned (counted, not raised) after max_steps.
    """
    if n_walkers < 1:
        raise ValidationError("n_walkers must be >= 1")
    hull_r = grid.near_julia_hull_radius()
    if R_launch is None:
        R_launch = 4.0 * hull_r
    if R_launch < 4.0 * hull_r * (1.0 - 1e-12):
        raise ValidationError("R_launch must be at least 4x the witness hull radius")
    diag = grid.cell_diagonal
    if eps_hit is None:
        eps_hit = 0.5 * diag
    if eps_hit <= 0.0:
        raise ValidationError("eps_hit must be positive")

    x0, y0, x1, y1 = grid.bbox
    zc = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    xs, ys = grid.cell_centers()
    iy, ix = np.nonzero(grid.labels != D_INF)
    rho = float(np.max(np.hypot(xs[ix] - zc.real, ys[iy] - zc.imag))) + diag
    inradius = 0.5 * min(x1 - x0, y1 - y0)
    if rho > 0.98 * inradius:
        raise ValidationError(
            "return circle does not fit inside the box; enlarge the bounding box"
        )

    keys = stream_key(seed, WALKER_BASE + np.arange(n_walkers, dtype=np.uint64))
    counters = np.ones(n_walkers, dtype=np.uint64)  # draw 0 spent on launch
    u0 = uniform_at(keys, np.zeros(n_walkers, dtype=np.uint64))
    z = R_launch * np.exp(2j * np.pi * u0)
    steps = np.zeros(n_walkers, dtype=np.int64)
    active = np.ones(n_walkers, dtype=bool)
    hit = np.zeros(n_walkers, dtype=bool)

    while active.any():
        idx = np.nonzero(active)[0]
        za = z[idx]
        inside = grid.in_bbox(za)

        # hits are only decided inside the box
        hit_now = np.zeros(idx.size, dtype=bool)
        clear = np.zeros(idx.size, dtype=np.float64)
        if inside.any():
            ii = np.nonzero(inside)[0]
            ciy, cix = grid.cell_of(za[ii])
            lab = grid.labels[ciy, cix]
            clr = grid.clearance[ciy, cix]
            hit_now[ii] = (lab != D_INF) | (clr <= eps_hit)
            clear[ii] = clr

        newly_hit = idx[hit_now]
        hit[newly_hit] = True
        active[newly_hit] = False

        movers = idx[~hit_now]
        if movers.size == 0:
            continue
        exceeded = steps[movers] >= max_steps
        active[movers[exceeded]] = False
        movers = movers[~exceeded]
        if movers.size == 0:
            continue

        u = uniform_at(keys[movers], counters[movers])
        counters[movers] += np.uint64(1)
        steps[movers] += 1
        phase = np.exp(2j * np.pi * u)

        move_inside = grid.in_bbox(z[movers])
        # walk-on-spheres step for walkers inside the box
        if move_inside.any():
            mi = movers[move_inside]
            riy, rix = grid.cell_of(z[mi])
            z[mi] = z[mi] + grid.clearance[riy, rix] * phase[move_inside]
        # exact exterior-disk jump for walkers outside
        if (~move_inside).any():
            mo = movers[~move_inside]
            a = z[mo] - zc
            w = rho / a  # |w| < 1 because |a| > inradius >= rho / 0.98
            zeta = (phase[~move_inside] + w) / (1.0 + np.conj(w) * phase[~move_inside])
            z[mo] = zc + rho / zeta

    n_hits = int(hit.sum())
    if n_hits == 0:
        raise WalkerBudgetExceeded("no walker reached the boundary")
    stats = {
        "mean_steps": float(steps.mean()),
        "max_steps": int(steps.max()),
        "abandoned": int(n_walkers - n_hits),
    }
    return HarmonicSample(
        hits=from_atoms(z[hit]),
        walker_stats=stats,
        r_launch=float(R_launch),
        eps_hit=float(eps_hit),
        delta=grid.delta,
    )


# --------------------------------------------------------------------------
# Frostman-type diagnostics


def frostman_residual(nu: EmpiricalMeasure, probes_on_k, probes_in_d=None) -> dict:
    """Flatness of the empirical potential on the boundary, margin off it.

    On the support side the potential of the harmonic measure should be
    constant; max_dev is the largest deviation from its mean over the
    boundary probes.  min_margin (when interior-of-D_inf probes are
    supplied) is the smallest excess over that mean and should be > 0.
    """
    probes_on_k = np.asarray(probes_on_k, dtype=np.complex128).ravel()
    if probes_on_k.size == 0:
        raise ValidationError("need at least one boundary probe")
    p_k = empirical_potential(nu.points, nu.weights, probes_on_k)
    mean = float(p_k.mean())
    out = {"max_dev": float(np.max(np.abs(p_k - mean)))}
    if probes_in_d is not None:
        probes_in_d = np.asarray(probes_in_d, dtype=np.complex128).ravel()
        p_d = empirical_potential(nu.points, nu.weights, probes_in_d)
        out["min_margin"] = float(np.min(p_d - mean))
    else:
        out["min_margin"] = None
    return out


def probes_on_frontier(
    grid: GridLabeling,
    n: int,
    atoms=None,
    min_atom_distance: float | None = None,
) -> np.ndarray:
    """Deterministic probe points on the NEAR_JULIA/D_INF frontier.

    Frontier cell centers too close to the supplied atoms are rejected
    (the empirical potential is singular there); the survivors are
    ordered by angle around the witness centroid and strided down to n.
    """
    mask = grid.frontier_mask()
    iy, ix = np.nonzero(mask)
    if iy.size == 0:
        raise ValidationError("grid has no frontier cells")
    xs, ys = grid.cell_centers()
    pts = xs[ix] + 1j * ys[iy]
    if atoms is not None and len(np.asarray(atoms)) > 0:
        atoms = np.asarray(atoms, dtype=np.complex128).ravel()
        if min_atom_distance is None:
            min_atom_distance = 0.5 * grid.cell_diagonal
        tree = cKDTree(np.column_stack([atoms.real, atoms.imag]))
        dist, _ = tree.query(np.column_stack([pts.real, pts.imag]), k=1)
        far = dist > min_atom_distance
        if far.sum() >= max(n, 8):
            pts = pts[far]
        else:  # relax: keep the points farthest from the atoms
            order = np.argsort(-dist, kind="stable")
            pts = pts[order[: max(n, 8)]]
    c = grid.julia_witnesses.centroid()
    order = np.argsort(np.angle(pts - c), kind="stable")
    pts = pts[order]
    if pts.size <= n:
        return pts
    stride = np.linspace(0, pts.size - 1, n).astype(np.int64)
    return pts[stride]


def probes_in_dinf(grid: GridLabeling, n: int) -> np.ndarray:
    """Deterministic probe points deep inside D_INF (largest clearance)."""
    dinf = grid.labels == D_INF
    iy, ix = np.nonzero(dinf)
    clr = grid.clearance[iy, ix]
    order = np.lexsort((ix, iy, -clr))
    take = order[: max(n, 1)]
    xs, ys = grid.cell_centers()
    return xs[ix[take]] + 1j * ys[iy[take]]


def ks_uniform_angles(points, center=0.0) -> float:
    """Kolmogorov-Smirnov statistic of point angles against uniform."""
    z = np.asarray(points, dtype=np.complex128).ravel() - complex(center)
    u = (np.angle(z) / (2.0 * np.pi)) % 1.0
    return float(kstest(u, "uniform").statistic)


def binned_angle_tv(points_a, points_b, bins: int = 64, center=0.0) -> float:
    """Total variation between binned angular distributions of two clouds."""
    def hist(pts):
        z = np.asarray(pts, dtype=np.complex128).ravel() - complex(center)
        u = (np.angle(z) / (2.0 * np.pi)) % 1.0
        h, _ = np.histogram(u, bins=bins, range=(0.0, 1.0))
        return h / h.sum()

    return float(0.5 * np.abs(hist(points_a) - hist(points_b)).sum())
