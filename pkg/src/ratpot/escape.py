"""Escape rate of a homogeneous lift and the planar potential it induces.

The escape rate of a lift F of degree d at a coordinate pair Z is the limit
of log||F^n(Z)|| / d^n.  It is computed by the renormalized accumulation

    G(Z) = log||Z|| + sum_{k>=1} d^{-k} log||F(W_{k-1})||,

where W_0 = Z/||Z|| and each W_k is F(W_{k-1}) renormalized to the unit
sphere.  Because ||F(W)|| on the unit sphere is pinched between two positive
constants m and M, the terms decay geometrically and the series can be cut
once the tail bound drops below the requested tolerance.

The planar potential of the map is p(z) = G(1, z) - G(0, 1); the subtracted
base height makes p independent of the lift's scalar normalization.
"""
from __future__ import annotations

import numpy as np

from .errors import DepthExceeded, PoleProximity, ValidationError
from .maps import HomogeneousLift, ProjectivePoint, RationalMap, normalize_rows
from .rng import STREAM_FUNC_EQ, STREAM_SPHERE_BOUNDS, rng_stream

BOUNDS_SAMPLES = 10_000
BOUNDS_SEED = 0x5EED_B0B5   # internal, independent of user seeds
LOG_RANGE_SAFETY = 2.0
LOG_RANGE_FLOOR = 0.05


def _unit_sphere_samples(n: int) -> np.ndarray:
    """Deterministic spread of unit-norm coordinate pairs (fixed stream)."""
    s = rng_stream(BOUNDS_SEED, STREAM_SPHERE_BOUNDS)
    x = s.standard_normal(4 * n).reshape(n, 4)
    W = x[:, 0] + 1j * x[:, 1], x[:, 2] + 1j * x[:, 3]
    return normalize_rows(np.stack(W, axis=-1))


class EscapeRateEvaluator:
    """Evaluates the escape rate of one lift to a fixed tolerance.

    The truncation depth is chosen up front from sampled sphere bounds on
    log||F|| (safety factor 2), so every evaluation runs the same number of
    renormalized steps and batches cleanly.
    """

    def __init__(
        self,
        lift: HomogeneousLift,
        tol: float = 1e-12,
        max_depth: int = 64,
        depth: int | None = None,
    ):
        if tol <= 0:
            raise ValidationError("tolerance must be positive")
        self.lift = lift
        self.tol = float(tol)
        self.max_depth = int(max_depth)
        d = lift.degree
        W = _unit_sphere_samples(BOUNDS_SAMPLES)
        nrm = np.linalg.norm(lift.eval(W), axis=-1)
        self.sphere_min = float(np.min(nrm))
        self.sphere_max = float(np.max(nrm))
        if self.sphere_min <= 0.0:
            raise ValidationError("lift norm vanished on the sphere sample")
        bound = LOG_RANGE_SAFETY * max(
            abs(np.log(self.sphere_min)), abs(np.log(self.sphere_max)), LOG_RANGE_FLOOR
        )
        self.log_bound = bound
        if depth is not None:
            # explicit truncation (refinement studies); bypasses the tol rule
            if depth < 1:
                raise ValidationError("depth must be >= 1")
            k = int(depth)
        else:
            # smallest k with bound * d^-k / (d-1) <= tol
            k = int(np.ceil(np.log(bound / (self.tol * (d - 1))) / np.log(d)))
            k = max(k, 1)
        if k > self.max_depth:
            raise DepthExceeded(
                f"required depth {k} exceeds max_depth {self.max_depth}"
            )
        self.depth = k
        self._g01 = None

    # -------------------------------------------------- core evaluation

    def value(self, Z, depth: int | None = None):
        """Escape rate at Z: a ProjectivePoint, a pair, or an (..., 2) array."""
        if isinstance(Z, ProjectivePoint):
            return float(self.value(Z.as_array()[None, :], depth=depth)[0])
        W = np.asarray(Z, dtype=np.complex128)
        scalar = W.ndim == 1
        if scalar:
            W = W[None, :]
        if W.shape[-1] != 2:
            raise ValidationError("expected coordinate pairs of shape (..., 2)")
        d = self.lift.degree
        depth = self.depth if depth is None else int(depth)
        nrm = np.sqrt(np.abs(W[..., 0]) ** 2 + np.abs(W[..., 1]) ** 2)
        if np.any(nrm == 0.0):
            raise ValidationError("zero coordinate pair")
        total = np.log(nrm)
        W = W / nrm[..., None]
        w = 1.0
        for _ in range(depth):
            V = self.lift.eval(W)
            nrm = np.sqrt(np.abs(V[..., 0]) ** 2 + np.abs(V[..., 1]) ** 2)
            w /= d
            total = total + w * np.log(nrm)
            W = V / nrm[..., None]
        return float(total[0]) if scalar else total

    @property
    def g01(self) -> float:
        """Base height G(0, 1), cached."""
        if self._g01 is None:
            self._g01 = float(self.value(np.array([0.0 + 0j, 1.0 + 0j])))
        return self._g01

    def potential(self, z):
        """Planar potential p(z) = G(1, z) - G(0, 1); vectorizes over z."""
        z = np.asarray(z, dtype=np.complex128)
        scalar = z.ndim == 0
        zz = np.atleast_1d(z)
        W = np.stack([np.ones_like(zz), zz], axis=-1)
        out = self.value(W) - self.g01
        return float(out[0]) if scalar else out


# ---------------------------------------------------------------- operations

def escape_rate(ev: EscapeRateEvaluator, Z):
    return ev.value(Z)


def potential(ev: EscapeRateEvaluator, z):
    return ev.potential(z)


def _log_abs_f0_at(ev: EscapeRateEvaluator, W: np.ndarray) -> np.ndarray:
    """log|F0(1, w)| for unit rows W via homogeneity: log|F0(W)| - d log|w0|."""
    lift = ev.lift
    V = lift.eval(W)
    a0 = np.abs(V[..., 0])
    z0 = np.abs(W[..., 0])
    # pole guard: the affine denominator value must clear an underflow floor
    f0 = lift.f0
    e = len(np.trim_zeros(f0, "b")) - 1
    e = max(e, 0)
    scale = np.max(np.abs(f0))
    floor = 1e-12 * scale * np.maximum(z0, np.abs(W[..., 1])) ** e * z0 ** (lift.degree - e)
    if np.any(a0 <= floor):
        raise PoleProximity("an iterate lies too close to a pole")
    with np.errstate(divide="ignore"):
        return np.log(a0) - lift.degree * np.log(z0)


def pullback_residual(ev: EscapeRateEvaluator, n: int, z) -> float:
    """Worst defect of the n-step potential pullback identity over z.

    Both sides are formed from escape rates: p(f^n z) plus the log-magnitude
    of the n-fold denominator form at z, against d^n p(z) + (d^n - 1) G(0,1).
    The denominator log accumulates per orbit step, which keeps every factor
    on the unit sphere.  z may be a scalar or an array of points.
    """
    n = int(n)
    if n < 1:
        raise ValidationError("n must be >= 1")
    d = ev.lift.degree
    za = np.asarray(z, dtype=np.complex128).ravel()
    W = normalize_rows(np.stack([np.ones_like(za), za], axis=-1))
    log_f0n = np.zeros(za.shape, dtype=np.float64)
    for k in range(n):
        log_f0n += d ** (n - 1 - k) * _log_abs_f0_at(ev, W)
        W = normalize_rows(ev.lift.eval(W))
    # potential at the affine image of W, computed projectively:
    # p(w) = G(W) - log|w0| - G(0,1) for any representative W
    z0 = np.abs(W[..., 0])
    if np.any(z0 == 0.0):
        raise PoleProximity("orbit reached infinity exactly")
    lhs = ev.value(W) - np.log(z0) - ev.g01 + log_f0n
    rhs = d ** n * np.asarray(ev.potential(za)) + (d ** n - 1) * ev.g01
    return float(np.max(np.abs(lhs - rhs)))


def functional_equation_residuals(ev: EscapeRateEvaluator, samples: int = 100,
                                  seed: int = 0) -> dict:
    """Max residuals of the four defining identities over random sphere points.

    fe: G(F Z) = d G(Z); hom: G(cZ) = G(Z) + log|c|; scale: the rate of cF
    is G + log|c|/(d-1); iterate: the rate of F∘F equals G.  Scalars c run
    over {0.5, 2, 1+i}.
    """
    s = rng_stream(seed, STREAM_FUNC_EQ)
    x = s.standard_normal(4 * samples).reshape(samples, 4)
    W = normalize_rows(np.stack([x[:, 0] + 1j * x[:, 1], x[:, 2] + 1j * x[:, 3]], axis=-1))
    d = ev.lift.degree
    G = ev.value(W)

    fe = float(np.max(np.abs(ev.value(ev.lift.eval(W)) - d * G)))
    hom = 0.0
    scale = 0.0
    for c in (0.5, 2.0, 1.0 + 1.0j):
        hom = max(hom, float(np.max(np.abs(ev.value(c * W) - G - np.log(abs(c))))))
        ev_c = EscapeRateEvaluator(ev.lift.scaled(c), tol=ev.tol, max_depth=ev.max_depth)
        scale = max(scale, float(np.max(np.abs(
            ev_c.value(W) - G - np.log(abs(c)) / (d - 1)))))
    ev2 = EscapeRateEvaluator(ev.lift.compose(ev.lift), tol=ev.tol,
                              max_depth=ev.max_depth)
    iterate = float(np.max(np.abs(ev2.value(W) - G)))
    return {"fe": fe, "hom": hom, "scale": scale, "iterate": iterate}


def evaluator_for(f: RationalMap, tol: float = 1e-12, max_depth: int = 64,
                  depth: int | None = None) -> EscapeRateEvaluator:
    """Evaluator on the canonical lift of f."""
    return EscapeRateEvaluator(f.lift, tol=tol, max_depth=max_depth, depth=depth)
