"""Normalized lemniscates of the scaled lift, and the curve checks.

Scaling the homogeneous lift by c with log|c| = -(d-1)(I + G(0,1))
pins the escape rate so that G^{cF}(0,1) = -I, where I is the energy of
the balanced measure.  The order-n lemniscate is then the level-1 set
of |(cF)_0^{(n)}(1, .)|, the scaled denominator of the n-th iterate.
When the balanced and harmonic measures agree, the Julia set sits
inside the order-1 lemniscate, all orders trace the same curve, and
the curve is forward invariant; the four statistics computed here turn
those set-theoretic statements into numbers.

Values of the scaled denominator are never computed from expanded
iterate coefficients (their magnitude is hopeless past order two);
instead the renormalized projective orbit carries an explicit log
scale, which is exact up to rounding and immune to pole crossings.
Tracing runs marching squares on the log magnitude and then polishes
each vertex by a Newton step along the gradient, which is what pushes
vertex residuals from grid-interpolation size down to rounding size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from skimage import measure as skmeasure

from . import escape, polys
from .equilibrium import EmpiricalMeasure
from .errors import (
    DegenerateLemniscate,
    EmptyLevelSet,
    NormalizationMismatch,
    ValidationError,
)
from .maps import RationalMap, compose_lift
from .rng import STREAM_COMPOSITION, rng_stream

# post-verification gate for G^{cF}(0,1) = -I
NORMALIZATION_TOL = 1e-6

# traced vertices must satisfy | |value| - 1 | below this
TRACE_TOL = 1e-3

# Newton polishing iterations per traced vertex
POLISH_ITERS = 3

# substitute for +-inf when contouring the log magnitude
LOG_CLAMP = 1e6


# --------------------------------------------------------------------------
# normalization


def normalization_constant(f: RationalMap, ev, I: float) -> complex:
    """The real positive c with log|c| = -(d-1)(I + G(0,1)).

    Post-verified by building the escape-rate evaluator of the scaled
    lift and checking G^{cF}(0,1) = -I to NORMALIZATION_TOL; failure
    means the energy estimate and the escape-rate machinery disagree.
    """
    if not np.isfinite(I):
        raise ValidationError("energy must be finite")
    d = f.degree
    c = float(np.exp(-(d - 1) * (I + ev.g01)))
    ev_scaled = escape.EscapeRateEvaluator(
        f.lift.scaled(c), tol=ev.tol, max_depth=ev.max_depth
    )
    if abs(ev_scaled.g01 + I) > NORMALIZATION_TOL:
        raise NormalizationMismatch(
            f"G^cF(0,1) = {ev_scaled.g01:.3e} but -I = {-I:.3e}"
        )
    return complex(c)


@dataclass
class LevelSetTrace:
    """Polylines approximating one lemniscate, with grid metadata."""

    polylines: list
    bbox: tuple
    nx: int
    ny: int
    trace_tol: float

    def vertices(self) -> np.ndarray:
        if not self.polylines:
            return np.empty(0, dtype=np.complex128)
        return np.concatenate([np.asarray(p, dtype=np.complex128) for p in self.polylines])

    def __len__(self) -> int:
        return len(self.polylines)


@dataclass
class NormalizedLemniscate:
    """Level-1 set data of |(cF)_0^{(n)}(1, .)|.

    denom_poly holds the ascending coefficients of the scaled univariate
    denominator when they are representable (orders 1 and 2); higher
    orders evaluate through the telescoped projective orbit only, per
    the coefficient-growth note in the module docstring.  f may be None
    for synthetic single-polynomial lemniscates (then denom_poly is the
    whole story).
    """

    c: complex
    n: int
    denom_poly: np.ndarray | None
    f: RationalMap | None = None
    ev: object = None
    energy: float = 0.0
    trace: LevelSetTrace | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("lemniscate order must be >= 1")
        if self.f is None and self.denom_poly is None:
            raise ValidationError("need a map or explicit coefficients")
        if self.denom_poly is not None:
            self.denom_poly = np.asarray(self.denom_poly, dtype=np.complex128)

    # -- value machinery ---------------------------------------------------

    def log_value(self, z) -> np.ndarray:
        """log |(cF)_0^{(n)}(1, z)|, elementwise; -inf at zeros, +inf at poles
        of the telescoped form (which only occur off the curve)."""
        if self.f is None:
            # denom_poly carries the complete scaled coefficients
            zz = np.asarray(z, dtype=np.complex128)
            with np.errstate(divide="ignore"):
                return np.log(np.abs(npoly.polyval(zz, self.denom_poly)))
        return _log_denominator_value(self.f, self.c, self.n, z)

    def value(self, z) -> np.ndarray:
        """|(cF)_0^{(n)}(1, z)|; underflow comes out as 0."""
        with np.errstate(over="ignore"):
            return np.exp(self.log_value(z))


def _log_denominator_value(f: RationalMap, c: complex, n: int, z) -> np.ndarray:
    """Telescoped log |(cF)_0^{(n)}(1, z)| via the renormalized orbit.

    Carries the iterate's log scale explicitly: after each application
    of the lift, the scale multiplies by d and gains log||F(U)||.  The
    0-component of the unit vector then supplies the final term.
    """
    d = f.degree
    e_n = (d**n - 1) // (d - 1)
    zz = np.asarray(z, dtype=np.complex128)
    flat = zz.ravel()
    finite = np.isfinite(flat.real) & np.isfinite(flat.imag)

    out = np.full(flat.shape, np.inf, dtype=np.float64)  # poles at infinity
    if finite.any():
        zf = flat[finite]
        nrm = np.sqrt(1.0 + np.abs(zf) ** 2)
        U = np.empty(zf.shape + (2,), dtype=np.complex128)
        U[..., 0] = 1.0 / nrm
        U[..., 1] = zf / nrm
        log_scale = np.log(nrm)
        for _ in range(n):
            V = f.lift.eval(U)
            nv = np.sqrt(np.abs(V[..., 0]) ** 2 + np.abs(V[..., 1]) ** 2)
            log_scale = d * log_scale + np.log(nv)
            U = V / nv[..., None]
        with np.errstate(divide="ignore"):
            out[finite] = log_scale + np.log(np.abs(U[..., 0]))
    return (e_n * np.log(abs(c)) + out).reshape(zz.shape)


def make_lemniscate(
    f: RationalMap,
    ev,
    I: float,
    n: int = 1,
    c: complex | None = None,
) -> NormalizedLemniscate:
    """Normalized order-n lemniscate of f (c computed unless supplied)."""
    if polys.degree(polys.trim(f.lift.f0)) == 0:
        raise DegenerateLemniscate(
            "denominator of the lift is constant (polynomial map); "
            "its level set is not a curve"
        )
    if c is None:
        c = normalization_constant(f, ev, I)
    d = f.degree
    if n == 1:
        coeffs = c * f.lift.f0
    elif n == 2:
        coeffs = c ** (d + 1) * compose_lift(f.lift, f.lift).f0
    else:
        coeffs = None
    return NormalizedLemniscate(c=c, n=n, denom_poly=coeffs, f=f, ev=ev, energy=float(I))


def lemniscate_value(L: NormalizedLemniscate, z) -> np.ndarray:
    return L.value(z)


# --------------------------------------------------------------------------
# the composition identity


def composition_identity_residual(f: RationalMap, c: complex, samples: int = 100, seed: int = 0) -> float:
    """Max relative gap in (cF)_0^{(2)}(1,z) = (cF)_0(1,f z) * (cF)_0(1,z)^d.

    One side expands the composed lift's coefficients, the other
    multiplies pointwise values, so agreement exercises both the
    composition arithmetic and the evaluators.  Exact identity; the
    residual is pure rounding.
    """
    d = f.degree
    den2 = compose_lift(f.lift, f.lift).f0
    st = rng_stream(seed, STREAM_COMPOSITION)
    zs = []
    # oversample and reject points too close to the poles of f
    while len(zs) < samples:
        u = st.uniform(2 * samples)
        cand = (4.0 * u[0::2] - 2.0) + 1j * (4.0 * u[1::2] - 2.0)
        den_vals = np.abs(npoly.polyval(cand, f.lift.f0))
        img = f(cand)
        good = (den_vals > 1e-6) & np.isfinite(img.real) & np.isfinite(img.imag)
        zs.extend(cand[good].tolist())
    z = np.asarray(zs[:samples], dtype=np.complex128)

    fz = f(z)
    scale = complex(c) ** (d + 1)
    lhs = scale * npoly.polyval(z, den2)
    rhs = scale * npoly.polyval(fz, f.lift.f0) * npoly.polyval(z, f.lift.f0) ** d
    denom = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
    return float(np.max(np.abs(lhs - rhs) / denom))


# --------------------------------------------------------------------------
# claim statistics


def claim_checks(
    f: RationalMap,
    L: NormalizedLemniscate,
    mu: EmpiricalMeasure,
    trace: LevelSetTrace | None = None,
) -> dict:
    """Four numbers behind the lemniscate claims.

    julia_containment   max over Julia witnesses of ||(cF)_0(1,z)| - 1|
    level_coincidence   max over traced vertices of ||(cF)_0^{(2)}(1,v)| - 1|
    forward_invariance  max over traced vertices of ||(cF)_0(1,f(v))| - 1|
    doubling            max over traced vertices of |(p(f v)-I) - d(p(v)-I)|

    Polynomial maps have a constant denominator and no curve to check;
    that is reported as DegenerateLemniscate rather than four zeros.
    """
    if polys.degree(polys.trim(f.lift.f0)) == 0:
        raise DegenerateLemniscate(
            "denominator of the lift is constant (polynomial map); "
            "the level-set checks are vacuous"
        )
    trace = trace if trace is not None else L.trace
    if trace is None or len(trace.vertices()) == 0:
        raise ValidationError("claim checks need a traced lemniscate")
    if len(mu) == 0:
        raise ValidationError("claim checks need Julia witnesses")

    order1 = L if L.n == 1 else NormalizedLemniscate(c=L.c, n=1, denom_poly=None, f=f, ev=L.ev, energy=L.energy)
    order2 = NormalizedLemniscate(c=L.c, n=2, denom_poly=None, f=f, ev=L.ev, energy=L.energy)

    verts = trace.vertices()
    fv = f(verts)

    stats = {
        "julia_containment": float(np.max(np.abs(order1.value(mu.points) - 1.0))),
        "level_coincidence": float(np.max(np.abs(order2.value(verts) - 1.0))),
        "forward_invariance": float(np.max(np.abs(order1.value(fv) - 1.0))),
    }
    p_v = escape.potential(L.ev, verts)
    p_fv = escape.potential(L.ev, fv)
    I = L.energy
    stats["doubling"] = float(np.max(np.abs((p_fv - I) - f.degree * (p_v - I))))
    return stats


# --------------------------------------------------------------------------
# tracing


def trace_level_set(L: NormalizedLemniscate, bbox, nx: int, ny: int) -> LevelSetTrace:
    """Marching-squares trace of the level-1 set, Newton polished.

    The contour is extracted from log|value| at level 0 on an (nx, ny)
    node grid over bbox, each vertex is pushed onto the curve along the
    gradient of log|Q| when univariate coefficients are available, and
    vertices that still miss the level by more than TRACE_TOL are
    dropped.  No sign change anywhere raises EmptyLevelSet.
    """
    if nx < 64 or ny < 64:
        raise ValidationError("tracing grid must be at least 64x64")
    x0, y0, x1, y1 = (float(v) for v in bbox)
    if not (x1 > x0 and y1 > y0):
        raise ValidationError("bounding box is degenerate")

    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    Z = xs[None, :] + 1j * ys[:, None]
    logv = L.log_value(Z)
    logv = np.nan_to_num(logv, nan=LOG_CLAMP, posinf=LOG_CLAMP, neginf=-LOG_CLAMP)

    if not (np.any(logv > 0.0) and np.any(logv < 0.0)):
        raise EmptyLevelSet("the level-1 set does not meet the grid")
    contours = skmeasure.find_contours(logv, 0.0)
    if not contours:
        raise EmptyLevelSet("no level crossing found by the tracer")

    sx = (x1 - x0) / (nx - 1)
    sy = (y1 - y0) / (ny - 1)
    polish = L.denom_poly is not None
    if polish:
        q = L.denom_poly
        dq = npoly.polyder(q)
        log_c_term = 0.0  # the c power is already inside denom_poly

    polylines = []
    for arr in contours:
        v = (x0 + arr[:, 1] * sx) + 1j * (y0 + arr[:, 0] * sy)
        if polish:
            for _ in range(POLISH_ITERS):
                qv = npoly.polyval(v, q)
                rv = npoly.polyval(v, dq)
                ok = (np.abs(qv) > 0) & np.isfinite(qv) & (np.abs(rv) > 0) & np.isfinite(rv)
                ratio = np.where(ok, rv / np.where(qv == 0, 1, qv), 0)
                g = np.where(ok, np.log(np.abs(np.where(qv == 0, 1, qv))) + log_c_term, 0.0)
                step = np.where(
                    ok & (np.abs(ratio) > 1e-12),
                    g * np.conj(ratio) / np.maximum(np.abs(ratio) ** 2, 1e-300),
                    0.0,
                )
                v = v - step
        vals = L.value(v)
        keep = np.abs(vals - 1.0) < TRACE_TOL
        if keep.any():
            polylines.append(v[keep])

    if not polylines:
        raise EmptyLevelSet("all traced vertices failed post-verification")
    return LevelSetTrace(polylines=polylines, bbox=(x0, y0, x1, y1), nx=nx, ny=ny, trace_tol=TRACE_TOL)
