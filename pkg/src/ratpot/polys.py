"""Polynomial kernel: ascending-coefficient helpers and root solving.

Coefficient vectors are numpy complex arrays in ascending order (index j is
the coefficient of z^j), matching numpy.polynomial conventions.  Root solving
is Aberth-Ehrlich simultaneous iteration, vectorized over a batch of
same-degree polynomials, with a companion-matrix fallback for stragglers.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import RootSolveFailure

ROOT_TOL = 1e-12          # residual tolerance, relative to coefficient scale
ROOT_MAX_ITER = 500
CLUSTER_RADIUS = 1e-6     # multiplicity clustering radius
PERFECT_POWER_TOL = 1e-8  # coefficient-space total-ramification test


def as_coeffs(c) -> np.ndarray:
    a = np.atleast_1d(np.asarray(c, dtype=np.complex128))
    if a.ndim != 1 or a.size == 0:
        raise ValueError("coefficient vector must be 1-d and non-empty")
    return a


def trim(c, rel_tol=1e-14) -> np.ndarray:
    """Drop trailing coefficients below rel_tol * max|c| (keep at least one)."""
    a = as_coeffs(c)
    scale = np.max(np.abs(a))
    if scale == 0.0:
        return a[:1] * 0.0
    keep = np.nonzero(np.abs(a) > rel_tol * scale)[0]
    return a[: keep[-1] + 1].copy()


def degree(c) -> int:
    return len(as_coeffs(c)) - 1


def polyval(c, z):
    return npoly.polyval(z, as_coeffs(c))


def log_abs_polyval(c, z):
    """log|p(z)|, stable for |z| >> 1 via the reversed polynomial.

    Vectorizes over z.  Returns -inf at exact roots.
    """
    a = as_coeffs(c)
    z = np.asarray(z, dtype=np.complex128)
    d = len(a) - 1
    az = np.abs(z)
    big = az > 1.0
    zs = np.where(big, 1.0, z)
    small_val = npoly.polyval(zs, a)
    zi = np.where(big, z, 1.0)
    rev_val = npoly.polyval(1.0 / zi, a[::-1])
    with np.errstate(divide="ignore"):
        out = np.where(
            big,
            d * np.log(np.where(big, az, 1.0)) + np.log(np.abs(rev_val)),
            np.log(np.abs(small_val)),
        )
    return out


# ---------------------------------------------------------------- roots

def _companion_roots(row):
    try:
        r = np.roots(row[::-1])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise RootSolveFailure(f"companion-matrix solve failed: {exc}") from exc
    return r


def aberth_batch(C, tol=ROOT_TOL, max_iter=ROOT_MAX_ITER):
    """Roots of a batch of same-degree polynomials.

    C has shape (B, m+1), ascending, with leading column bounded away from
    zero relative to each row's scale (caller deflates first).  Returns a
    (B, m) complex array; rows that Aberth could not converge are re-solved
    through the companion matrix.
    """
    C = np.asarray(C, dtype=np.complex128)
    B, k = C.shape
    m = k - 1
    if m < 1:
        return np.empty((B, 0), dtype=np.complex128)
    scale = np.max(np.abs(C), axis=1, keepdims=True)
    C = C / scale
    lead = C[:, -1]
    if m == 1:
        return (-C[:, 0] / lead)[:, None]

    D = C[:, 1:] * np.arange(1, m + 1)

    # Initial guesses on a circle: radius from the root-product estimate,
    # clipped into the Cauchy inclusion bound, angles offset to break symmetry.
    cauchy = 1.0 + np.max(np.abs(C[:, :-1]) / np.abs(lead)[:, None], axis=1)
    prod = np.abs(C[:, 0] / lead) ** (1.0 / m)
    radius = np.clip(prod, 1e-3 * cauchy, cauchy)
    angles = 2 * np.pi * (np.arange(m) + 0.37) / m + 0.4
    x = radius[:, None] * np.exp(1j * angles)[None, :]

    active = np.ones(B, dtype=bool)
    rtol_row = tol  # residual tolerance after row scaling (max|c| = 1)
    for _ in range(max_iter):
        xa = x[active]
        # Horner for p and p'
        p = np.full(xa.shape, C[active, -1][:, None])
        for j in range(m - 1, -1, -1):
            p = p * xa + C[active, j][:, None]
        dp = np.full(xa.shape, D[active, -1][:, None])
        for j in range(m - 2, -1, -1):
            dp = dp * xa + D[active, j][:, None]
        dp = np.where(dp == 0, 1e-30, dp)
        w = p / dp
        diff = xa[:, :, None] - xa[:, None, :]
        np.einsum("bii->bi", diff)[...] = np.inf
        s = np.sum(1.0 / diff, axis=2)
        corr = w / (1.0 - w * s)
        corr = np.where(np.isfinite(corr), corr, w)
        xa = xa - corr
        x[active] = xa

        scale_pt = np.maximum(1.0, np.abs(xa)) ** m
        resid_ok = np.abs(p) <= rtol_row * scale_pt * 10.0
        stalled = np.abs(corr) <= 1e-15 * (1.0 + np.abs(xa))
        done_rows = np.all(resid_ok | stalled, axis=1)
        idx = np.nonzero(active)[0]
        active[idx[done_rows]] = False
        if not active.any():
            break

    if active.any():
        # Residual check at final iterates; fall back where genuinely bad.
        for i in np.nonzero(active)[0]:
            row = C[i]
            xi = x[i]
            p = npoly.polyval(xi, row)
            ok = np.abs(p) <= 1e-9 * np.maximum(1.0, np.abs(xi)) ** m
            if not np.all(ok):
                x[i] = _companion_roots(row)
    return x


def roots(c, tol=ROOT_TOL, max_iter=ROOT_MAX_ITER) -> np.ndarray:
    """All complex roots of one polynomial (ascending coeffs, multiplicity kept)."""
    a = trim(as_coeffs(c))
    if len(a) <= 1:
        return np.empty(0, dtype=np.complex128)
    return aberth_batch(a[None, :], tol=tol, max_iter=max_iter)[0]


def cluster_points(vals, radius=CLUSTER_RADIUS):
    """Group near-coincident values; returns (centers, counts).

    Single-linkage at the given radius; each cluster is replaced by its
    centroid, which is exact for the symmetric clusters a multiple root
    produces.
    """
    v = np.asarray(vals, dtype=np.complex128).ravel()
    n = len(v)
    if n == 0:
        return np.empty(0, dtype=np.complex128), np.empty(0, dtype=np.int64)
    unassigned = np.ones(n, dtype=bool)
    centers, counts = [], []
    for i in range(n):
        if not unassigned[i]:
            continue
        member = np.zeros(n, dtype=bool)
        member[i] = True
        grew = True
        while grew:
            sel = v[member]
            near = unassigned & ~member
            idx = np.nonzero(near)[0]
            if len(idx) == 0:
                break
            d = np.min(np.abs(v[idx][:, None] - sel[None, :]), axis=1)
            add = idx[d <= radius]
            grew = len(add) > 0
            member[add] = True
        unassigned[member] = False
        centers.append(np.mean(v[member]))
        counts.append(int(np.sum(member)))
    return np.asarray(centers), np.asarray(counts, dtype=np.int64)


def perfect_power_root(c, rel_tol=PERFECT_POWER_TOL):
    """If p = lead * (z - r)^m coefficientwise, return (r, m); else None.

    This is the total-ramification test: root clustering cannot resolve an
    m-fold root sharper than residual^(1/m), but the coefficient comparison
    is exact up to rounding.
    """
    a = trim(as_coeffs(c))
    m = len(a) - 1
    if m < 1:
        return None
    r = -a[m - 1] / (m * a[m])
    model = a[m] * npoly.polypow(np.array([-r, 1.0]), m)
    if np.max(np.abs(model - a)) <= rel_tol * np.max(np.abs(a)):
        return complex(r), m
    return None


def resultant_forms(f0, f1, d) -> complex:
    """Resultant of two degree-d binary forms given by length d+1 vectors.

    Vectors are ascending in the second variable; the Sylvester matrix is
    built on the full padded vectors so common zeros at [0:1] are detected.
    """
    a = np.zeros(d + 1, dtype=np.complex128)
    b = np.zeros(d + 1, dtype=np.complex128)
    a[: len(as_coeffs(f0))] = as_coeffs(f0)
    b[: len(as_coeffs(f1))] = as_coeffs(f1)
    n = 2 * d
    S = np.zeros((n, n), dtype=np.complex128)
    desc_a = a[::-1]
    desc_b = b[::-1]
    for i in range(d):
        S[i, i : i + d + 1] = desc_a
        S[d + i, i : i + d + 1] = desc_b
    return complex(np.linalg.det(S))
