"""Rational maps on the Riemann sphere and their homogeneous lifts.

A degree-d rational map f = num/den is carried around together with a
canonical homogeneous lift F = (F0, F1): two degree-d binary forms with
f(z) = F1(1, z) / F0(1, z), scaled so the largest coefficient magnitude
across both forms is exactly 1.  Form coefficients are stored ascending in
the second variable: index j holds the coefficient of z0^(d-j) z1^j, so the
length-(d+1) vector doubles as the ascending coefficient vector of the
dehomogenized polynomial F_i(1, z).

Points live on the sphere as unit-norm coordinate pairs (z0, z1) with
affine value z1/z0; infinity is [0:1].
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import polys
from .errors import (
    CoefficientOverflow,
    DegenerateEvaluation,
    NotExceptional,
    RootSolveFailure,
    ValidationError,
)

CHORDAL_MATCH = 1e-6     # identification radius for sphere points
TAU_LEAD = 1e-12
TAU_RES = 1e-12
TAU_GCD = 1e-9
TAU_FORM = 1e-8


# ---------------------------------------------------------------- points

class ProjectivePoint:
    """Unit-norm homogeneous coordinates [z0 : z1]; affine value is z1/z0."""

    __slots__ = ("z0", "z1")

    def __init__(self, z0, z1):
        z0 = complex(z0)
        z1 = complex(z1)
        n = np.hypot(abs(z0), abs(z1))
        if not np.isfinite(n) or n == 0.0:
            raise ValidationError(f"invalid homogeneous coordinates ({z0}, {z1})")
        self.z0 = z0 / n
        self.z1 = z1 / n

    @classmethod
    def from_affine(cls, z):
        return cls(1.0, complex(z))

    @classmethod
    def infinity(cls):
        return cls(0.0, 1.0)

    @property
    def is_infinity(self) -> bool:
        return self.z0 == 0.0

    def affine(self) -> complex:
        if self.z0 == 0.0:
            return complex(np.inf, 0.0)
        return self.z1 / self.z0

    def chordal(self, other: "ProjectivePoint") -> float:
        return abs(self.z0 * other.z1 - self.z1 * other.z0)

    def chordal_to_infinity(self) -> float:
        return abs(self.z0)

    def as_array(self) -> np.ndarray:
        return np.array([self.z0, self.z1], dtype=np.complex128)

    def __repr__(self):
        if self.is_infinity:
            return "ProjectivePoint(inf)"
        return f"ProjectivePoint({self.affine():.6g})"


def chordal_from_affine(z) -> np.ndarray:
    """Chordal distance to infinity of affine points: 1/sqrt(1+|z|^2)."""
    z = np.asarray(z, dtype=np.complex128)
    return 1.0 / np.sqrt(1.0 + np.abs(z) ** 2)


def normalize_rows(W):
    """Normalize (..., 2) coordinate pairs to unit norm."""
    W = np.asarray(W, dtype=np.complex128)
    n = np.sqrt(np.abs(W[..., 0]) ** 2 + np.abs(W[..., 1]) ** 2)
    if np.any(n == 0.0) or not np.all(np.isfinite(n)):
        raise DegenerateEvaluation("zero or non-finite homogeneous coordinates")
    return W / n[..., None]


# ---------------------------------------------------------------- polynomials

class Poly:
    """Ascending-coefficient polynomial with a validated leading term."""

    def __init__(self, coeffs, tau_lead=TAU_LEAD):
        a = polys.as_coeffs(coeffs)
        if not np.all(np.isfinite(a)):
            raise ValidationError("polynomial coefficients must be finite")
        scale = np.max(np.abs(a))
        if scale == 0.0:
            raise ValidationError("zero polynomial")
        if abs(a[-1]) <= tau_lead * scale:
            raise ValidationError(
                f"leading coefficient {a[-1]} vanishes relative to scale {scale:g}"
            )
        self.coeffs = a

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return npoly.polyval(np.asarray(z, dtype=np.complex128), self.coeffs)

    def roots(self):
        return polys.roots(self.coeffs)

    def __repr__(self):
        return f"Poly(degree={self.degree})"


# ---------------------------------------------------------------- lifts

class HomogeneousLift:
    """A pair of degree-d binary forms (F0, F1) with nonzero resultant."""

    def __init__(self, f0, f1, tau_res=TAU_RES):
        f0 = polys.as_coeffs(f0)
        f1 = polys.as_coeffs(f1)
        if len(f0) != len(f1):
            raise ValidationError("lift components must share one degree")
        if not (np.all(np.isfinite(f0)) and np.all(np.isfinite(f1))):
            raise CoefficientOverflow("non-finite lift coefficients")
        d = len(f0) - 1
        if d < 2:
            raise ValidationError(f"lift degree {d} < 2")
        scale = max(np.max(np.abs(f0)), np.max(np.abs(f1)))
        if scale == 0.0:
            raise ValidationError("zero lift")
        # The resultant is a product of 2d factors, so compare its geometric
        # mean per factor against the tolerance; a flat cut would reject
        # healthy high-degree lifts whose resultant underflows.
        res = polys.resultant_forms(f0 / scale, f1 / scale, d)
        if abs(res) ** (1.0 / (2 * d)) <= tau_res:
            raise ValidationError(
                f"degenerate lift: resultant {abs(res):.3e} below tolerance"
            )
        self.f0 = f0
        self.f1 = f1
        self.degree = d

    def scaled(self, c) -> "HomogeneousLift":
        c = complex(c)
        return HomogeneousLift(self.f0 * c, self.f1 * c)

    def eval(self, W) -> np.ndarray:
        """Evaluate both forms at coordinate pairs W of shape (..., 2).

        Horner runs in whichever variable dominates, so unit-norm input
        never overflows. Output is unnormalized.
        """
        W = np.asarray(W, dtype=np.complex128)
        w0, w1 = W[..., 0], W[..., 1]
        big0 = np.abs(w0) >= np.abs(w1)
        t = np.where(big0, w1, w0) / np.where(big0, np.where(w0 == 0, 1, w0),
                                              np.where(w1 == 0, 1, w1))
        lead = np.where(big0, w0, w1) ** self.degree
        v0 = np.where(big0, npoly.polyval(t, self.f0), npoly.polyval(t, self.f0[::-1]))
        v1 = np.where(big0, npoly.polyval(t, self.f1), npoly.polyval(t, self.f1[::-1]))
        out = np.stack([v0 * lead, v1 * lead], axis=-1)
        if np.any(np.all(out == 0.0, axis=-1)):
            raise DegenerateEvaluation("both lift components vanished")
        return out

    def compose(self, other: "HomogeneousLift") -> "HomogeneousLift":
        """Lift of the composition: self after other, degree d1*d2.

        Done by formal polynomial arithmetic on the dehomogenized components,
        which determines the forms completely.
        """
        g0, g1 = other.f0, other.f1
        dF = self.degree
        # powers of g0 and g1 up to dF
        pow0 = [np.array([1.0 + 0j])]
        pow1 = [np.array([1.0 + 0j])]
        for _ in range(dF):
            pow0.append(npoly.polymul(pow0[-1], g0))
            pow1.append(npoly.polymul(pow1[-1], g1))
        target = dF * other.degree + 1
        h0 = np.zeros(target, dtype=np.complex128)
        h1 = np.zeros(target, dtype=np.complex128)
        for j in range(dF + 1):
            term = npoly.polymul(pow0[dF - j], pow1[j])
            h0[: len(term)] += self.f0[j] * term
            h1[: len(term)] += self.f1[j] * term
        if not (np.all(np.isfinite(h0)) and np.all(np.isfinite(h1))):
            raise CoefficientOverflow("lift composition overflowed")
        return HomogeneousLift(h0, h1)

    def __repr__(self):
        return f"HomogeneousLift(degree={self.degree})"


def compose_lift(F: HomogeneousLift, G: HomogeneousLift) -> HomogeneousLift:
    return F.compose(G)


# ---------------------------------------------------------------- rational maps

class RationalMap:
    """Reduced rational map of degree d >= 2 with its canonical lift."""

    def __init__(self, numerator, denominator, name=None):
        num = Poly(numerator)
        den = Poly(denominator)
        d = max(num.degree, den.degree)
        if d < 2:
            raise ValidationError(f"degree {d} < 2 is not supported")
        self._check_reduced(num, den)
        self.numerator = num
        self.denominator = den
        self.degree = d
        self.name = name
        f0 = np.zeros(d + 1, dtype=np.complex128)
        f1 = np.zeros(d + 1, dtype=np.complex128)
        f0[: den.degree + 1] = den.coeffs
        f1[: num.degree + 1] = num.coeffs
        scale = max(np.max(np.abs(f0)), np.max(np.abs(f1)))
        self.lift = HomogeneousLift(f0 / scale, f1 / scale)
        self.lift_scale = 1.0 / scale

    @staticmethod
    def _check_reduced(num: Poly, den: Poly):
        if den.degree == 0:
            return
        den_roots = den.roots()
        scale_n = np.max(np.abs(num.coeffs))
        for r in den_roots:
            val = abs(num(r)) / (scale_n * max(1.0, abs(r)) ** num.degree)
            if val <= TAU_GCD:
                raise ValidationError(
                    f"numerator and denominator share a root near {r:.9g}; "
                    "supply the map in reduced form"
                )
        if num.degree > 0:
            num_roots = num.roots()
            scale_d = np.max(np.abs(den.coeffs))
            for r in num_roots:
                val = abs(den(r)) / (scale_d * max(1.0, abs(r)) ** den.degree)
                if val <= TAU_GCD:
                    raise ValidationError(
                        f"numerator and denominator share a root near {r:.9g}; "
                        "supply the map in reduced form"
                    )

    def __call__(self, z):
        if isinstance(z, ProjectivePoint):
            return evaluate_map(self, z)
        W = normalize_rows(np.stack(
            [np.ones_like(np.asarray(z, dtype=np.complex128)),
             np.asarray(z, dtype=np.complex128)], axis=-1))
        V = self.lift.eval(W)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = V[..., 1] / V[..., 0]
        return out if np.ndim(z) else complex(out)

    def label(self) -> str:
        return self.name if self.name else f"degree-{self.degree} map"

    def __repr__(self):
        return f"RationalMap({self.label()})"


def evaluate_map(f: RationalMap, p: ProjectivePoint) -> ProjectivePoint:
    V = f.lift.eval(p.as_array())
    return ProjectivePoint(V[0], V[1])


def evaluate_projective_batch(f: RationalMap, W: np.ndarray) -> np.ndarray:
    """One map step on unit-norm rows (..., 2); output renormalized."""
    return normalize_rows(f.lift.eval(W))


# ---------------------------------------------------------------- fibers

class SphericalPointSet:
    """Sphere points with integer multiplicities (a fiber, typically)."""

    def __init__(self, points, multiplicities):
        self.points = list(points)
        self.multiplicities = [int(m) for m in multiplicities]
        if len(self.points) != len(self.multiplicities):
            raise ValidationError("points and multiplicities must align")

    def total(self) -> int:
        return sum(self.multiplicities)

    def support_affine(self):
        """Affine values of the support; infinity appears as complex(inf)."""
        return [p.affine() for p in self.points]

    def __iter__(self):
        return iter(zip(self.points, self.multiplicities))

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        items = ", ".join(
            f"{p!r}x{m}" for p, m in zip(self.points, self.multiplicities))
        return f"SphericalPointSet({items})"


def _as_point(a) -> ProjectivePoint:
    if isinstance(a, ProjectivePoint):
        return a
    if isinstance(a, (int, float, complex, np.complexfloating, np.floating)):
        return ProjectivePoint.from_affine(a)
    raise ValidationError(f"cannot interpret {a!r} as a sphere point")


def fiber_coeffs(f: RationalMap, a: ProjectivePoint) -> np.ndarray:
    """Ascending coefficients of a0*F1(1,.) - a1*F0(1,.), length d+1."""
    return a.z0 * f.lift.f1 - a.z1 * f.lift.f0


def preimages(f: RationalMap, a) -> SphericalPointSet:
    """The fiber f^{-1}(a) with multiplicities summing to d.

    Degree drop of the fiber polynomial puts the missing multiplicity at
    infinity; totally ramified fibers are recognized coefficientwise.
    """
    a = _as_point(a)
    c = fiber_coeffs(f, a)
    ct = polys.trim(c, rel_tol=TAU_LEAD)
    m = len(ct) - 1
    if np.max(np.abs(ct)) == 0.0:
        raise RootSolveFailure("fiber polynomial vanished identically")
    d = f.degree
    pts: list[ProjectivePoint] = []
    mults: list[int] = []
    if m > 0:
        pp = polys.perfect_power_root(ct)
        if pp is not None:
            r, k = pp
            pts.append(ProjectivePoint.from_affine(r))
            mults.append(k)
        else:
            rr = polys.roots(ct)
            centers, counts = polys.cluster_points(rr, polys.CLUSTER_RADIUS)
            for ctr, cnt in zip(centers, counts):
                pts.append(ProjectivePoint.from_affine(ctr))
                mults.append(int(cnt))
    if d - m > 0:
        pts.append(ProjectivePoint.infinity())
        mults.append(d - m)
    return SphericalPointSet(pts, mults)


# ---------------------------------------------------------------- classifiers

def is_polynomial(f: RationalMap) -> bool:
    return f.denominator.degree == 0


def exceptional_set(f: RationalMap) -> list[ProjectivePoint]:
    """Points whose second-order backward orbit is themselves (at most two).

    Candidates are the fixed points of f∘f; each is kept when the full
    degree-d^2 fiber over it sits entirely at the candidate, tested in
    coefficient space (clustering cannot certify a d^2-fold root).
    """
    F2 = f.lift.compose(f.lift)
    d2 = F2.degree
    phi = np.zeros(d2 + 2, dtype=np.complex128)
    phi[1:] += F2.f0
    phi[: d2 + 1] -= F2.f1
    phi_t = polys.trim(phi, rel_tol=TAU_LEAD)
    candidates: list[ProjectivePoint] = []
    if len(phi_t) > 1:
        rr = polys.roots(phi_t)
        centers, _ = polys.cluster_points(rr, polys.CLUSTER_RADIUS)
        candidates.extend(ProjectivePoint.from_affine(c) for c in centers)
    # infinity is a candidate iff it is fixed by f∘f
    top = abs(F2.f0[-1]) / max(np.max(np.abs(F2.f0)), np.max(np.abs(F2.f1)))
    if top <= TAU_LEAD * 1e3:
        candidates.append(ProjectivePoint.infinity())

    out: list[ProjectivePoint] = []
    for a in candidates:
        c2 = a.z0 * F2.f1 - a.z1 * F2.f0
        ct = polys.trim(c2, rel_tol=TAU_LEAD * 10)
        m = len(ct) - 1
        if a.is_infinity:
            if m == 0:
                out.append(a)
            continue
        if m < d2:
            continue  # part of the fiber escapes to infinity
        pp = polys.perfect_power_root(ct)
        if pp is None:
            continue
        r, k = pp
        if k == d2 and abs(r - a.affine()) <= CHORDAL_MATCH * (1.0 + abs(a.affine())):
            out.append(a)
    if len(out) > 2:
        raise RootSolveFailure(
            f"exceptional-set detection returned {len(out)} points; "
            "this contradicts the degree bound and indicates a numerical failure"
        )
    return out


def is_square_polynomial(f: RationalMap) -> bool:
    """True iff the second-order fiber over infinity is infinity alone."""
    first = preimages(f, ProjectivePoint.infinity())
    for p, _ in first:
        second = preimages(f, p)
        for q, _ in second:
            if q.chordal_to_infinity() > CHORDAL_MATCH:
                return False
    return True


def classify_special_form(f: RationalMap):
    """Detect f(z) = a*(z-b)^(-d) + b; returns (a, b) or None.

    The denominator must be a perfect d-th power (z-b)^d and the numerator
    must differ from b*denominator by a nonzero constant.
    """
    if is_polynomial(f):
        return None
    d = f.degree
    den = f.denominator
    if den.degree != d:
        return None
    pp = polys.perfect_power_root(den.coeffs, rel_tol=TAU_FORM)
    if pp is None:
        return None
    b, k = pp
    if k != d:
        return None
    num_pad = np.zeros(d + 1, dtype=np.complex128)
    num_pad[: f.numerator.degree + 1] = f.numerator.coeffs
    rem = num_pad - b * den.coeffs
    scale = max(np.max(np.abs(num_pad)), np.max(np.abs(den.coeffs)))
    if np.max(np.abs(rem[1:])) > TAU_FORM * scale:
        return None
    a = rem[0] / den.coeffs[d]
    if abs(a) <= TAU_FORM * scale:
        return None
    return complex(a), complex(b)


def balanced_check_exceptional(f: RationalMap, a) -> float:
    """Total-variation defect of pulling back the orbit measure of an
    exceptional point: f^* of (delta_a + delta_f(a))/2 against d times it.
    """
    a = _as_point(a)
    exc = exceptional_set(f)
    if not any(a.chordal(e) <= CHORDAL_MATCH for e in exc):
        raise NotExceptional(f"{a!r} is not in the exceptional set")
    fa = evaluate_map(f, a)
    base = [(a, 0.5), (fa, 0.5)]
    pulled: list[tuple[ProjectivePoint, float]] = []
    for x, w in base:
        for y, m in preimages(f, x):
            pulled.append((y, w * m))
    target = [(x, f.degree * w) for x, w in base]

    def accumulate(atoms):
        centers: list[ProjectivePoint] = []
        masses: list[float] = []
        for p, w in atoms:
            for i, c in enumerate(centers):
                if p.chordal(c) <= 1e-4:
                    masses[i] += w
                    break
            else:
                centers.append(p)
                masses.append(w)
        return centers, masses

    centers, masses_p = accumulate(pulled)
    diff = 0.0
    matched = [False] * len(target)
    tcent, tmass = accumulate(target)
    matched = [False] * len(tcent)
    for c, mp in zip(centers, masses_p):
        found = False
        for i, tc in enumerate(tcent):
            if c.chordal(tc) <= 1e-4:
                diff += abs(mp - tmass[i])
                matched[i] = True
                found = True
                break
        if not found:
            diff += mp
    for i, used in enumerate(matched):
        if not used:
            diff += tmass[i]
    return 0.5 * diff


# ---------------------------------------------------------------- batched fibers

def batch_fiber_roots(f: RationalMap, W: np.ndarray):
    """Fiber polynomials over a batch of sphere points, solved per row.

    W is (B, 2) unit-norm. Returns (roots, eff_deg): roots is a (B, d)
    complex array whose first eff_deg[i] entries are the finite fiber points
    of row i (counted with multiplicity, solver order); the remaining
    d - eff_deg[i] slots belong to infinity.
    """
    W = np.asarray(W, dtype=np.complex128)
    B = W.shape[0]
    d = f.degree
    C = W[:, 0, None] * f.lift.f1[None, :] - W[:, 1, None] * f.lift.f0[None, :]
    amax = np.max(np.abs(C), axis=1)
    if np.any(amax == 0.0):
        raise RootSolveFailure("fiber polynomial vanished identically")
    mask = np.abs(C) > (TAU_LEAD * amax)[:, None]
    eff = np.where(mask.any(axis=1), d - np.argmax(mask[:, ::-1], axis=1), 0)
    roots_out = np.zeros((B, d), dtype=np.complex128)
    for m in np.unique(eff):
        if m == 0:
            continue
        rows = np.nonzero(eff == m)[0]
        rr = polys.aberth_batch(C[rows, : m + 1])
        roots_out[rows, :m] = rr
    return roots_out, eff
