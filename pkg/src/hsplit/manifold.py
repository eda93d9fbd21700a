"""Hadamard manifold geometry kernel.

Concrete simply connected spaces of nonpositive sectional curvature with
closed-form exponential and logarithm maps:

* ``Euclidean(n)`` -- flat space, curvature 0.
* ``Hyperboloid(n)`` -- hyperbolic space of curvature -1 in the Lorentz
  model, embedded in Minkowski space with signature ``(-,+,...,+)``.
* ``SPD(k)`` -- symmetric positive definite ``k x k`` matrices under the
  affine-invariant metric.
* ``Product(factors)`` -- finite products of the above.

Points and tangent vectors are immutable value objects holding ambient
chart coordinates as flat float arrays.  Every operation is a pure
function of its inputs, so values are safe to share across threads.

On all of these spaces the exponential map is a global diffeomorphism at
every base point, so ``log`` is total and geodesics between any two
points are unique.  Comparison-triangle utilities expose the planar
triangle with matching side lengths together with the CAT(0) inner
product residuals at each vertex.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "GeometryError",
    "NumericPolicy",
    "DEFAULT_POLICY",
    "Manifold",
    "Euclidean",
    "Hyperboloid",
    "SPD",
    "Product",
    "ManifoldPoint",
    "TangentVector",
    "GeodesicTriangleReport",
    "exp_map",
    "log_map",
    "dist",
    "inner",
    "norm",
    "geodesic_point",
    "zero_vector",
    "comparison_triangle",
    "parse_manifold_tag",
]


class GeometryError(ValueError):
    """Invalid point/tangent data, mismatched manifolds, or non-finite input."""


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances for constraint enforcement and series cutovers.

    The geometric identities themselves are exact; these knobs only fix
    how much floating-point slack constraint checks allow and where the
    stabilized series replace the naive formulas.
    """

    hyperboloid_constraint_tol: float = 1e-10
    spd_symmetry_tol: float = 1e-12
    base_match_tol: float = 1e-12
    #: switch arcosh(1+e) to its sqrt expansion below this e
    acosh_series_cut: float = 1e-7
    #: switch sinh(t)/t to its Taylor series below this |t|
    sinhc_series_cut: float = 1e-5
    #: side length below which a comparison triangle is treated as degenerate
    degenerate_side_tol: float = 1e-14


DEFAULT_POLICY = NumericPolicy()


def _stable_acosh1p(e: float, cut: float) -> float:
    # arcosh(1 + e); the sqrt expansion avoids cancellation for e near 0
    if e <= 0.0:
        return 0.0
    if e < cut:
        return math.sqrt(2.0 * e) * (1.0 - e / 12.0 + 3.0 * e * e / 160.0)
    s = 1.0 + e
    return math.log(s + math.sqrt(s * s - 1.0))


def _sinhc(t: float, cut: float) -> float:
    # sinh(t)/t, continued through t = 0 by its Taylor series
    if abs(t) < cut:
        t2 = t * t
        return 1.0 + t2 / 6.0 + t2 * t2 / 120.0
    return math.sinh(t) / t


if hasattr(math, "fma"):  # pragma: no cover - version dependent

    def _two_product(a: float, b: float) -> tuple[float, float]:
        p = a * b
        return p, math.fma(a, b, -p)

else:

    def _two_product(a: float, b: float) -> tuple[float, float]:
        # Dekker's error-free product via 2^27+1 splitting
        p = a * b
        c = 134217729.0 * a
        ah = c - (c - a)
        al = a - ah
        c = 134217729.0 * b
        bh = c - (c - b)
        bl = b - bh
        err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
        return p, err


def _as_coords(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel().copy()
    arr.setflags(write=False)
    return arr


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise GeometryError(f"non-finite {what}: {arr!r}")


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """A point on a concrete Hadamard manifold, in ambient chart coordinates."""

    manifold: "Manifold"
    coords: np.ndarray

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"ManifoldPoint({self.manifold.tag}, {np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A vector attached to a base point, in the base point's chart."""

    base: ManifoldPoint
    components: np.ndarray

    @property
    def manifold(self) -> "Manifold":
        return self.base.manifold

    def norm(self) -> float:
        return self.manifold.norm(self)

    def __add__(self, other: "TangentVector") -> "TangentVector":
        _check_same_base(self, other)
        return TangentVector(self.base, _as_coords(self.components + other.components))

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        _check_same_base(self, other)
        return TangentVector(self.base, _as_coords(self.components - other.components))

    def __mul__(self, scalar: float) -> "TangentVector":
        return TangentVector(self.base, _as_coords(float(scalar) * self.components))

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, _as_coords(-self.components))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"TangentVector({self.manifold.tag}, {np.array2string(self.components, precision=6)})"


def _check_same_manifold(x: ManifoldPoint, y: ManifoldPoint) -> None:
    if x.manifold != y.manifold:
        raise GeometryError(f"manifold mismatch: {x.manifold.tag} vs {y.manifold.tag}")


def _check_same_base(u: TangentVector, v: TangentVector) -> None:
    _check_same_manifold(u.base, v.base)
    tol = u.base.manifold.policy.base_match_tol
    if not np.allclose(u.base.coords, v.base.coords, rtol=0.0, atol=tol):
        raise GeometryError("tangent vectors attached to different base points")


class Manifold(ABC):
    """Common interface of the concrete Hadamard manifold instances.

    Subclasses implement the raw coordinate kernels (prefixed ``_``);
    the public methods perform validation, wrap values, and enforce the
    manifold constraints after each operation.
    """

    policy: NumericPolicy

    # -- shape ---------------------------------------------------------

    @property
    @abstractmethod
    def ambient_dim(self) -> int:
        """Length of the flat coordinate array of a point."""

    @property
    @abstractmethod
    def manifold_dim(self) -> int:
        """Intrinsic dimension."""

    @property
    @abstractmethod
    def tag(self) -> str:
        """Serialization tag, e.g. ``euclidean:3``."""

    @property
    def is_flat(self) -> bool:
        """True when the chart is a Euclidean vector space (zero curvature)."""
        return False

    # -- raw kernels ----------------------------------------------------

    @abstractmethod
    def _base_coords(self) -> np.ndarray: ...

    @abstractmethod
    def _validate_point(self, c: np.ndarray) -> None: ...

    @abstractmethod
    def _project_point(self, c: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _project_tangent(self, x: np.ndarray, w: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _validate_tangent(self, x: np.ndarray, w: np.ndarray) -> None: ...

    @abstractmethod
    def _inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float: ...

    @abstractmethod
    def _exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _dist(self, x: np.ndarray, y: np.ndarray) -> float: ...

    @abstractmethod
    def _candidate_directions(self, x: np.ndarray) -> list[np.ndarray]:
        """Ambient directions whose tangent projections span T_x."""

    # -- construction ----------------------------------------------------

    def point(self, coords, *, project: bool = False) -> ManifoldPoint:
        """Wrap raw coordinates as a validated point.

        With ``project=True`` the coordinates are first projected back
        onto the manifold (renormalization / resymmetrization), which is
        the supported way to absorb small constraint drift.
        """
        c = _as_coords(coords)
        if c.size != self.ambient_dim:
            raise GeometryError(
                f"expected {self.ambient_dim} coordinates for {self.tag}, got {c.size}"
            )
        _require_finite(c, "point coordinates")
        if project:
            c = _as_coords(self._project_point(c))
        self._validate_point(c)
        return ManifoldPoint(self, c)

    def base_point(self) -> ManifoldPoint:
        """A canonical reference point (origin, apex, or identity)."""
        return ManifoldPoint(self, _as_coords(self._base_coords()))

    def tangent(self, base: ManifoldPoint, components, *, project: bool = False) -> TangentVector:
        """Wrap raw components as a validated tangent vector at ``base``."""
        self._own_point(base)
        w = _as_coords(components)
        if w.size != self.ambient_dim:
            raise GeometryError(
                f"expected {self.ambient_dim} components for {self.tag}, got {w.size}"
            )
        _require_finite(w, "tangent components")
        if project:
            w = _as_coords(self._project_tangent(base.coords, w))
        self._validate_tangent(base.coords, w)
        return TangentVector(base, w)

    def zero_vector(self, base: ManifoldPoint) -> TangentVector:
        self._own_point(base)
        return TangentVector(base, _as_coords(np.zeros(self.ambient_dim)))

    # -- geometry ---------------------------------------------------------

    def exp(self, x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
        """Point reached at unit time along the geodesic leaving x with velocity v."""
        self._own_point(x)
        if v.base.manifold != self or not np.allclose(
            v.base.coords, x.coords, rtol=0.0, atol=self.policy.base_match_tol
        ):
            raise GeometryError("tangent vector is not attached to the given base point")
        _require_finite(v.components, "tangent components")
        c = _as_coords(self._exp(x.coords, v.components))
        return ManifoldPoint(self, c)

    def log(self, x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
        """Initial velocity of the minimal geodesic from x to y; inverse of exp."""
        self._own_point(x)
        _check_same_manifold(x, y)
        if np.array_equal(x.coords, y.coords):
            return self.zero_vector(x)
        return TangentVector(x, _as_coords(self._log(x.coords, y.coords)))

    def dist(self, x: ManifoldPoint, y: ManifoldPoint) -> float:
        self._own_point(x)
        _check_same_manifold(x, y)
        if np.array_equal(x.coords, y.coords):
            return 0.0
        return float(self._dist(x.coords, y.coords))

    def inner(self, u: TangentVector, v: TangentVector) -> float:
        _check_same_base(u, v)
        return float(self._inner(u.base.coords, u.components, v.components))

    def norm(self, v: TangentVector) -> float:
        val = self._inner(v.base.coords, v.components, v.components)
        return math.sqrt(max(val, 0.0))

    def geodesic(self, x: ManifoldPoint, y: ManifoldPoint, t: float) -> ManifoldPoint:
        """The point ``gamma(t)`` on the unique geodesic with gamma(0)=x, gamma(1)=y."""
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise GeometryError(f"geodesic parameter t={t} outside [0, 1]")
        if t == 0.0:
            return x
        if t == 1.0:
            _check_same_manifold(x, y)
            return y
        return self.exp(x, t * self.log(x, y))

    # -- tangent frames and sampling ---------------------------------------

    def tangent_basis(self, x: ManifoldPoint) -> tuple[TangentVector, ...]:
        """Orthonormal basis of T_x under the Riemannian metric."""
        self._own_point(x)
        basis: list[np.ndarray] = []
        for cand in self._candidate_directions(x.coords):
            w = self._project_tangent(x.coords, np.asarray(cand, dtype=float))
            ref = self._inner(x.coords, w, w)
            for _ in range(2):  # re-orthogonalize for numerical safety
                for b in basis:
                    w = w - self._inner(x.coords, w, b) * b
            n2 = self._inner(x.coords, w, w)
            if n2 > max(ref, 1.0) * 1e-24:
                basis.append(w / math.sqrt(n2))
            if len(basis) == self.manifold_dim:
                break
        if len(basis) != self.manifold_dim:
            raise GeometryError(f"failed to build a tangent frame at {x!r}")
        return tuple(TangentVector(x, _as_coords(b)) for b in basis)

    def random_tangent(
        self, rng: np.random.Generator, x: ManifoldPoint, scale: float = 1.0
    ) -> TangentVector:
        """Random tangent vector at x with Riemannian norm exactly ``scale``."""
        self._own_point(x)
        if scale == 0.0:
            return self.zero_vector(x)
        for _ in range(16):
            w = self._project_tangent(x.coords, rng.standard_normal(self.ambient_dim))
            n2 = self._inner(x.coords, w, w)
            if n2 > 1e-20:
                return TangentVector(x, _as_coords((scale / math.sqrt(n2)) * w))
        raise GeometryError("could not sample a nonzero tangent direction")

    def random_point(
        self, rng: np.random.Generator, spread: float = 1.0
    ) -> ManifoldPoint:
        """Random point within geodesic distance ``spread`` of the base point."""
        base = self.base_point()
        radius = spread * rng.uniform()
        return self.exp(base, self.random_tangent(rng, base, scale=radius))

    # -- internals ----------------------------------------------------------

    def _own_point(self, x: ManifoldPoint) -> None:
        if x.manifold != self:
            raise GeometryError(f"point on {x.manifold.tag} passed to {self.tag}")


@dataclass(frozen=True)
class Euclidean(Manifold):
    """Flat space R^n with the dot product metric."""

    dim: int
    policy: NumericPolicy = field(default=DEFAULT_POLICY, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise GeometryError("Euclidean dimension must be >= 1")

    @property
    def ambient_dim(self) -> int:
        return self.dim

    @property
    def manifold_dim(self) -> int:
        return self.dim

    @property
    def tag(self) -> str:
        return f"euclidean:{self.dim}"

    @property
    def is_flat(self) -> bool:
        return True

    def _base_coords(self) -> np.ndarray:
        return np.zeros(self.dim)

    def _validate_point(self, c: np.ndarray) -> None:
        _require_finite(c, "point coordinates")

    def _project_point(self, c: np.ndarray) -> np.ndarray:
        return c

    def _project_tangent(self, x: np.ndarray, w: np.ndarray) -> np.ndarray:
        return w

    def _validate_tangent(self, x: np.ndarray, w: np.ndarray) -> None:
        _require_finite(w, "tangent components")

    def _inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ v)

    def _exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return x + v

    def _log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return y - x

    def _dist(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.linalg.norm(y - x))

    def _candidate_directions(self, x: np.ndarray) -> list[np.ndarray]:
        return [row for row in np.eye(self.dim)]


@dataclass(frozen=True)
class Hyperboloid(Manifold):
    """Hyperbolic n-space of curvature -1 in the Lorentz model.

    Points live on the upper sheet ``<x,x>_L = -1, x_0 > 0`` of the
    hyperboloid in R^{n+1}, where ``<.,.>_L`` is the Minkowski form with
    signature ``(-,+,...,+)``.  The Riemannian metric is the restriction
    of the Minkowski form to tangent spaces, where it is positive
    definite.
    """

    dim: int
    policy: NumericPolicy = field(default=DEFAULT_POLICY, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise GeometryError("hyperboloid dimension must be >= 1")

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1

    @property
    def manifold_dim(self) -> int:
        return self.dim

    @property
    def tag(self) -> str:
        return f"hyperboloid:{self.dim}"

    @staticmethod
    def minkowski(a: np.ndarray, b: np.ndarray) -> float:
        """Minkowski bilinear form -a0*b0 + a1*b1 + ... .

        Summed with compensation: geodesic formulas amplify form-level
        rounding by sinh of the distance, so the extra cost is the price
        of meaningful tangency defects.
        """
        return math.fsum([-a[0] * b[0], *(a[1:] * b[1:])])

    @staticmethod
    def minkowski_exact(a: np.ndarray, b: np.ndarray) -> float:
        """Minkowski form with error-free products, correct to ~1 ulp.

        The exponential map must resolve the tangency defect of a stored
        vector to absolute precision: its effect on the endpoint grows
        like sinh(d)^2/d, so ordinary product rounding (relative in the
        coordinate magnitudes) is far too coarse.
        """
        terms: list[float] = []
        p, err = _two_product(float(a[0]), float(b[0]))
        terms.extend((-p, -err))
        for ai, bi in zip(a[1:], b[1:]):
            p, err = _two_product(float(ai), float(bi))
            terms.extend((p, err))
        return math.fsum(terms)

    def _base_coords(self) -> np.ndarray:
        c = np.zeros(self.dim + 1)
        c[0] = 1.0
        return c

    def _validate_point(self, c: np.ndarray) -> None:
        _require_finite(c, "point coordinates")
        q = self.minkowski_exact(c, c)
        # float64 coordinates at hyperbolic radius R cannot satisfy the
        # constraint better than ~eps * cosh(R)^2; allow that floor
        mass = float(c @ c) + 2.0 * c[0] * c[0]
        tol = max(self.policy.hyperboloid_constraint_tol, 16.0 * 2.3e-16 * mass)
        if abs(q + 1.0) > tol or c[0] <= 0.0:
            raise GeometryError(
                f"not on the upper hyperboloid sheet: <x,x>_L = {q!r}, x0 = {c[0]!r}"
            )

    def _project_point(self, c: np.ndarray) -> np.ndarray:
        q = self.minkowski_exact(c, c)
        if q >= 0.0 or not np.isfinite(q):
            raise GeometryError("cannot project coordinates with non-timelike self-product")
        c = c / math.sqrt(-q)
        return c if c[0] > 0.0 else -c

    def _project_tangent(self, x: np.ndarray, w: np.ndarray) -> np.ndarray:
        return w + self.minkowski(x, w) * x

    def _validate_tangent(self, x: np.ndarray, w: np.ndarray) -> None:
        _require_finite(w, "tangent components")
        scale = max(1.0, float(np.max(np.abs(w))) * float(np.max(np.abs(x))) * x.size)
        if abs(self.minkowski(x, w)) > self.policy.hyperboloid_constraint_tol * scale:
            raise GeometryError("tangent vector is not Minkowski-orthogonal to its base")

    def _inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        return self.minkowski(u, v)

    def _exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        # The endpoint is exp of the exact tangential part of v taken at
        # the exact radial normalization of x.  Defects of the stored
        # data (the timelike component m = <x,v>_L, the off-shell factor
        # in qx = <x,x>_L, and any mismatch between the trig argument
        # and the true norm of v) displace the endpoint with an
        # amplification ~ sinh(n)*cosh(n), so the three bilinear forms
        # use error-free products and the scalar stage runs in extended
        # precision, folding all corrections into the coefficient of x.
        ld = np.longdouble
        qx = ld(self.minkowski_exact(x, x))
        m = ld(self.minkowski_exact(x, v))
        n2 = ld(self.minkowski_exact(v, v)) - m * m / qx
        if n2 <= 0.0:
            n = ld(0.0)
            s = ld(1.0)
        else:
            n = np.sqrt(n2)
            if n < self.policy.sinhc_series_cut:
                t2 = n * n
                s = 1.0 + t2 / 6.0 + t2 * t2 / 120.0
            else:
                s = np.sinh(n) / n
        a = np.cosh(n) / np.sqrt(-qx) - s * m / qx
        c = a * x.astype(ld) + s * v.astype(ld)
        return self._project_point(np.asarray(c, dtype=float))

    def _chord_half(self, x: np.ndarray, y: np.ndarray) -> float:
        # cosh(d) - 1 computed from the chord <y-x, y-x>_L = 2(cosh d - 1),
        # whose rounding stays relative to the separation, then corrected
        # for the off-shell radial factors of the stored endpoints:
        #   cosh d = (e - (qx+qy)/2) / sqrt(qx*qy).
        # Stored coordinates at hyperbolic radius R are off shell by
        # ~eps*cosh(R)^2, which would otherwise bias e by the same
        # relative amount.
        diff = y - x
        e = 0.5 * self.minkowski(diff, diff)  # may be < 0 off shell
        qx = self.minkowski_exact(x, x)
        qy = self.minkowski_exact(y, y)
        scale = math.sqrt(qx * qy)
        u = -0.5 * (qx + 1.0)
        w = -0.5 * (qy + 1.0)
        # exact rewrite of -(qx+qy)/2 - scale, free of the absolute-eps
        # cancellation of the direct difference
        correction = (u - w) ** 2 / ((1.0 + u + w) + scale)
        return max((e + correction) / scale, 0.0)

    def _dist(self, x: np.ndarray, y: np.ndarray) -> float:
        return _stable_acosh1p(self._chord_half(x, y), self.policy.acosh_series_cut)

    def _log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        # tangential part of the chord is (y - x) - e*x, rescaled to
        # length d; its residual timelike defect is resolved by exp
        e = self._chord_half(x, y)
        if e <= 0.0:
            return np.zeros_like(x)
        d = _stable_acosh1p(e, self.policy.acosh_series_cut)
        t = (y - x) - e * x
        tn2 = self.minkowski(t, t)
        if tn2 <= 0.0:
            return np.zeros_like(x)
        return (d / math.sqrt(tn2)) * t

    def _candidate_directions(self, x: np.ndarray) -> list[np.ndarray]:
        return [row for row in np.eye(self.dim + 1)]


@dataclass(frozen=True)
class SPD(Manifold):
    """Symmetric positive definite matrices with the affine-invariant metric.

    A point is a flat row-major ``k*k`` array of a symmetric positive
    definite matrix P; tangent vectors are symmetric matrices.  The
    metric is ``<U,V>_P = tr(P^-1 U P^-1 V)``, under which the space has
    nonpositive curvature and closed-form geodesics

        exp_P(U) = P^1/2 expm(P^-1/2 U P^-1/2) P^1/2.
    """

    order: int
    policy: NumericPolicy = field(default=DEFAULT_POLICY, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.order < 1:
            raise GeometryError("SPD matrix order must be >= 1")

    @property
    def ambient_dim(self) -> int:
        return self.order * self.order

    @property
    def manifold_dim(self) -> int:
        return self.order * (self.order + 1) // 2

    @property
    def tag(self) -> str:
        return f"spd:{self.order}"

    # -- matrix helpers -------------------------------------------------

    def _mat(self, c: np.ndarray) -> np.ndarray:
        return c.reshape(self.order, self.order)

    @staticmethod
    def _sym(m: np.ndarray) -> np.ndarray:
        return (m + m.T) / 2.0

    @staticmethod
    def _funcm(m: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        w, vecs = np.linalg.eigh(m)
        return (vecs * fn(w)) @ vecs.T

    def _sqrt_pair(self, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        w, vecs = np.linalg.eigh(p)
        if w[0] <= 0.0:
            raise GeometryError(f"matrix is not positive definite (min eig {w[0]!r})")
        sq = (vecs * np.sqrt(w)) @ vecs.T
        isq = (vecs * (1.0 / np.sqrt(w))) @ vecs.T
        return sq, isq

    # -- kernel ----------------------------------------------------------

    def _base_coords(self) -> np.ndarray:
        return np.eye(self.order).ravel()

    def _validate_point(self, c: np.ndarray) -> None:
        _require_finite(c, "point coordinates")
        m = self._mat(c)
        if np.max(np.abs(m - m.T)) > self.policy.spd_symmetry_tol * max(
            1.0, float(np.max(np.abs(m)))
        ):
            raise GeometryError("matrix is not symmetric")
        w = np.linalg.eigvalsh(self._sym(m))
        if w[0] <= 0.0:
            raise GeometryError(f"matrix is not positive definite (min eig {w[0]!r})")

    def _project_point(self, c: np.ndarray) -> np.ndarray:
        return self._sym(self._mat(c)).ravel()

    def _project_tangent(self, x: np.ndarray, w: np.ndarray) -> np.ndarray:
        return self._sym(self._mat(w)).ravel()

    def _validate_tangent(self, x: np.ndarray, w: np.ndarray) -> None:
        _require_finite(w, "tangent components")
        m = self._mat(w)
        if np.max(np.abs(m - m.T)) > self.policy.spd_symmetry_tol * max(
            1.0, float(np.max(np.abs(m)))
        ):
            raise GeometryError("tangent matrix is not symmetric")

    def _inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        p = self._mat(x)
        a = np.linalg.solve(p, self._mat(u))
        b = np.linalg.solve(p, self._mat(v))
        return float(np.einsum("ij,ji->", a, b))

    def _exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        sq, isq = self._sqrt_pair(self._mat(x))
        s = self._sym(isq @ self._mat(v) @ isq)
        e = self._funcm(s, np.exp)
        return self._sym(sq @ e @ sq).ravel()

    def _log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        sq, isq = self._sqrt_pair(self._mat(x))
        q = self._sym(isq @ self._mat(y) @ isq)
        lg = self._funcm(q, np.log)
        return self._sym(sq @ lg @ sq).ravel()

    def _dist(self, x: np.ndarray, y: np.ndarray) -> float:
        _, isq = self._sqrt_pair(self._mat(x))
        q = self._sym(isq @ self._mat(y) @ isq)
        w = np.linalg.eigvalsh(q)
        if w[0] <= 0.0:
            raise GeometryError("second argument is not positive definite")
        return float(np.linalg.norm(np.log(w)))

    def _candidate_directions(self, x: np.ndarray) -> list[np.ndarray]:
        k = self.order
        dirs = []
        for i in range(k):
            m = np.zeros((k, k))
            m[i, i] = 1.0
            dirs.append(m.ravel())
        for i in range(k):
            for j in range(i + 1, k):
                m = np.zeros((k, k))
                m[i, j] = m[j, i] = math.sqrt(0.5)
                dirs.append(m.ravel())
        return dirs


@dataclass(frozen=True)
class Product(Manifold):
    """Finite product of Hadamard manifolds with the sum metric.

    Coordinates are the concatenation of factor coordinates; geodesics,
    exponentials, and logarithms act factorwise, and squared distances
    add across factors.
    """

    factors: tuple[Manifold, ...]
    policy: NumericPolicy = field(default=DEFAULT_POLICY, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 2:
            raise GeometryError("a product manifold needs at least two factors")

    @cached_property
    def _slices(self) -> tuple[slice, ...]:
        out, start = [], 0
        for f in self.factors:
            out.append(slice(start, start + f.ambient_dim))
            start += f.ambient_dim
        return tuple(out)

    @property
    def ambient_dim(self) -> int:
        return sum(f.ambient_dim for f in self.factors)

    @property
    def manifold_dim(self) -> int:
        return sum(f.manifold_dim for f in self.factors)

    @property
    def tag(self) -> str:
        return "product:(" + ",".join(f.tag for f in self.factors) + ")"

    @property
    def is_flat(self) -> bool:
        return all(f.is_flat for f in self.factors)

    def split_point(self, x: ManifoldPoint) -> tuple[ManifoldPoint, ...]:
        """Factor points of a product point."""
        self._own_point(x)
        return tuple(
            ManifoldPoint(f, _as_coords(x.coords[s])) for f, s in zip(self.factors, self._slices)
        )

    def join_points(self, parts: Sequence[ManifoldPoint]) -> ManifoldPoint:
        """Product point assembled from one point per factor."""
        if len(parts) != len(self.factors):
            raise GeometryError("wrong number of factor points")
        for f, p in zip(self.factors, parts):
            if p.manifold != f:
                raise GeometryError(f"factor point on {p.manifold.tag}, expected {f.tag}")
        return ManifoldPoint(self, _as_coords(np.concatenate([p.coords for p in parts])))

    def _base_coords(self) -> np.ndarray:
        return np.concatenate([f._base_coords() for f in self.factors])

    def _validate_point(self, c: np.ndarray) -> None:
        for f, s in zip(self.factors, self._slices):
            f._validate_point(c[s])

    def _project_point(self, c: np.ndarray) -> np.ndarray:
        return np.concatenate([f._project_point(c[s]) for f, s in zip(self.factors, self._slices)])

    def _project_tangent(self, x: np.ndarray, w: np.ndarray) -> np.ndarray:
        return np.concatenate(
            [f._project_tangent(x[s], w[s]) for f, s in zip(self.factors, self._slices)]
        )

    def _validate_tangent(self, x: np.ndarray, w: np.ndarray) -> None:
        for f, s in zip(self.factors, self._slices):
            f._validate_tangent(x[s], w[s])

    def _inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        return sum(
            f._inner(x[s], u[s], v[s]) for f, s in zip(self.factors, self._slices)
        )

    def _exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.concatenate(
            [f._exp(x[s], v[s]) for f, s in zip(self.factors, self._slices)]
        )

    def _log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.concatenate(
            [f._log(x[s], y[s]) for f, s in zip(self.factors, self._slices)]
        )

    def _dist(self, x: np.ndarray, y: np.ndarray) -> float:
        return math.sqrt(
            sum(f._dist(x[s], y[s]) ** 2 for f, s in zip(self.factors, self._slices))
        )

    def _candidate_directions(self, x: np.ndarray) -> list[np.ndarray]:
        dirs = []
        for f, s in zip(self.factors, self._slices):
            for d in f._candidate_directions(x[s]):
                w = np.zeros(self.ambient_dim)
                w[s] = d
                dirs.append(w)
        return dirs


# -- module-level operation aliases ---------------------------------------


def exp_map(x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
    """Exponential map: follow the geodesic leaving x with velocity v for unit time."""
    return x.manifold.exp(x, v)


def log_map(x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
    """Inverse exponential map: initial velocity of the geodesic from x to y."""
    return x.manifold.log(x, y)


def dist(x: ManifoldPoint, y: ManifoldPoint) -> float:
    """Riemannian distance."""
    return x.manifold.dist(x, y)


def inner(u: TangentVector, v: TangentVector) -> float:
    """Riemannian inner product of two tangent vectors at a shared base point."""
    return u.base.manifold.inner(u, v)


def norm(v: TangentVector) -> float:
    """Riemannian norm of a tangent vector."""
    return v.base.manifold.norm(v)


def geodesic_point(x: ManifoldPoint, y: ManifoldPoint, t: float) -> ManifoldPoint:
    """Constant-speed geodesic interpolation between x (t=0) and y (t=1)."""
    return x.manifold.geodesic(x, y, t)


def zero_vector(x: ManifoldPoint) -> TangentVector:
    """The zero tangent vector at x."""
    return x.manifold.zero_vector(x)


@dataclass(frozen=True)
class GeodesicTriangleReport:
    """A geodesic triangle, its planar comparison triangle, and CAT(0) residuals.

    ``side_lengths`` holds ``(d(p1,p2), d(p2,p3), d(p3,p1))``.
    ``comparison_vertices`` is a 3x2 array of planar points realizing the
    same side lengths.  ``cosine_law_residuals[i]`` is the vertex-``i``
    gap between the manifold and planar inner products of the two side
    vectors, which is nonnegative on spaces of nonpositive curvature.
    """

    vertices: tuple[ManifoldPoint, ManifoldPoint, ManifoldPoint]
    side_lengths: np.ndarray
    comparison_vertices: np.ndarray
    cosine_law_residuals: np.ndarray


def comparison_triangle(
    x1: ManifoldPoint, x2: ManifoldPoint, x3: ManifoldPoint
) -> GeodesicTriangleReport:
    """Build the planar comparison triangle and the per-vertex residuals.

    The residual at vertex ``p`` for neighbors ``q, r`` is

        <log_p q, log_p r>  -  <q_bar - p_bar, r_bar - p_bar>

    which the comparison inequality makes nonnegative (up to float
    noise) on Hadamard manifolds, with equality in flat space and for
    degenerate triangles.
    """
    m = x1.manifold
    _check_same_manifold(x1, x2)
    _check_same_manifold(x1, x3)
    pts = (x1, x2, x3)
    l01 = m.dist(x1, x2)
    l12 = m.dist(x2, x3)
    l20 = m.dist(x3, x1)
    for l in (l01, l12, l20):
        if not math.isfinite(l):
            raise GeometryError("non-finite side length in geodesic triangle")

    tiny = m.policy.degenerate_side_tol
    p1 = np.array([0.0, 0.0])
    p2 = np.array([l01, 0.0])
    if l01 <= tiny:
        p3 = np.array([l20, 0.0])
    else:
        xi = (l01 * l01 + l20 * l20 - l12 * l12) / (2.0 * l01)
        eta2 = l20 * l20 - xi * xi
        p3 = np.array([xi, math.sqrt(eta2) if eta2 > 0.0 else 0.0])
    planar = np.vstack([p1, p2, p3])

    residuals = np.zeros(3)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        man_ip = m.inner(m.log(pts[i], pts[j]), m.log(pts[i], pts[k]))
        flat_ip = float((planar[j] - planar[i]) @ (planar[k] - planar[i]))
        residuals[i] = man_ip - flat_ip

    side_lengths = np.array([l01, l12, l20])
    side_lengths.setflags(write=False)
    planar.setflags(write=False)
    residuals.setflags(write=False)
    return GeodesicTriangleReport(pts, side_lengths, planar, residuals)


def parse_manifold_tag(tag: str, policy: NumericPolicy = DEFAULT_POLICY) -> Manifold:
    """Reconstruct a manifold instance from its serialization tag."""
    tag = tag.strip()
    if tag.startswith("euclidean:"):
        return Euclidean(int(tag.split(":", 1)[1]), policy)
    if tag.startswith("hyperboloid:"):
        return Hyperboloid(int(tag.split(":", 1)[1]), policy)
    if tag.startswith("spd:"):
        return SPD(int(tag.split(":", 1)[1]), policy)
    if tag.startswith("product:(") and tag.endswith(")"):
        inner_tags, depth, start, parts = tag[len("product:(") : -1], 0, 0, []
        for i, ch in enumerate(inner_tags):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                parts.append(inner_tags[start:i])
                start = i + 1
        parts.append(inner_tags[start:])
        return Product(tuple(parse_manifold_tag(p, policy) for p in parts), policy)
    raise GeometryError(f"unrecognized manifold tag: {tag!r}")
