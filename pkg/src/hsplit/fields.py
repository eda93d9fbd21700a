"""Monotone vector fields and their resolvents.

A vector field assigns to each point a finite (possibly empty) set of
tangent vectors at that point.  For a monotone field ``A`` and a step
``lam > 0``, the resolvent ``J`` sends ``x`` to the unique ``z``
satisfying

    log_z(x) = lam * a(z)    for some a(z) in A(z),

the geodesic analogue of ``(I + lam A)^-1``.  Structured fields (linear
on flat space, gradients of squared distances) are solved in closed
form; everything else goes through a damped geometric fixed-point
iteration whose fixed points are exactly the solutions of the resolvent
equation.

Verification helpers check monotonicity, firm nonexpansiveness, the
fixed-point inequality satisfied by firmly nonexpansive maps, and
resolvent continuity in the step and the argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .manifold import (
    Euclidean,
    GeometryError,
    Manifold,
    ManifoldPoint,
    TangentVector,
    dist,
    exp_map,
    geodesic_point,
    inner,
    log_map,
    norm,
)

__all__ = [
    "FieldError",
    "DomainError",
    "ResolventNonconvergence",
    "VectorField",
    "LinearField",
    "DistanceGradientField",
    "anti_monotone_field",
    "ResolventConfig",
    "resolvent",
    "resolvent_with_residual",
    "resolvent_residual",
    "MonotonicityReport",
    "check_monotone",
    "monotonicity_slack",
    "FirmNonexpansivenessReport",
    "check_firmly_nonexpansive",
    "firmly_nonexpansive_inequality",
    "ContinuityReport",
    "resolvent_continuity_probe",
    "make_field",
    "register_field_kind",
]

MONOTONE_SLACK_TOL = 1e-9


class FieldError(RuntimeError):
    """Base error for vector-field evaluation and resolvent computation."""


class DomainError(FieldError):
    """The field has no value at a point the solver needs."""


class ResolventNonconvergence(FieldError):
    """Inner solver exhausted its budget before meeting the tolerance."""

    def __init__(self, message: str, last_residual: float, iterations: int):
        super().__init__(f"{message} (last residual {last_residual:.3e}, {iterations} iterations)")
        self.last_residual = last_residual
        self.iterations = iterations


class VectorField:
    """A possibly multivalued assignment ``x -> A(x)`` of tangent vectors.

    Parameters
    ----------
    manifold:
        The manifold the field lives on.
    evaluator:
        Callable mapping a point to an iterable of tangent vectors based
        at that point.  An empty iterable means the point is outside the
        field's domain.
    tag:
        Structure hint used to dispatch closed-form resolvents
        (``"generic"``, ``"linear"``, ``"distance_gradient"``,
        ``"subdifferential"``, ``"saddle"``).
    known_zeros:
        Optional points known to satisfy ``0 in A(z)``; used by
        fixed-point checks and problem registries.
    """

    def __init__(
        self,
        manifold: Manifold,
        evaluator: Callable[[ManifoldPoint], Sequence[TangentVector]],
        *,
        tag: str = "generic",
        name: str = "",
        single_valued: bool = False,
        known_zeros: Sequence[ManifoldPoint] = (),
    ):
        self.manifold = manifold
        self._evaluator = evaluator
        self.tag = tag
        self.name = name or tag
        self.single_valued = single_valued
        self.known_zeros = tuple(known_zeros)

    def evaluate(self, x: ManifoldPoint) -> tuple[TangentVector, ...]:
        """All field values at x, validated to be finite tangents based at x."""
        if x.manifold != self.manifold:
            raise GeometryError(
                f"field on {self.manifold.tag} evaluated at point on {x.manifold.tag}"
            )
        values = tuple(self._evaluator(x))
        tol = self.manifold.policy.base_match_tol
        for v in values:
            if not np.all(np.isfinite(v.components)):
                raise FieldError(f"field {self.name} produced a non-finite value at {x!r}")
            if v.base.manifold != self.manifold or not np.allclose(
                v.base.coords, x.coords, rtol=0.0, atol=tol
            ):
                raise FieldError(f"field {self.name} returned a vector at the wrong base point")
        return values

    def selection(self, x: ManifoldPoint) -> TangentVector:
        """Minimum-norm element of A(x); the deterministic selection rule."""
        values = self.evaluate(x)
        if not values:
            raise DomainError(f"field {self.name} is empty at {x!r}")
        if len(values) == 1:
            return values[0]
        return min(values, key=norm)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"VectorField({self.name!r}, tag={self.tag!r}, on {self.manifold.tag})"


class LinearField(VectorField):
    """``A(x) = M x`` on flat space; monotone iff the symmetric part of M is PSD."""

    def __init__(self, manifold: Euclidean, matrix, *, name: str = "linear"):
        if not isinstance(manifold, Euclidean):
            raise GeometryError("linear fields are only defined on Euclidean instances")
        m = np.asarray(matrix, dtype=float)
        if m.shape != (manifold.dim, manifold.dim):
            raise GeometryError(f"matrix shape {m.shape} does not match {manifold.tag}")
        self.matrix = m
        zero = manifold.base_point()
        super().__init__(
            manifold,
            lambda x: (TangentVector(x, np.asarray(m @ x.coords)),),
            tag="linear",
            name=name,
            single_valued=True,
            known_zeros=(zero,) if _nonsingular(m) else (),
        )

    def symmetric_part_psd(self, tol: float = 1e-12) -> bool:
        sym = (self.matrix + self.matrix.T) / 2.0
        return bool(np.linalg.eigvalsh(sym)[0] >= -tol)


def _nonsingular(m: np.ndarray) -> bool:
    return np.linalg.matrix_rank(m) == m.shape[0]


class DistanceGradientField(VectorField):
    """Gradient field of ``weight * d(., anchor)^2 / 2``.

    On a Hadamard manifold this gradient is ``-weight * log_x(anchor)``,
    a single-valued maximal monotone field whose only zero is the anchor.
    """

    def __init__(self, anchor: ManifoldPoint, weight: float = 1.0, *, name: str = ""):
        if weight <= 0.0:
            raise ValueError("distance-gradient weight must be positive")
        self.anchor = anchor
        self.weight = float(weight)
        super().__init__(
            anchor.manifold,
            lambda x: (self.weight * -log_map(x, self.anchor),),
            tag="distance_gradient",
            name=name or "distance_gradient",
            single_valued=True,
            known_zeros=(anchor,),
        )


def anti_monotone_field(manifold: Euclidean) -> LinearField:
    """Negative-control fixture ``A(x) = -x``; intentionally not monotone."""
    f = LinearField(manifold, -np.eye(manifold.dim), name="anti_monotone_fixture")
    f.known_zeros = ()
    return f


@dataclass(frozen=True)
class ResolventConfig:
    """Step size and inner-solver budget for resolvent evaluation."""

    lam: float = 1.0
    inner_tol: float = 1e-10
    inner_max_iter: int = 500
    damping: float = 0.5

    def __post_init__(self) -> None:
        if self.lam <= 0.0:
            raise ValueError("resolvent step lam must be positive")
        if self.inner_tol <= 0.0:
            raise ValueError("inner_tol must be positive")
        if self.inner_max_iter < 1:
            raise ValueError("inner_max_iter must be >= 1")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")


def resolvent_residual(
    field: VectorField, lam: float, x: ManifoldPoint, z: ManifoldPoint
) -> float:
    """Norm of the resolvent equation defect at a candidate solution z.

    Takes the best available selection from A(z), which coincides with
    the minimum-norm selection wherever the field is single-valued.
    """
    values = field.evaluate(z)
    if not values:
        raise DomainError(f"field {field.name} is empty at {z!r}")
    target = log_map(z, x)
    return min(norm(target - lam * a) for a in values)


def _residual_vector(
    field: VectorField, lam: float, x: ManifoldPoint, z: ManifoldPoint
) -> TangentVector:
    values = field.evaluate(z)
    if not values:
        raise DomainError(f"field {field.name} is empty at {z!r}")
    target = log_map(z, x)
    return min((target - lam * a for a in values), key=norm)


def resolvent_with_residual(
    field: VectorField,
    cfg: ResolventConfig,
    x: ManifoldPoint,
    *,
    initial: ManifoldPoint | None = None,
) -> tuple[ManifoldPoint, float]:
    """Resolvent of a monotone field, plus the residual norm it achieved.

    Structured tags are solved exactly:

    * ``linear``: dense solve of ``(I + lam M) z = x``;
    * ``distance_gradient``: geodesic interpolation
      ``z = gamma(x -> anchor; lam*w / (1 + lam*w))``.

    Everything else runs the damped fixed-point iteration

        z_{k+1} = exp_{z_k}( eta * (log_{z_k} x - lam * a(z_k)) )

    with ``a`` the minimum-norm selection, backtracking on the residual
    norm, starting from ``initial`` (default: x).
    """
    if x.manifold != field.manifold:
        raise GeometryError("query point is not on the field's manifold")

    if isinstance(field, LinearField):
        z_coords = np.linalg.solve(
            np.eye(field.manifold.ambient_dim) + cfg.lam * field.matrix, x.coords
        )
        z = field.manifold.point(z_coords)
        return z, resolvent_residual(field, cfg.lam, x, z)

    if isinstance(field, DistanceGradientField):
        t = cfg.lam * field.weight / (1.0 + cfg.lam * field.weight)
        z = geodesic_point(x, field.anchor, t)
        return z, resolvent_residual(field, cfg.lam, x, z)

    z0 = initial if initial is not None else x
    if field.manifold.is_flat and field.manifold.ambient_dim <= 32:
        result = _newton_resolvent_flat(field, cfg, x, z0)
        if result is not None:
            return result
    return _iterate_resolvent(field, cfg, x, z0)


def resolvent(
    field: VectorField,
    cfg: ResolventConfig,
    x: ManifoldPoint,
    *,
    initial: ManifoldPoint | None = None,
) -> ManifoldPoint:
    """Resolvent ``J(x)``: the unique z with ``log_z(x) = lam * a(z)``."""
    z, _ = resolvent_with_residual(field, cfg, x, initial=initial)
    return z


def _newton_resolvent_flat(
    field: VectorField, cfg: ResolventConfig, x: ManifoldPoint, z0: ManifoldPoint
) -> tuple[ManifoldPoint, float] | None:
    """Damped Newton on ``z - x + lam*a(z) = 0`` for flat charts.

    Shares its fixed points with the damped geometric iteration but
    converges quadratically, which matters for skew monotone fields
    (e.g. saddle fields) whose forward iterations stall at large lam.
    Returns None to fall back when a Jacobian is singular or no descent
    step exists (kinks of multivalued fields).
    """
    man = field.manifold
    dim = man.ambient_dim

    def defect(coords: np.ndarray) -> np.ndarray:
        pt = man.point(coords)
        values = field.evaluate(pt)
        if not values:
            raise DomainError(f"field {field.name} is empty at {pt!r}")
        a = min(values, key=norm)
        return coords - x.coords + cfg.lam * a.components

    z = np.array(z0.coords, dtype=float)
    fz = defect(z)
    rn = float(np.linalg.norm(fz))
    for _ in range(cfg.inner_max_iter):
        if rn <= cfg.inner_tol:
            return man.point(z), rn
        jac = np.empty((dim, dim))
        for i in range(dim):
            h = 1e-7 * max(1.0, abs(z[i]))
            zp = z.copy()
            zp[i] += h
            jac[:, i] = (defect(zp) - fz) / h
        try:
            step = np.linalg.solve(jac, -fz)
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t > 1e-12:
            z_new = z + t * step
            f_new = defect(z_new)
            rn_new = float(np.linalg.norm(f_new))
            if rn_new < rn:
                break
            t *= 0.5
        else:
            return None
        z, fz, rn = z_new, f_new, rn_new
    raise ResolventNonconvergence(
        f"resolvent of {field.name} did not converge",
        last_residual=rn,
        iterations=cfg.inner_max_iter,
    )


def _iterate_resolvent(
    field: VectorField, cfg: ResolventConfig, x: ManifoldPoint, z0: ManifoldPoint
) -> tuple[ManifoldPoint, float]:
    z = z0
    r = _residual_vector(field, cfg.lam, x, z)
    rn = norm(r)
    # scale the first step by 1/(1+lam): near-optimal for unit-curvature
    # gradient fields, and the backtracking line below handles the rest
    eta = cfg.damping / (1.0 + cfg.lam)
    for k in range(cfg.inner_max_iter):
        if rn <= cfg.inner_tol:
            return z, rn
        accepted = False
        for _ in range(60):
            z_new = exp_map(z, eta * r)
            r_new = _residual_vector(field, cfg.lam, x, z_new)
            rn_new = norm(r_new)
            if rn_new < rn:
                accepted = True
                break
            eta *= 0.5
            if eta < 1e-18:
                break
        if not accepted:
            raise ResolventNonconvergence(
                f"resolvent of {field.name} stalled", last_residual=rn, iterations=k
            )
        z, r, rn = z_new, r_new, rn_new
        eta = min(eta * 1.5, cfg.damping)
    if rn <= cfg.inner_tol:
        return z, rn
    raise ResolventNonconvergence(
        f"resolvent of {field.name} did not converge",
        last_residual=rn,
        iterations=cfg.inner_max_iter,
    )


# -- verification -----------------------------------------------------------


def monotonicity_slack(
    x: ManifoldPoint, y: ManifoldPoint, u: TangentVector, v: TangentVector
) -> float:
    """Slack of the monotonicity inequality for values u at x and v at y.

    Nonnegative for every selection pair of a monotone field:

        <v, -log_y x> - <u, log_x y> >= 0.
    """
    return inner(v, -log_map(y, x)) - inner(u, log_map(x, y))


@dataclass(frozen=True)
class MonotonicityReport:
    min_slack: float
    n_pairs: int
    passed: bool
    witness: tuple[ManifoldPoint, ManifoldPoint, TangentVector, TangentVector] | None

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"monotonicity {verdict}: min slack {self.min_slack:.3e} over {self.n_pairs} pairs"


def check_monotone(
    field: VectorField,
    samples: Sequence[tuple[ManifoldPoint, ManifoldPoint]],
    *,
    tol: float = MONOTONE_SLACK_TOL,
) -> MonotonicityReport:
    """Spot-check monotonicity over sample point pairs.

    Evaluates the slack for every value pair ``(u, v)`` in
    ``A(x) x A(y)`` and reports the minimum; PASS means no slack fell
    below ``-tol``.  Sampling can only refute monotonicity, never prove
    it.
    """
    min_slack = math.inf
    witness = None
    count = 0
    for x, y in samples:
        us = field.evaluate(x)
        vs = field.evaluate(y)
        if not us or not vs:
            continue
        count += 1
        for u in us:
            for v in vs:
                slack = monotonicity_slack(x, y, u, v)
                if slack < min_slack:
                    min_slack, witness = slack, (x, y, u, v)
    if count == 0:
        raise DomainError("no sample pair lies inside the field's domain")
    return MonotonicityReport(min_slack, count, min_slack >= -tol, witness)


@dataclass(frozen=True)
class FirmNonexpansivenessReport:
    phi: np.ndarray
    grid: np.ndarray
    max_increase: float
    endpoint_gap: float  # phi(1) - phi(0); <= 0 for nonexpansive maps
    passed: bool

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"firm nonexpansiveness {verdict}: max increase {self.max_increase:.3e}, "
            f"phi(1)-phi(0) = {self.endpoint_gap:.3e}"
        )


def check_firmly_nonexpansive(
    mapping: Callable[[ManifoldPoint], ManifoldPoint],
    x: ManifoldPoint,
    y: ManifoldPoint,
    grid: Sequence[float] = tuple(np.linspace(0.0, 1.0, 11)),
    *,
    tol: float = MONOTONE_SLACK_TOL,
) -> FirmNonexpansivenessReport:
    """Check that the interpolated displacement distance is nonincreasing.

    For ``phi(t) = d(gamma_x(t), gamma_y(t))`` with ``gamma_x`` the
    geodesic from x to ``T(x)`` and likewise for y, a firmly
    nonexpansive map T makes phi nonincreasing on [0, 1]; in particular
    ``d(Tx, Ty) = phi(1) <= phi(0) = d(x, y)``.
    """
    ts = np.asarray(sorted(float(t) for t in grid))
    if ts.size < 2 or ts[0] != 0.0 or ts[-1] != 1.0:
        raise ValueError("grid must contain at least t=0 and t=1")
    tx, ty = mapping(x), mapping(y)
    phi = np.array(
        [dist(geodesic_point(x, tx, t), geodesic_point(y, ty, t)) for t in ts]
    )
    increments = np.diff(phi)
    max_increase = float(increments.max()) if increments.size else 0.0
    endpoint_gap = float(phi[-1] - phi[0])
    passed = max_increase <= tol and endpoint_gap <= tol
    phi.setflags(write=False)
    ts.setflags(write=False)
    return FirmNonexpansivenessReport(phi, ts, max_increase, endpoint_gap, passed)


def firmly_nonexpansive_inequality(
    mapping: Callable[[ManifoldPoint], ManifoldPoint],
    fixed_point: ManifoldPoint,
    y: ManifoldPoint,
    *,
    fixed_point_tol: float = 1e-9,
) -> float:
    """Inner product ``<log_{Ty} x*, log_{Ty} y>`` at a fixed point x*.

    Firmly nonexpansive maps make this nonpositive for every y.  Raises
    if the supplied point does not satisfy its fixed-point equation.
    """
    drift = dist(mapping(fixed_point), fixed_point)
    if drift > fixed_point_tol:
        raise ValueError(
            f"claimed fixed point moves by {drift:.3e} > {fixed_point_tol:.1e}"
        )
    ty = mapping(y)
    return inner(log_map(ty, fixed_point), log_map(ty, y))


@dataclass(frozen=True)
class ContinuityReport:
    gaps: np.ndarray
    final_gap: float
    passed: bool

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"resolvent continuity {verdict}: final gap {self.final_gap:.3e}"


def resolvent_continuity_probe(
    field: VectorField,
    lam_seq: Sequence[float],
    point_seq: Sequence[ManifoldPoint],
    lam_limit: float,
    x_limit: ManifoldPoint,
    *,
    base_cfg: ResolventConfig = ResolventConfig(),
    tol: float = 1e-6,
) -> ContinuityReport:
    """Check ``J_{lam_n}(x_n) -> J_lam(x)`` along explicit convergent inputs."""
    if len(lam_seq) != len(point_seq) or len(lam_seq) == 0:
        raise ValueError("lam_seq and point_seq must be equal-length and nonempty")
    limit = resolvent(
        field,
        ResolventConfig(lam_limit, base_cfg.inner_tol, base_cfg.inner_max_iter, base_cfg.damping),
        x_limit,
    )
    gaps = np.array(
        [
            dist(
                resolvent(
                    field,
                    ResolventConfig(
                        lam, base_cfg.inner_tol, base_cfg.inner_max_iter, base_cfg.damping
                    ),
                    x,
                ),
                limit,
            )
            for lam, x in zip(lam_seq, point_seq)
        ]
    )
    gaps.setflags(write=False)
    return ContinuityReport(gaps, float(gaps[-1]), bool(gaps[-1] <= tol))


# -- registry ---------------------------------------------------------------

_FIELD_KINDS: dict[str, Callable[..., VectorField]] = {}


def register_field_kind(name: str, constructor: Callable[..., VectorField]) -> None:
    """Register a named field constructor for config-driven assembly."""
    _FIELD_KINDS[name] = constructor


def make_field(name: str, *args, **kwargs) -> VectorField:
    """Construct a registered field kind by name."""
    try:
        ctor = _FIELD_KINDS[name]
    except KeyError:
        raise KeyError(
            f"unknown field kind {name!r}; registered: {sorted(_FIELD_KINDS)}"
        ) from None
    return ctor(*args, **kwargs)


register_field_kind("linear_psd", LinearField)
register_field_kind(
    "distance_gradient", lambda anchor, weight=1.0, **kw: DistanceGradientField(anchor, weight, **kw)
)
register_field_kind("anti_monotone", anti_monotone_field)
