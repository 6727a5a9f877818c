"""Orbit slices: the ellipsoids traced by two-parameter rotations.

For a diagonal tuple ``D``, a unitary ``U`` and a map ``L`` with three
output coordinates, the slice ``{L((TU)* D (TU)) : T = T(theta, phi)}``
over the two-parameter family of block rotations ``T(theta, phi)`` is an
ellipsoid surface in R^3: ``point(theta, phi) = a + M omega(theta, phi)``
with ``omega`` on the unit sphere.  This module computes the parameters
``(a, b, c, M)``, classifies points against the slice, and constructs the
unitary that degenerates the slice to a planar ellipse — the two halves
of the continuity argument used by the witness pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import (
    ALGEBRAIC_TOL,
    DiagonalTuple,
    HermitianMatrix,
    LinearMapSpec,
    UnitaryMatrix,
    hermitian_eig,
)

__all__ = [
    "EllipsoidParams",
    "MembershipVerdict",
    "DegenerateCertificate",
    "INSIDE",
    "ON_SURFACE",
    "OUTSIDE",
    "t_theta_phi",
    "lift_map",
    "slice_params",
    "slice_point",
    "omega_of_angles",
    "angles_of_omega",
    "slice_membership",
    "nearest_surface",
    "degenerate_unitary",
]

_RANK_CUTOFF = 1e-10  # relative singular-value cutoff for range decisions

INSIDE = "inside"
ON_SURFACE = "on_surface"
OUTSIDE = "outside"


@dataclass(frozen=True, eq=False)
class EllipsoidParams:
    """Slice parameters: center ``a``, axis data ``b``, ``c`` and generator ``M``.

    ``M`` has columns ``(b, Re c, -Im c)`` so that the slice is exactly
    ``{a + M omega : ||omega|| = 1}``.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    m_matrix: np.ndarray = field(init=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=np.float64).reshape(3)
        b = np.array(self.b, dtype=np.float64).reshape(3)
        c = np.array(self.c, dtype=np.complex128).reshape(3)
        m = np.stack([b, c.real, -c.imag], axis=1)
        for arr in (a, b, c, m):
            if not np.all(np.isfinite(arr.view(np.float64))):
                raise ValueError("ellipsoid parameters contain non-finite entries")
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "m_matrix", m)


@dataclass(frozen=True)
class MembershipVerdict:
    """Classification of a query point against a slice.

    Exactly one kind is reported: ``inside`` (strictly interior to the
    solid hull of a non-degenerate slice), ``on_surface`` (a unit-norm
    preimage exists within tolerance; ``theta``/``phi`` reproduce the
    point), or ``outside`` (``distance`` is the distance to the surface).
    """

    kind: str
    omega: np.ndarray | None = None
    theta: float | None = None
    phi: float | None = None
    distance: float | None = None


def t_theta_phi(theta: float, phi: float, n: int) -> UnitaryMatrix:
    """The block rotation acting on the first two coordinates.

    The leading 2x2 block is ``[[cos th, sin th e^{i phi}],
    [-sin th, cos th e^{i phi}]]``; the rest is the identity.
    """
    if n < 2:
        raise ValueError(f"block rotations need n >= 2, got n={n}")
    out = np.eye(n, dtype=np.complex128)
    ct, st = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    out[0, 0] = ct
    out[0, 1] = st * e
    out[1, 0] = -st
    out[1, 1] = ct * e
    return UnitaryMatrix(out)


def lift_map(spec: LinearMapSpec) -> LinearMapSpec:
    """Pad a map with l < 3 by zero output rows so slice machinery applies.

    Maps with l = 3 pass through unchanged; l = 4 is rejected here because
    slices are only ellipsoids for three output coordinates.
    """
    if spec.l == 3:
        return spec
    if spec.l > 3:
        raise ValueError(
            f"slice machinery handles at most 3 output coordinates, got l={spec.l}"
        )
    zero = HermitianMatrix(np.zeros((spec.n, spec.n), dtype=np.complex128))
    zero_row = tuple(zero for _ in range(spec.m))
    rows = tuple(spec.coeffs) + tuple(zero_row for _ in range(3 - spec.l))
    return LinearMapSpec(rows)


def _slice_geometry(
    d: DiagonalTuple, us: np.ndarray, cs: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Batched (a, b, c, M) over a stack of unitaries ``us`` of shape (T, n, n)."""
    g = np.einsum("tab,kibc,tdc->tkiad", us, cs, us.conj())
    d1 = d.vectors[:, 0]
    d2 = d.vectors[:, 1]
    diag = np.einsum("tkijj->tkij", g[:, :, :, 2:, 2:]).real
    a = 0.5 * np.einsum("i,tki->tk", d1 + d2, (g[:, :, :, 0, 0] + g[:, :, :, 1, 1]).real)
    a = a + np.einsum("ij,tkij->tk", d.vectors[:, 2:], diag)
    b = 0.5 * np.einsum("i,tki->tk", d1 - d2, (g[:, :, :, 0, 0] - g[:, :, :, 1, 1]).real)
    c = np.einsum("i,tki->tk", (d1 - d2).astype(np.complex128), g[:, :, :, 1, 0])
    m = np.stack([b, c.real, -c.imag], axis=2)
    return a, b, c, m


def slice_params(d: DiagonalTuple, u: UnitaryMatrix, spec: LinearMapSpec) -> EllipsoidParams:
    """Ellipsoid parameters of the slice of ``D`` at ``U`` under ``L``.

    ``a`` collects the rotation-invariant part, ``b`` the cos(2 theta)
    amplitude and ``c`` the complex sin(2 theta) amplitude; all come from
    the conjugated coefficients ``G = U C U*``.
    """
    spec3 = lift_map(spec)
    if spec3.m != d.m or spec3.n != d.n:
        raise ValueError(
            f"map expects (m={spec3.m}, n={spec3.n}), tuple has (m={d.m}, n={d.n})"
        )
    if u.n != d.n:
        raise ValueError(f"unitary has n={u.n}, tuple has n={d.n}")
    if d.n < 2:
        raise ValueError("slices need n >= 2")
    a, b, c, _ = _slice_geometry(d, u.mat[None], spec3.stack())
    return EllipsoidParams(a[0], b[0], c[0])


def omega_of_angles(theta: float, phi: float) -> np.ndarray:
    """Unit sphere parametrization matching ``slice_point``."""
    s2 = np.sin(2.0 * theta)
    return np.array([np.cos(2.0 * theta), np.cos(phi) * s2, np.sin(phi) * s2])


def angles_of_omega(omega: np.ndarray) -> tuple[float, float]:
    """Angles with ``omega_of_angles(theta, phi) == omega`` for unit input."""
    omega = np.asarray(omega, dtype=np.float64).reshape(3)
    planar = float(np.hypot(omega[1], omega[2]))
    theta = 0.5 * np.arctan2(planar, omega[0])
    phi = float(np.arctan2(omega[2], omega[1])) if planar > 1e-14 else 0.0
    return float(theta), phi


def slice_point(params: EllipsoidParams, theta: float, phi: float) -> np.ndarray:
    """The slice point ``a + b cos(2 th) + Re(c e^{i phi}) sin(2 th)``."""
    return (
        params.a
        + params.b * np.cos(2.0 * theta)
        + (params.c * np.exp(1j * phi)).real * np.sin(2.0 * theta)
    )


def nearest_surface(params: EllipsoidParams, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Best unit-norm preimage: minimizes ``||a + M omega - y||`` over the sphere.

    Solved exactly through the secular equation of the constrained least
    squares problem; the degenerate ("hard") case, where the optimal
    multiplier hits the smallest singular value, pads the solution inside
    the corresponding singular subspace.
    """
    y = np.asarray(y, dtype=np.float64).reshape(3)
    m = params.m_matrix
    p, sig, qt = np.linalg.svd(m)
    s = p.T @ (y - params.a)
    prod = sig * s
    floor = sig[-1] ** 2
    tie = np.isclose(sig**2, floor, rtol=1e-12, atol=0.0)
    scale = max(1.0, float(sig[0]) * float(np.linalg.norm(s)))
    hard = bool(np.all(np.abs(prod[tie]) <= 1e-14 * scale))

    def secular(lam: float, skip_tie: bool) -> float:
        total = 0.0
        for i in range(3):
            if skip_tie and tie[i]:
                continue
            den = sig[i] ** 2 - lam
            if den <= 0.0:
                return np.inf
            total += (prod[i] / den) ** 2
        return total

    z = np.zeros(3)
    if hard and secular(floor, True) <= 1.0:
        for i in range(3):
            if not tie[i]:
                z[i] = prod[i] / (sig[i] ** 2 - floor)
        deficit = max(0.0, 1.0 - float(z @ z))
        z[int(np.argmax(tie))] += np.sqrt(deficit)
    else:
        lo = floor - float(np.linalg.norm(prod)) - 1.0
        hi = floor
        for _ in range(300):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if secular(mid, hard) > 1.0:
                hi = mid
            else:
                lo = mid
        for i in range(3):
            den = sig[i] ** 2 - lo
            if hard and tie[i]:
                continue
            if den != 0.0:
                z[i] = prod[i] / den
    norm = float(np.linalg.norm(z))
    if norm > 0.0:
        z = z / norm
    else:
        z = np.array([1.0, 0.0, 0.0])
    omega = qt.T @ z
    distance = float(np.linalg.norm(m @ omega - (y - params.a)))
    return omega, distance


def slice_membership(
    params: EllipsoidParams, y: np.ndarray, tol: float
) -> MembershipVerdict:
    """Classify ``y`` against the slice with tolerance band ``tol``.

    The least-norm preimage ``omega`` of ``y - a`` under ``M`` decides:
    infeasible (residual above ``tol``) or over-long (``||omega|| > 1+tol``)
    means outside, with the exact surface distance attached; a unit-norm
    preimage within the band means on the surface, with angles recovered;
    strictly short preimages are interior for full-rank ``M`` and are
    padded to the surface by a null direction when ``M`` is rank-deficient
    (a degenerate slice fills its hull, so such points lie on it).
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    y = np.asarray(y, dtype=np.float64).reshape(3)
    m = params.m_matrix
    p, sig, qt = np.linalg.svd(m)
    cutoff = _RANK_CUTOFF * sig[0] if sig[0] > 0 else 0.0
    rank = int(np.sum(sig > cutoff))
    s = p.T @ (y - params.a)
    z = np.where(sig > cutoff, s / np.where(sig > cutoff, sig, 1.0), 0.0)
    omega = qt.T @ z
    residual = float(np.linalg.norm(m @ omega - (y - params.a)))
    rho = float(np.linalg.norm(omega))

    if residual > tol or rho > 1.0 + tol:
        _, distance = nearest_surface(params, y)
        feasible_omega = omega if residual <= tol else None
        return MembershipVerdict(OUTSIDE, omega=feasible_omega, distance=distance)

    if rho >= 1.0 - tol:
        unit = omega / rho if rho > 0 else np.array([1.0, 0.0, 0.0])
    elif rank <= 2:
        # degenerate slice: pad with a null direction up to unit norm
        null_dir = qt[rank] if rank < 3 else qt[2]
        unit = omega + np.sqrt(max(0.0, 1.0 - rho * rho)) * null_dir
        nrm = float(np.linalg.norm(unit))
        if nrm > 0:
            unit = unit / nrm
    else:
        return MembershipVerdict(INSIDE, omega=omega)

    theta, phi = angles_of_omega(unit)
    return MembershipVerdict(ON_SURFACE, omega=unit, theta=theta, phi=phi)


@dataclass(frozen=True, eq=False)
class DegenerateCertificate:
    """Output of the degeneration construction.

    ``v`` flattens the slice: the leading 2x2 block of ``V P' V*`` equals
    ``alpha I_2``, so the first output coordinate of the slice at ``V``
    is constant.
    """

    v: UnitaryMatrix
    alpha: float
    pprime: HermitianMatrix


def degenerate_unitary(d: DiagonalTuple, spec: LinearMapSpec) -> DegenerateCertificate:
    """A unitary at which the slice degenerates in its first coordinate.

    With ``P' = sum_i (d_1^(i) - d_2^(i)) C[1][i]``, choose the three
    smallest eigenpairs ``(lam_j, x_j)`` of ``P'``; the rows ``u* = x_2*``
    and ``v* = (cos t x_1 + sin t x_3)*`` with ``sin^2 t = (lam_2 - lam_1)
    / (lam_3 - lam_1)`` give a unitary whose leading block of ``V P' V*``
    is the scalar ``lam_2 I_2``, killing both the cos(2 theta) and the
    sin(2 theta) amplitude of the first coordinate.
    """
    spec3 = lift_map(spec)
    n = d.n
    if n < 3:
        raise ValueError(f"degeneration needs n >= 3, got n={n}")
    if spec3.m != d.m or spec3.n != n:
        raise ValueError(
            f"map expects (m={spec3.m}, n={spec3.n}), tuple has (m={d.m}, n={n})"
        )
    weights = d.vectors[:, 0] - d.vectors[:, 1]
    pprime_mat = np.einsum("i,iab->ab", weights, spec3.stack()[0])
    pprime = HermitianMatrix(pprime_mat)
    if float(np.linalg.norm(pprime.mat)) == 0.0:
        return DegenerateCertificate(UnitaryMatrix.identity(n), 0.0, pprime)
    w, x = hermitian_eig(pprime)
    lam1, lam2, lam3 = (float(w[j]) for j in range(3))
    x1, x2, x3 = x.mat[:, 0], x.mat[:, 1], x.mat[:, 2]
    span = lam3 - lam1
    if span <= ALGEBRAIC_TOL * max(1.0, float(np.abs(w).max())):
        sin_sq = 0.0
    else:
        sin_sq = min(1.0, max(0.0, (lam2 - lam1) / span))
    u_row = x2
    v_row = np.sqrt(1.0 - sin_sq) * x1 + np.sqrt(sin_sq) * x3
    null_basis = scipy.linalg.null_space(np.stack([u_row, v_row]).conj())
    v_mat = np.vstack([u_row.conj()[None], v_row.conj()[None], null_basis.conj().T])
    v = UnitaryMatrix(v_mat)
    block = v_mat @ pprime.mat @ v_mat.conj().T
    drift = float(np.abs(block[:2, :2] - lam2 * np.eye(2)).max())
    bound = ALGEBRAIC_TOL * max(1.0, float(np.linalg.norm(pprime.mat)))
    if drift > bound:
        raise RuntimeError(
            f"degeneration block drift {drift:.3e} exceeds {bound:.3e}"
        )
    return DegenerateCertificate(v, lam2, pprime)
