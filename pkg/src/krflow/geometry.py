"""U(n)-invariant Kahler metrics on C^n reduced to one radial dimension.

A U(n)-invariant Kahler potential P depends on z only through
rho = log|z|^2.  The metric has two eigenvalue fields: P'(rho) e^{-rho} on
the (n-1) directions orthogonal to the radius and P''(rho) e^{-rho} on the
radial complex line.  Everything geometric reduces to ODE algebra in rho.

Representation.  A state stores the *logarithms* of the metric eigenvalues,

    a(rho) = log(P'  e^{-rho})      (orthogonal directions)
    b(rho) = log(P'' e^{-rho})      (radial direction)

with ``a`` primary and ``b = a + log1p(a')`` derived, which keeps the
Kahler exactness condition P'' = dP'/drho automatic.  Flat C^n is a == 0
exactly, and near the origin every smooth metric has a, b -> const with
e^rho-small tails, so curvature formulas (which divide by e^{rho+b}) stay
well conditioned down to rho ~ -16.  Raw potential samples lose this
conditioning; ``build_state`` accepts them anyway for generic input, at the
honest precision that representation allows.

Normalization.  All exposed scalars are Riemannian: R is the real scalar
curvature (the cigar |dz|^2/(1+|z|^2) has R = 4/(1+|z|^2)), the Laplacian is
the Laplace-Beltrami operator (so R = Laplacian of the Ricci potential
holds), and |grad f|^2 is the real gradient norm (|grad |z|^2|^2 = 4|z|^2
on flat C).  Curvature tensor components are reported in the unit frame at
the scale where a holomorphic plane's entry equals its real sectional
curvature; contracting that tensor yields the components of the real Ricci
tensor, whose real trace is R.  These choices are mutually consistent and
are the ones every closed-form anchor in the test suite checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import stencils
from .errors import (
    BoundaryNode,
    DimensionTooSmall,
    GridMismatch,
    GridTooCoarse,
    MetricDegenerate,
    NonHermitian,
)

MIN_GRID_NODES = 16

# Volume of C^n in these coordinates: dV = _vol_const(n) e^{(n-1)a + b + n rho} drho.
_FACTORIALS = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0]


def _vol_const(n: int) -> float:
    return np.pi**n / _FACTORIALS[n - 1]


@dataclass(frozen=True)
class Asymptotics:
    """Declared behavior of the metric beyond the grid.

    ``origin_model`` is always the flat model P ~ a e^rho (smoothness at the
    origin); ``far_field`` names the large-rho model and ``far_f_bounded``
    declares whether the Ricci potential of th continuum metric stays
    bounded as rho -> +infinity (grid truncation cannot decide this).
    """

    far_field: str = "flat"
    far_f_bounded: bool = True
    origin_model: str = "flat"


@dataclass(frozen=True)
class ScalarField:
    """Samples of a radial function on a state's grid."""

    grid: np.ndarray
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        g = np.asarray(self.grid, dtype=float)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "grid", g)
        if v.shape != g.shape:
            raise GridMismatch(f"field '{self.name}' has {v.shape} samples on a {g.shape} grid")
        if not np.all(np.isfinite(v)):
            raise GridMismatch(f"field '{self.name}' has non-finite entries")

    def __len__(self) -> int:
        return len(self.values)


def _check_same_grid(state: "RadialKahlerState", fieldv: ScalarField) -> np.ndarray:
    if len(fieldv.grid) != len(state.grid) or not np.array_equal(fieldv.grid, state.grid):
        raise GridMismatch("field grid differs from state grid")
    return fieldv.values


@dataclass(frozen=True)
class RadialKahlerState:
    """U(n)-invariant Kahler metric on C^n at one flow time.

    Immutable; all derived arrays are cached at construction.  ``log_orth``
    and ``log_rad`` are the log metric eigenvalues a, b described in the
    module docstring.
    """

    n: int
    grid: np.ndarray
    log_orth: np.ndarray
    log_rad: np.ndarray
    time: float = 0.0
    asymptotics: Asymptotics = field(default_factory=Asymptotics)

    def __post_init__(self):
        if self.n < 1:
            raise DimensionTooSmall("complex dimension must be >= 1")
        g = np.asarray(self.grid, dtype=float)
        if len(g) < MIN_GRID_NODES:
            raise GridTooCoarse(f"need >= {MIN_GRID_NODES} nodes, got {len(g)}")
        a = np.asarray(self.log_orth, dtype=float)
        b = np.asarray(self.log_rad, dtype=float)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "log_orth", a)
        object.__setattr__(self, "log_rad", b)
        h = stencils.spacing(g)
        object.__setattr__(self, "_h", h)
        if a.shape != g.shape or b.shape != g.shape:
            raise GridMismatch("eigenvalue fields must match the grid")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise MetricDegenerate("non-finite log eigenvalue field")

    # -- basic derived quantities -------------------------------------------------

    @property
    def h(self) -> float:
        """Grid spacing in rho."""
        return self._h

    @property
    def eigen_orth(self) -> np.ndarray:
        """Metric eigenvalue P' e^{-rho} on the orthogonal directions."""
        return np.exp(self.log_orth)

    @property
    def eigen_rad(self) -> np.ndarray:
        """Metric eigenvalue P'' e^{-rho} on the radial direction."""
        return np.exp(self.log_rad)

    @property
    def dP(self) -> np.ndarray:
        """P'(rho)."""
        return np.exp(self.log_orth + self.grid)

    @property
    def d2P(self) -> np.ndarray:
        """P''(rho)."""
        return np.exp(self.log_rad + self.grid)

    @property
    def log_det_rel(self) -> np.ndarray:
        """log det g = (n-1) log P' + log P'' - n rho, which is (n-1)a + b."""
        return (self.n - 1) * self.log_orth + self.log_rad

    @property
    def volume_weight(self) -> np.ndarray:
        """Radial volume weight proportional to (P')^{n-1} P''."""
        return np.exp(self.log_det_rel + self.n * self.grid)

    def volume_element(self) -> np.ndarray:
        """dV/drho including the angular volume constant."""
        return _vol_const(self.n) * self.volume_weight

    def kahler_defect(self) -> float:
        """Max deviation of b from the exactness relation b = a + log1p(a')."""
        da = stencils.diff1(self.log_orth, self.h, left_closure=True, right_closure=True)
        if np.min(1.0 + da) <= 0.0:
            return np.inf
        return float(np.max(np.abs(self.log_rad - (self.log_orth + np.log1p(da)))))

    def field(self, values: np.ndarray, name: str = "") -> ScalarField:
        return ScalarField(self.grid, np.asarray(values, dtype=float), name)

    def with_time(self, t: float) -> "RadialKahlerState":
        return RadialKahlerState(self.n, self.grid, self.log_orth, self.log_rad, t, self.asymptotics)


def from_log_orth(
    n: int,
    grid: np.ndarray,
    log_orth: np.ndarray,
    asymptotics: Asymptotics | None = None,
    time: float = 0.0,
) -> RadialKahlerState:
    """Build a state from the primary field a = log(P' e^{-rho}).

    The radial eigenvalue is derived from the exactness relation, so the
    result is Kahler by construction.
    """
    g = np.asarray(grid, dtype=float)
    a = np.asarray(log_orth, dtype=float)
    if len(g) < MIN_GRID_NODES:
        raise GridTooCoarse(f"need >= {MIN_GRID_NODES} nodes, got {len(g)}")
    h = stencils.spacing(g)
    da = stencils.diff1(a, h, left_closure=True, right_closure=True)
    if np.min(1.0 + da) <= 0.0:
        raise MetricDegenerate("derived P'' is not positive (1 + a' <= 0)")
    b = a + np.log1p(da)
    return RadialKahlerState(n, g, a, b, time, asymptotics or Asymptotics())


def build_state(
    n: int,
    grid: np.ndarray,
    potential_samples: Sequence[float],
    asymptotics: Asymptotics | None = None,
    time: float = 0.0,
) -> RadialKahlerState:
    """Build a state from raw Kahler potential samples P(rho_i).

    Derivatives are formed by finite differences, so deep near-origin tails
    (rho << -10) lose relative precision; prefer ``from_log_orth`` when a
    closed form for the metric eigenvalues is available.
    """
    g = np.asarray(grid, dtype=float)
    P = np.asarray(potential_samples, dtype=float)
    if len(g) < MIN_GRID_NODES:
        raise GridTooCoarse(f"need >= {MIN_GRID_NODES} nodes, got {len(g)}")
    if P.shape != g.shape:
        raise GridMismatch("potential samples must match the grid")
    if not np.all(np.isfinite(P)):
        raise MetricDegenerate("non-finite potential samples")
    h = stencils.spacing(g)
    dP = stencils.diff1(P, h)
    if np.min(dP) <= 0.0:
        raise MetricDegenerate("P' <= 0 somewhere on the grid")
    a = np.log(dP) - g
    return from_log_orth(n, g, a, asymptotics, time)


def regrid(state: RadialKahlerState, new_grid: np.ndarray, log_scale: float = 0.0) -> RadialKahlerState:
    """Resample a state onto ``new_grid``, optionally after the coordinate
    dilation z -> e^{log_scale/2} z (an isometry written in new coordinates).

    Fields transform as a'(rho') = a(rho' - log_scale) - log_scale.
    """
    from scipy.interpolate import CubicSpline

    g2 = np.asarray(new_grid, dtype=float)
    src = g2 - log_scale
    if src[0] < state.grid[0] - 1e-9 or src[-1] > state.grid[-1] + 1e-9:
        raise GridMismatch("new grid maps outside the source grid")
    a2 = CubicSpline(state.grid, state.log_orth)(src) - log_scale
    return from_log_orth(state.n, g2, a2, state.asymptotics, state.time)


# -- pointwise geometry ---------------------------------------------------------


def ricci_potential(state: RadialKahlerState) -> ScalarField:
    """Ricci potential f with R_ij = f_ij, gauged so f = 0 at the first node.

    f = n rho - (n-1) log P' - log P'' + c, which in log-eigenvalue variables
    is -((n-1)a + b) + c; the additive gauge follows the near-origin
    flat-model limit of the continuum metric.
    """
    L = state.log_det_rel
    return state.field(-(L - L[0]), "ricci_potential")


def laplacian(state: RadialKahlerState, fieldv: ScalarField) -> ScalarField:
    """Laplace-Beltrami operator on a radial function.

    Reduces to 4[(n-1) h'/P' + h''/P''] with derivatives in rho; the factor
    4 converts the complex Hessian trace to the real Laplacian in the
    normalization fixed by the module anchors.
    """
    v = _check_same_grid(state, fieldv)
    dv = stencils.diff1(v, state.h, left_closure=True, right_closure=True)
    d2v = stencils.diff2(v, state.h, left_closure=True, right_closure=True)
    rad = d2v * np.exp(-(state.grid + state.log_rad))
    if state.n > 1:
        orth = (state.n - 1) * dv * np.exp(-(state.grid + state.log_orth))
    else:
        orth = 0.0
    return state.field(4.0 * (orth + rad), f"lap({fieldv.name})")


def grad_norm_sq(state: RadialKahlerState, fieldv: ScalarField) -> ScalarField:
    """Real squared gradient norm, 4 h'(rho)^2 / P''."""
    v = _check_same_grid(state, fieldv)
    dv = stencils.diff1(v, state.h, left_closure=True, right_closure=True)
    return state.field(4.0 * dv * dv * np.exp(-(state.grid + state.log_rad)), f"|grad {fieldv.name}|^2")


def scalar_curvature(state: RadialKahlerState) -> ScalarField:
    """Scalar curvature R = Laplacian of the Ricci potential."""
    out = laplacian(state, ricci_potential(state))
    return state.field(out.values, "R")


def scalar_curvature_direct(state: RadialKahlerState) -> ScalarField:
    """R from the expanded formula 4[(n-1) f'/P' + f''/P''], same stencils."""
    f = ricci_potential(state).values
    df = stencils.diff1(f, state.h, left_closure=True, right_closure=True)
    d2f = stencils.diff2(f, state.h, left_closure=True, right_closure=True)
    rad = d2f * np.exp(-(state.grid + state.log_rad))
    if state.n > 1:
        orth = (state.n - 1) * df * np.exp(-(state.grid + state.log_orth))
    else:
        orth = 0.0
    return state.field(4.0 * (orth + rad), "R_direct")


def ricci_eigenvalues(state: RadialKahlerState) -> tuple[np.ndarray, np.ndarray]:
    """Unit-frame eigenvalues (radial, orthogonal) of the real Ricci tensor.

    Each complex direction carries one eigenvalue shared by its two real
    directions, so the real trace is 2*(rad + (n-1)*orth) = R.
    """
    f = ricci_potential(state).values
    df = stencils.diff1(f, state.h, left_closure=True, right_closure=True)
    d2f = stencils.diff2(f, state.h, left_closure=True, right_closure=True)
    rad = 2.0 * d2f * np.exp(-(state.grid + state.log_rad))
    orth = 2.0 * df * np.exp(-(state.grid + state.log_orth))
    return rad, orth


def ricci_norm_sq(state: RadialKahlerState) -> ScalarField:
    """Squared Ricci norm in the normalization matched to the flow clock.

    Defined as g^{ij}g^{kl} R_il R_kj over the exposed Ricci scale times 4,
    equivalently 2|Ric|^2 in real-tensor terms; this is the source term for
    which (d/dt - Lap)R has zero residual along the default flow.
    """
    rad, orth = ricci_eigenvalues(state)
    vals = 4.0 * (rad * rad + (state.n - 1) * orth * orth)
    return state.field(vals, "|Rc|^2")


def hessian20_norm_sq(state: RadialKahlerState, fieldv: ScalarField) -> ScalarField:
    """Squared norm of the (2,0)-Hessian of a radial function, in the same
    normalization as ``ricci_norm_sq`` (the Bochner identity's other term)."""
    v = _check_same_grid(state, fieldv)
    dv = stencils.diff1(v, state.h, left_closure=True, right_closure=True)
    d2v = stencils.diff2(v, state.h, left_closure=True, right_closure=True)
    db = stencils.diff1(state.log_rad, state.h, left_closure=True, right_closure=True)
    # unit-frame complex components of the (2,0) part
    h_rad = np.exp(-(state.grid + state.log_rad)) * (d2v - (1.0 + db) * dv)
    vals = 16.0 * h_rad * h_rad
    if state.n > 1:
        h_orth = dv * np.exp(-state.grid) * (
            np.exp(-state.log_rad) - np.exp(-state.log_orth)
        )
        vals = vals + 16.0 * (state.n - 1) * h_orth * h_orth
    return state.field(vals, f"|D20 {fieldv.name}|^2")


def curvature_profiles(state: RadialKahlerState) -> dict[str, np.ndarray]:
    """Independent curvature components of the U(n)-invariant ansatz.

    ``A`` is the holomorphic sectional curvature of the radial complex line,
    ``B`` the radial-orthogonal bisectional curvature, ``D`` the coefficient
    of the space-form structure on the orthogonal subspace (its holomorphic
    sectional curvature is 2D).  ``rm`` is the largest absolute unit-frame
    entry, the blow-up detector's curvature magnitude.
    """
    b = state.log_rad
    db = stencils.diff1(b, state.h, left_closure=True, right_closure=True)
    d2b = stencils.diff2(b, state.h, left_closure=True, right_closure=True)
    A = -2.0 * np.exp(-(state.grid + b)) * d2b
    if state.n > 1:
        q = np.exp(state.log_rad - state.log_orth)
        pref = 2.0 * np.exp(-(state.grid + state.log_orth))
        B = pref * (q - 1.0 - db)
        D = pref * (1.0 - q)
        rm = np.maximum(np.abs(A), np.maximum(np.abs(B), 2.0 * np.abs(D)))
    else:
        B = np.zeros_like(A)
        D = np.zeros_like(A)
        rm = np.abs(A)
    return {"A": A, "B": B, "D": D, "rm": rm}


def curvature_max_field(state: RadialKahlerState) -> ScalarField:
    """|Rm| per node (largest absolute unit-frame curvature entry)."""
    return state.field(curvature_profiles(state)["rm"], "|Rm|")


@dataclass(frozen=True)
class CurvaturePointData:
    """Full curvature tensor at one grid node, in the unit frame that
    diagonalizes the metric (radial direction first)."""

    node: int
    n: int
    riemann: np.ndarray  # R[i,j,k,l] meaning R_{i jbar k lbar}
    ricci: np.ndarray
    scalar: float
    traceless_ricci: np.ndarray
    holo_sectional: np.ndarray
    bisect_min: float
    bisect_max: float

    def max_entry(self) -> float:
        return float(np.max(np.abs(self.riemann)))


def assemble_tensor(n: int, A: float, B: float, D: float) -> np.ndarray:
    """Dense R_{i jbar k lbar} from the three radial invariants."""
    R = np.zeros((n, n, n, n))
    R[0, 0, 0, 0] = A
    for al in range(1, n):
        R[0, 0, al, al] = R[al, al, 0, 0] = B
        R[0, al, al, 0] = R[al, 0, 0, al] = B
        for be in range(1, n):
            for ga in range(1, n):
                for de in range(1, n):
                    R[al, be, ga, de] = D * (
                        (al == be) * (ga == de) + (al == de) * (ga == be)
                    )
    return R


def point_data_from_tensor(riemann: np.ndarray, node: int = 0) -> CurvaturePointData:
    """Contract a unit-frame curvature tensor into a CurvaturePointData."""
    R = np.asarray(riemann, dtype=float)
    n = R.shape[0]
    ric = np.einsum("ijkk->ij", R)
    herm_trace = float(np.trace(ric))
    scalar = 2.0 * herm_trace
    s2 = ric - (herm_trace / n) * np.eye(n)
    holo = np.array([R[i, i, i, i] for i in range(n)])
    bisect = np.array([[R[i, i, j, j] for j in range(n)] for i in range(n)])
    return CurvaturePointData(
        node=node,
        n=n,
        riemann=R,
        ricci=ric,
        scalar=scalar,
        traceless_ricci=s2,
        holo_sectional=holo,
        bisect_min=float(np.min(bisect)),
        bisect_max=float(np.max(bisect)),
    )


def curvature_tensor_at(state: RadialKahlerState, node: int) -> CurvaturePointData:
    """Curvature tensor at an interior grid node."""
    m = len(state.grid)
    if node < 2 or node > m - 3:
        raise BoundaryNode(f"node {node} is too close to the boundary")
    prof = curvature_profiles(state)
    R = assemble_tensor(state.n, prof["A"][node], prof["B"][node], prof["D"][node])
    return point_data_from_tensor(R, node)


# -- the partial curvature operator on traceless (1,1)-forms -------------------


def _traceless_hermitian_basis(n: int) -> list[np.ndarray]:
    """Orthonormal basis (trace inner product) of traceless hermitian n x n."""
    basis: list[np.ndarray] = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = m[j, i] = 1.0 / np.sqrt(2.0)
            basis.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = -1j / np.sqrt(2.0)
            m[j, i] = 1j / np.sqrt(2.0)
            basis.append(m)
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -k
        d /= np.sqrt(k * (k + 1.0))
        basis.append(np.diag(d).astype(complex))
    return basis


def phong_sturm_operator(
    point: CurvaturePointData | np.ndarray, n: int | None = None
) -> tuple[np.ndarray, float]:
    """Partial curvature operator on traceless (1,1)-forms.

    Assembles S_{ij kl} = R_{ij kl} - (1/n)(S_ij d_kl + d_ij S_kl)
    + (1/n^2) R d_ij d_kl from the tensor's own contractions, restricts it
    to traceless hermitian forms, and returns the matrix together with the
    sum of its two smallest eigenvalues (the quantity whose sign controls
    preservation of Ricci positivity on surfaces).
    """
    if isinstance(point, CurvaturePointData):
        R4 = point.riemann
        n = point.n
    else:
        R4 = np.asarray(point, dtype=float)
        n = R4.shape[0] if n is None else n
    if n < 2:
        raise DimensionTooSmall("traceless (1,1)-forms need n >= 2")
    ric = np.einsum("ijkk->ij", R4)
    rh = float(np.trace(ric))
    eye = np.eye(n)
    s2 = ric - (rh / n) * eye
    S4 = (
        R4
        - (np.einsum("ij,kl->ijkl", s2, eye) + np.einsum("ij,kl->ijkl", eye, s2)) / n
        + (rh / n**2) * np.einsum("ij,kl->ijkl", eye, eye)
    )
    basis = _traceless_hermitian_basis(n)
    dim = len(basis)
    M = np.empty((dim, dim), dtype=complex)
    for p in range(dim):
        for q in range(dim):
            M[p, q] = np.einsum("ij,ijkl,lk->", np.conj(basis[p]), S4, basis[q])
    defect = float(np.max(np.abs(M - M.conj().T)))
    if defect > 1e-8:
        raise NonHermitian(f"symmetrization residual {defect:.3e} exceeds 1e-8")
    M = 0.5 * (M + M.conj().T)
    eigs = np.linalg.eigvalsh(M)
    return M, float(eigs[0] + eigs[1])
