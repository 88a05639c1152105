"""Initial-data library.

Each preset exists to exercise one theorem or hypothesis gate: flat space is
the fixed point, the cigar is the steady soliton with unbounded Ricci
potential, the bounded-f cigar turns the decay-bound hypothesis on, the
positive bump and the cusp drive the maximum-principle suite from both
curvature signs, and the U(2) example feeds the bisectional/partial-operator
monitors.  All presets construct the log-eigenvalue field in closed form so
the near-origin tails keep full relative precision.
"""

from __future__ import annotations

import numpy as np

from .geometry import Asymptotics, RadialKahlerState, from_log_orth
from .errors import ConfigInvalid


def _grid(rho_min: float, rho_max: float, m: int) -> np.ndarray:
    return np.linspace(rho_min, rho_max, m)


def flat(n: int = 1, rho_min: float = -8.0, rho_max: float = 8.0, m: int = 512) -> RadialKahlerState:
    """Flat C^n: both log eigenvalue fields exactly zero."""
    g = _grid(rho_min, rho_max, m)
    return from_log_orth(n, g, np.zeros_like(g), Asymptotics("flat", True))


def cigar(rho_min: float = -16.0, rho_max: float = 16.0, m: int = 2048) -> RadialKahlerState:
    """Hamilton's cigar |dz|^2/(1+|z|^2) on C.

    P' = log(1+e^rho), so a = log(log1p(e^rho) e^{-rho}); evaluated in a form
    that keeps relative precision in both tails.  The Ricci potential
    log(1+|z|^2) is unbounded, so the far field is declared cylinder-like
    with unbounded f.
    """
    g = _grid(rho_min, rho_max, m)
    # a = log(log1p(x)/x) at x = e^rho.  In the deep tail log1p(x)/x - 1 must
    # be summed as a series: forming it from library log1p leaves white
    # absolute noise ~1e-16 that the curvature stencils amplify by e^{-rho}/h^2.
    a = np.empty_like(g)
    tail = g <= -4.0
    x = np.exp(g[tail])
    w = np.zeros_like(x)
    for k in range(14, 0, -1):
        w = w * (-x) + (-x) / (k + 1.0)
    # w accumulated via Horner on (-x): w = sum_k (-x)^k/(k+1)
    a[tail] = np.log1p(w)
    mid = (~tail) & (g <= 0)
    a[mid] = np.log(np.log1p(np.exp(g[mid])) * np.exp(-g[mid]))
    pos = g > 0
    a[pos] = np.log(np.log1p(np.exp(-g[pos])) + g[pos]) - g[pos]
    # radial log eigenvalue in closed form: b = -log(1+e^rho), evaluated
    # stably in both tails
    b = np.where(g <= 0, -np.log1p(np.exp(np.minimum(g, 0.0))),
                 -(g + np.log1p(np.exp(-np.maximum(g, 0.0)))))
    return RadialKahlerState(1, g, a, b, 0.0, Asymptotics("cylinder", False))


def cigar_bounded_f(
    f_cap: float = 4.0, rho_min: float = -12.0, rho_max: float = 12.0, m: int = 768
) -> RadialKahlerState:
    """Cigar with the Ricci potential smoothly capped at ``f_cap``.

    Built through the radial eigenvalue b = -f with f = cap * tanh(f_cigar/cap),
    keeping f bounded (the decay-bound hypothesis holds) while the metric
    stays a mild deformation of the cigar.  The orthogonal log eigenvalue is
    recovered by integrating P'' with a flat-model closure at the left end.
    """
    g = _grid(rho_min, rho_max, m)
    f_cigar = np.log1p(np.exp(np.minimum(g, 30.0)))
    f_cigar[g > 30.0] = g[g > 30.0]
    f = f_cap * np.tanh(f_cigar / f_cap)
    return _state_from_log_rad(1, g, -f, Asymptotics("flat", True))


def positive_bump(
    amplitude: float = 0.5,
    width: float = 0.5,
    center: float = 0.0,
    rho_min: float = -10.0,
    rho_max: float = 14.0,
    m: int = 768,
) -> RadialKahlerState:
    """Complete surface with R >= 0 concentrated near |z| ~ e^{center/2}.

    b = -amplitude*width*log(1+e^{(rho-center)/width}) is concave, which makes
    R = -2 e^{-rho-b} b'' nonnegative everywhere; curvature decays in both
    tails for width < 1 and the metric stays complete for amplitude*width < 1.
    """
    if amplitude * width >= 1.0:
        raise ConfigInvalid("positive_bump needs amplitude*width < 1 for completeness")
    g = _grid(rho_min, rho_max, m)
    b = -amplitude * width * _softplus((g - center) / width)
    return _state_from_log_rad(1, g, b, Asymptotics("cone", False))


def cusp(
    depth: float = 0.2,
    width: float = 0.5,
    center: float = 0.0,
    rho_min: float = -10.0,
    rho_max: float = 14.0,
    m: int = 768,
) -> RadialKahlerState:
    """Negatively curved cusp-like profile: the convex mirror of the bump."""
    g = _grid(rho_min, rho_max, m)
    b = depth * width * _softplus((g - center) / width)
    return _state_from_log_rad(1, g, b, Asymptotics("cone", False))


def u2_positive_bisectional(
    strength: float = 0.5, rho_min: float = -8.0, rho_max: float = 8.0, m: int = 512
) -> RadialKahlerState:
    """Complete U(2)-invariant metric with positive bisectional curvature.

    A Fubini-Study profile opened up at the far end: a = -strength*log(1+e^rho)
    with strength < 1 keeps the metric complete while every curvature
    component stays positive (checked by the monitors this preset feeds).
    """
    if not (0.0 < strength < 1.0):
        raise ConfigInvalid("u2_positive_bisectional needs 0 < strength < 1")
    g = _grid(rho_min, rho_max, m)
    a = -strength * _softplus(g)
    return from_log_orth(2, g, a, Asymptotics("cone", False))


def _softplus(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    neg = x <= 0
    out[neg] = np.log1p(np.exp(x[neg]))
    out[~neg] = x[~neg] + np.log1p(np.exp(-x[~neg]))
    return out


def _state_from_log_rad(
    n: int, grid: np.ndarray, log_rad: np.ndarray, asym: Asymptotics
) -> RadialKahlerState:
    """State from the radial log eigenvalue b, integrating P' = int P''.

    P'(rho) = int_{-inf}^rho e^{rho'+b} drho'; the tail below the grid uses
    the flat model with the left-end value of b.  Spline quadrature keeps the
    derived orthogonal eigenvalue at the stencil order.
    """
    from scipy.interpolate import CubicSpline

    d2P = np.exp(grid + log_rad)
    left_tail = d2P[0]  # int_{-inf}^{rho_0} e^{rho + b(rho_0)} drho
    dP = left_tail + np.concatenate(
        ([0.0], CubicSpline(grid, d2P).antiderivative()(grid[1:]))
    )
    # a = log(P' e^{-rho}) formed in scaled arithmetic so the near-origin
    # tail keeps relative precision
    a = np.log(dP * np.exp(-grid))
    return RadialKahlerState(n, grid, a, log_rad, 0.0, asym)


_REGISTRY = {
    "flat": lambda **kw: flat(1, **kw),
    "flat-c1": lambda **kw: flat(1, **kw),
    "flat-c2": lambda **kw: flat(2, **kw),
    "cigar": cigar,
    "perturbed-cigar-bounded-f": cigar_bounded_f,
    "positive-bump": positive_bump,
    "cusp": cusp,
    "u2-positive-bisectional": u2_positive_bisectional,
}


def preset_names() -> list[str]:
    return sorted(_REGISTRY)


def make(name: str, **overrides) -> RadialKahlerState:
    """Instantiate a preset by name; grid overrides are keyword arguments."""
    if name not in _REGISTRY:
        raise ConfigInvalid(f"unknown preset '{name}'; choose from {preset_names()}")
    return _REGISTRY[name](**overrides)
