"""Builtin copula families and the two classic non-copula counterexamples."""

from __future__ import annotations

import numpy as np

from .core import Copula2D, DEFAULT_TOL, GridSpec, Rectangle, h_volume, verify_copula
from .errors import InputError


def independence() -> Copula2D:
    """The product copula C(u, v) = uv."""
    return Copula2D(name="independence", func=lambda u, v: u * v)


def min_copula() -> Copula2D:
    """The comonotone upper Frechet bound M(u, v) = min(u, v)."""
    return Copula2D(name="min-copula", func=np.minimum)


def w_copula() -> Copula2D:
    """The countermonotone lower Frechet bound W(u, v) = max(u + v - 1, 0)."""
    return Copula2D(name="w-copula", func=lambda u, v: np.maximum(u + v - 1.0, 0.0))


def fgm(theta: float) -> Copula2D:
    """The FGM family C(u, v) = uv(1 + theta(1-u)(1-v)); requires |theta| <= 1."""
    theta = float(theta)
    if not abs(theta) <= 1.0:
        raise InputError(f"fgm parameter theta must satisfy |theta| <= 1, got {theta}")
    return Copula2D(
        name="fgm",
        func=lambda u, v: u * v * (1.0 + theta * (1.0 - u) * (1.0 - v)),
        params={"theta": theta},
    )


def counterexample_product_factor() -> Copula2D:
    """f(a, b) = (2a-1)(2b-1): 2-increasing everywhere yet not monotone in either argument."""
    return Copula2D(
        name="fgm-counterexample-factor",
        func=lambda a, b: (2.0 * a - 1.0) * (2.0 * b - 1.0),
        is_copula_claim=False,
    )


def counterexample_max() -> Copula2D:
    """g(a, b) = max(a, b): monotone in each argument yet far from 2-increasing."""
    return Copula2D(name="max-counterexample", func=np.maximum, is_copula_claim=False)


def builtin_copulas(fgm_theta: float = 0.5) -> list[Copula2D]:
    """All bundled test subjects: the three Frechet/product copulas, one FGM member,
    and the two counterexamples (tagged is_copula_claim=False)."""
    return [
        independence(),
        min_copula(),
        w_copula(),
        fgm(fgm_theta),
        counterexample_product_factor(),
        counterexample_max(),
    ]


_FACTORIES = {
    "independence": lambda theta: independence(),
    "min-copula": lambda theta: min_copula(),
    "w-copula": lambda theta: w_copula(),
    "fgm": fgm,
    "fgm-counterexample-factor": lambda theta: counterexample_product_factor(),
    "max-counterexample": lambda theta: counterexample_max(),
}


def builtin_names() -> list[str]:
    return list(_FACTORIES)


def resolve_builtin(name: str, theta: float = 0.5) -> Copula2D:
    """Look up a builtin by its registered CLI name; theta applies to fgm only."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        known = ", ".join(builtin_names())
        raise InputError(f"unknown builtin {name!r}; known builtins: {known}") from None
    return factory(theta)


def counterexample_findings(grid: GridSpec | None = None, tol: float = DEFAULT_TOL) -> dict:
    """Verify both counterexamples and collect the headline findings.

    For f the report pins a decreasing segment of a -> f(a, 0); for g it pins
    the volume of the whole unit square, which is exactly -1.
    """
    grid = grid or GridSpec(21)
    pts = grid.points()

    f = counterexample_product_factor()
    f_reports = verify_copula(f, grid, tol)
    f_first, f_second = float(f(pts[0], 0.0)), float(f(pts[1], 0.0))
    f_entry = {
        "name": f.name,
        "is_copula_claim": f.is_copula_claim,
        "reports": [r.to_json_dict() for r in f_reports],
        "findings": {
            "decreasing_segment": {
                "line_v": 0.0,
                "u_start": float(pts[0]),
                "u_end": float(pts[1]),
                "value_start": f_first,
                "value_end": f_second,
            }
        },
    }

    g = counterexample_max()
    g_reports = verify_copula(g, grid, tol)
    g_entry = {
        "name": g.name,
        "is_copula_claim": g.is_copula_claim,
        "reports": [r.to_json_dict() for r in g_reports],
        "findings": {
            "unit_square_volume": h_volume(g, Rectangle(0.0, 1.0, 0.0, 1.0)),
        },
    }

    return {
        "schema_version": 1,
        "grid_n": grid.n,
        "tolerance": tol,
        "counterexamples": [f_entry, g_entry],
    }
