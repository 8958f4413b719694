"""Regime dichotomy of the repulsive ball-potential derivative."""
from __future__ import annotations

import numpy as np

from ..quadrature import DEFAULT_QUAD, QuadratureSpec
from ..radial_kernel import ball_potential_derivative
from .records import VerifyRecord, combine, decide


def derivative_sup(lam: float, N: int, quad: QuadratureSpec = DEFAULT_QUAD, samples: int = 201) -> float:
    """``max |phi'_{-lambda}|`` on ``[0.5, 1.5]`` by the angular quadrature (no closed forms)."""
    r = np.linspace(0.5, 1.5, samples)
    return float(np.max(np.abs(ball_potential_derivative(-lam, r, N, quad, method="quadrature"))))


def blowup_exponent(lam: float, N: int, ks=(2, 3, 4, 5), quad: QuadratureSpec = DEFAULT_QUAD) -> dict:
    """Fitted exponent of ``|phi'_{-lambda}(1 +- 10^-k)|`` against ``10^-k``."""
    d = np.array([10.0 ** (-k) for k in ks])
    out = {}
    for side, sgn in (("outer", 1.0), ("inner", -1.0)):
        vals = np.abs(ball_potential_derivative(-lam, 1.0 + sgn * d, N, quad))
        out[side] = float(np.polyfit(np.log(d), np.log(vals), 1)[0])
        out[f"{side}_values"] = vals.tolist()
    both = np.concatenate([d, d])
    vals = np.abs(
        np.concatenate(
            [ball_potential_derivative(-lam, 1.0 + d, N, quad), ball_potential_derivative(-lam, 1.0 - d, N, quad)]
        )
    )
    out["combined"] = float(np.polyfit(np.log(both), np.log(vals), 1)[0])
    return out


def potential_bounds_suite(N: int = 3, lam_bounded: float = 1.0, lam_singular: float = 2.5,
                           statement: str = "potential-bounds") -> VerifyRecord:
    s1 = derivative_sup(lam_bounded, N)
    s4 = derivative_sup(lam_bounded, N, DEFAULT_QUAD.refined(4))
    change = abs(s4 / s1 - 1)
    expo = blowup_exponent(lam_singular, N)
    target = -lam_singular + N - 1
    v_stable = decide(0.01 - change, 0.0)
    v_expo = decide(0.1 - abs(expo["combined"] - target), 0.0)
    return VerifyRecord(
        statement=statement,
        inputs={"N": N, "lambda_bounded": lam_bounded, "lambda_singular": lam_singular},
        measured={"sup_default": s1, "sup_refined4": s4, "relative_change": change, "exponents": expo},
        fit={"exponent": expo["combined"], "expected_exponent": target},
        budget=0.0,
        verdict=combine([v_stable, v_expo]),
    )
