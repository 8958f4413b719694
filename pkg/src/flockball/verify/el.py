"""Euler-Lagrange sign pattern of ball potentials and its failure near the surface."""
from __future__ import annotations

import math

import numpy as np

from ..geometry import ball_volume
from ..radial_kernel import KernelParams, combined_ball_potential, combined_potential_increment
from .records import FAIL, PASS, VerifyRecord, combine, decide

EL_SAMPLES = 10_000
# relative offsets scanned for surface violations: 10^-1 ... 10^-40
OFFSETS = tuple(10.0 ** (-k / 4.0) for k in range(4, 161))


def sign_pattern(params: KernelParams, R: float, samples: int = EL_SAMPLES, r_max_factor: float = 2.5) -> dict:
    """Check ``Phi(r) <= Phi(R) <= Phi(r')`` for ``r < R < r'`` on a uniform sample.

    Also fits ``c_hat = min |Phi(r) - Phi(R)| / (R^{N+alpha-1} min(|r-R|, R))``.
    """
    N, a = params.N, params.alpha
    r = np.linspace(0.0, r_max_factor * R, samples + 1)
    r = r[r != R]
    phi = combined_ball_potential(params, R, r)
    phi_R = combined_ball_potential(params, R, R)
    below = r < R
    bad_in = int(np.sum(phi[below] > phi_R))
    bad_out = int(np.sum(phi[~below] < phi_R))
    q = np.abs(phi - phi_R) / (R ** (N + a - 1) * np.minimum(np.abs(r - R), R))
    q_signed = np.where(below, phi_R - phi, phi - phi_R) / (R ** (N + a - 1) * np.minimum(np.abs(r - R), R))
    return {
        "R": R,
        "samples": int(r.size),
        "violations_inside": bad_in,
        "violations_outside": bad_out,
        "holds": bad_in == 0 and bad_out == 0,
        "c_hat": float(q_signed.min()),
        "c_hat_abs": float(q.min()),
        "Phi_R": float(phi_R),
    }


def surface_violation(params: KernelParams, R: float, offsets=OFFSETS) -> dict:
    """Largest ``delta`` with ``Phi(R(1-t)) > Phi(R) > Phi(R(1+t))`` for every scanned ``t <= delta``."""
    plus, minus = [], []
    for d in offsets:
        plus.append(combined_potential_increment(params, R, d))
        minus.append(combined_potential_increment(params, R, -d))
    plus = np.array(plus)
    minus = np.array(minus)
    viol = (plus < 0) & (minus > 0)
    delta = math.nan
    # offsets decrease; the interval is the tail of consecutive violations
    if viol[-1]:
        k = len(offsets) - 1
        while k > 0 and viol[k - 1]:
            k -= 1
        delta = float(offsets[k])
    return {
        "R": R,
        "detected": bool(np.isfinite(delta)),
        "delta": delta,
        "r1": R * (1 - delta) if np.isfinite(delta) else math.nan,
        "r2": R * (1 + delta) if np.isfinite(delta) else math.nan,
        "violating_offsets": int(viol.sum()),
    }


def check_el_ball(params: KernelParams, R_ladder, samples: int = EL_SAMPLES, statement: str = "el-ball") -> VerifyRecord:
    """Sign pattern and lower bound (lambda < N-1) or surface violation (lambda >= N-1)."""
    R_ladder = sorted(float(R) for R in R_ladder)
    N = params.N
    masses = [ball_volume(R, N) for R in R_ladder]
    if params.energy_regime:
        rows = [sign_pattern(params, R, samples) for R in R_ladder]
        m_hat = math.nan
        for k in range(len(rows) - 1, -1, -1):
            if not rows[k]["holds"]:
                break
            m_hat = masses[k]
        top = rows[-1]
        verdict = combine(
            [PASS if top["holds"] else FAIL, decide(top["c_hat"], 0.0)]
        )
        return VerifyRecord(
            statement=statement,
            inputs={"params": params.as_dict(), "R_ladder": R_ladder, "samples": samples},
            measured={"per_R": rows},
            fit={"m_hat": m_hat, "c_hat": top["c_hat"]},
            budget=0.0,
            verdict=verdict,
            notes="regime lambda < N-1: sign pattern and linear lower bound",
        )
    rows = [surface_violation(params, R) for R in R_ladder]
    verdict = PASS if all(r["detected"] for r in rows) else FAIL
    return VerifyRecord(
        statement=statement,
        inputs={"params": params.as_dict(), "R_ladder": R_ladder},
        measured={"per_R": rows},
        fit={"delta_min": min(r["delta"] for r in rows)},
        budget=0.0,
        verdict=verdict,
        notes="regime lambda >= N-1: violation interval around R",
    )


def threshold_trend(alpha: float, N: int, lams, R_ladder, samples: int = 2000) -> dict:
    """Empirical ``m_hat`` for several ``lambda`` (recorded, not asserted)."""
    out = {}
    for lam in lams:
        rec = check_el_ball(KernelParams(N, alpha, lam), R_ladder, samples)
        out[float(lam)] = rec.fit["m_hat"]
    return out
