"""Algebraic well-posedness criteria and growth parameters.

A compact system is well posed when all principal matrices C^a are symmetric,
the normal u-block Nu is positive definite, the normal x-block Nx is
non-positive, and Nu + Nx is positive definite (the surfaces u + x = T are
then spatial).  The growth parameters r = max |R_ij| and c = min eig(C^u+C^x)
give the bound factor e^{(r/c)T}, valid for T < c/r; the factor is 1 when R
is non-negative.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import matkit
from .canonical import CompactSystem
from .matkit import Definiteness, DefinitenessClass


class Verdict(enum.Enum):
    WELL_POSED = "WELL_POSED"
    NOT_WELL_POSED = "NOT_WELL_POSED"
    INCONCLUSIVE = "INCONCLUSIVE"


class NormUndefinedError(ValueError):
    """C^u + C^x is not positive definite; no norm exists on Sigma_T."""


_NONPOSITIVE = (Definiteness.NEGATIVE_SEMI, Definiteness.NEGATIVE_DEFINITE,
                Definiteness.ZERO)
_NONNEGATIVE = (Definiteness.ZERO, Definiteness.POSITIVE_SEMI,
                Definiteness.POSITIVE_DEFINITE)

# absolute eigenvalue band under which a failed Nx sign check is reported as
# INCONCLUSIVE instead of NOT_WELL_POSED
MARGINAL_BAND = matkit.TOL_EIG


@dataclass(frozen=True)
class WellPosednessReport:
    symmetric_Ca: dict
    class_Nu: DefinitenessClass
    class_Nx: DefinitenessClass
    class_NuPlusNx: DefinitenessClass
    class_R: DefinitenessClass
    verdict: Verdict
    r: float
    c: float
    growth_exponent: float
    T_max: float
    time_function_ok: bool


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def _classify(M: np.ndarray, tol: float) -> DefinitenessClass:
    return matkit.classify_definiteness(_sym(M), tol)


def check_criteria(cf: CompactSystem, tol: float = matkit.TOL_EIG,
                   sym_tol: float = matkit.TOL_SYM) -> WellPosednessReport:
    """Evaluate the symmetry/definiteness criteria on a compact system."""
    symmetric = {}
    for name, C in cf.C.items():
        scale = max(float(np.linalg.norm(C, 2)), np.finfo(float).tiny)
        symmetric[name] = bool(np.linalg.norm(C - C.T, 2) <= sym_tol * scale)

    cls_Nu = _classify(cf.Nu, tol)
    cls_Nx = _classify(cf.Nx, tol)
    cls_sum = _classify(cf.Nu + cf.Nx, tol)
    cls_R = _classify(cf.R, tol)

    nx_ok = cls_Nx.tag in _NONPOSITIVE
    all_sym = all(symmetric.values())
    nu_pd = cls_Nu.tag is Definiteness.POSITIVE_DEFINITE
    sum_pd = cls_sum.tag is Definiteness.POSITIVE_DEFINITE

    if all_sym and nu_pd and nx_ok and sum_pd:
        verdict = Verdict.WELL_POSED
    elif (all_sym and nu_pd and sum_pd and not nx_ok
          and cf.nq > 0 and max(cls_Nx.eigenvalues) <= MARGINAL_BAND):
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.NOT_WELL_POSED

    r = float(np.abs(cf.R).max()) if cf.R.size else 0.0
    eigs = np.linalg.eigvalsh(_sym(cf.C["u"] + cf.C["x"]))
    c = float(eigs[0])
    if cls_R.tag in _NONNEGATIVE or r == 0.0:
        T_max = math.inf
        growth = 0.0
    elif c > 0.0:
        T_max = c / r
        growth = r / c
    else:
        T_max = 0.0
        growth = math.inf
    return WellPosednessReport(
        symmetric_Ca=symmetric, class_Nu=cls_Nu, class_Nx=cls_Nx,
        class_NuPlusNx=cls_sum, class_R=cls_R, verdict=verdict,
        r=r, c=c, growth_exponent=growth, T_max=T_max,
        time_function_ok=sum_pd)


def growth_parameters(cf: CompactSystem, tol: float = matkit.TOL_EIG):
    """(r, c, T_max, factor) entering the a priori bound.

    factor(T) = 1 identically when R is non-negative (so T_max = inf),
    otherwise e^{(r/c)T} with the bound guaranteed only for T < T_max = c/r.
    """
    W = _sym(cf.C["u"] + cf.C["x"])
    cls = matkit.classify_definiteness(W, tol)
    if cls.tag is not Definiteness.POSITIVE_DEFINITE:
        raise NormUndefinedError("no norm on Sigma_T: criterion ii violated")
    c = float(min(cls.eigenvalues))
    r = float(np.abs(cf.R).max()) if cf.R.size else 0.0
    cls_R = _classify(cf.R, tol)
    if cls_R.tag in _NONNEGATIVE or r == 0.0:
        return r, c, math.inf, lambda T: 1.0
    rate = r / c
    return r, c, c / r, lambda T: math.exp(rate * T)
