"""Bony decomposition operators and empirical product/composition ratios.

The low-pass used by the paraproduct includes the mean mode, and the
remainder carries the mean*mean term, so that

    para(u, v) + para(v, u) + remainder(u, v) == dealiased(u * v)

holds exactly (to round-off) for band-limited inputs.  All pointwise
products inside the operators use the 2/3-dealiased multiply; the
recomposition identity is therefore stated against the dealiased product,
which is the reference product throughout the package.
"""

from __future__ import annotations

import math

import numpy as np

from .besov import BesovSpec, HybridBesovSpec, besov_norm, hybrid_besov_norm, lp_norm
from .dyadic import DyadicFilter, dyadic_block
from .grid import SpectralField, mult

__all__ = [
    "para",
    "remainder",
    "bony_parts",
    "product_law_ratio",
    "hybrid_para_ratio",
    "composition_ratio",
]


def _mean_field(u: SpectralField) -> SpectralField:
    g = u.grid
    coeffs = np.zeros_like(u.coeffs)
    zero = (0,) * g.dim
    for c in range(u.ncomp):
        coeffs[(c, *zero)] = u.coeffs[(c, *zero)]
    return SpectralField(g, coeffs)


def _low_with_mean(filt: DyadicFilter, u: SpectralField, l: int) -> SpectralField:
    """S_{l} including the k = 0 mode, so S of a constant is the constant."""
    mean = _mean_field(u)
    if l <= filt.l_min:
        return mean
    mult_w = filt.cumulative_below(min(l, filt.l_max + 1))
    return SpectralField(u.grid, u.coeffs * mult_w + mean.coeffs)


def para(filt: DyadicFilter, u: SpectralField, v: SpectralField) -> SpectralField:
    """T_u v = sum_q S_{q-1} u  Delta_q v (dealiased blockwise products)."""
    if u.grid != v.grid:
        raise ValueError("grid mismatch")
    out = SpectralField.zeros(u.grid, max(u.ncomp, v.ncomp))
    for q in filt.levels:
        dv = dyadic_block(filt, v, q)
        if np.abs(dv.coeffs).max() == 0.0:
            continue
        su = _low_with_mean(filt, u, q - 1)
        out = out + mult(su, dv)
    return out


def remainder(filt: DyadicFilter, u: SpectralField, v: SpectralField) -> SpectralField:
    """R(u, v) = sum_q Delta_q u (Delta_{q-1} + Delta_q + Delta_{q+1}) v.

    Blocks outside the filter range are treated as zero; the mean*mean
    product is carried here (the k = 0 mode acts as the bottom diagonal).
    """
    if u.grid != v.grid:
        raise ValueError("grid mismatch")
    out = mult(_mean_field(u), _mean_field(v))
    for q in filt.levels:
        du = dyadic_block(filt, u, q)
        if np.abs(du.coeffs).max() == 0.0:
            continue
        tilde = np.zeros(filt.grid.shape)
        for qq in (q - 1, q, q + 1):
            if filt.l_min <= qq <= filt.l_max:
                tilde += filt.weight(qq)
        dv = SpectralField(v.grid, v.coeffs * tilde)
        out = out + mult(du, dv)
    return out


def bony_parts(filt: DyadicFilter, u: SpectralField, v: SpectralField):
    """(T_u v, T_v u, R(u, v)); their sum is the dealiased product."""
    return para(filt, u, v), para(filt, v, u), remainder(filt, u, v)


def product_law_ratio(
    filt: DyadicFilter,
    u: SpectralField,
    v: SpectralField,
    spec_out: BesovSpec,
    spec_u: BesovSpec,
    spec_v: BesovSpec,
    law: str = "linf_symmetric",
) -> float:
    """||uv||_{spec_out} over the right side of the chosen product law.

    law = "linf_symmetric":  ||u||_inf ||v||_{spec_v} + ||v||_inf ||u||_{spec_u}
    law = "linf_factor":     ||u||_{spec_u} * max(||v||_{spec_v}, ||v||_inf)

    Diagnostics only; nan when the denominator degenerates.
    """
    uv = mult(u, v)
    num = besov_norm(uv, spec_out, filt)
    if law == "linf_symmetric":
        den = lp_norm(u, math.inf) * besov_norm(v, spec_v, filt) + lp_norm(
            v, math.inf
        ) * besov_norm(u, spec_u, filt)
    elif law == "linf_factor":
        den = besov_norm(u, spec_u, filt) * max(
            besov_norm(v, spec_v, filt), lp_norm(v, math.inf)
        )
    else:
        raise ValueError(f"unknown product law {law!r}")
    if den == 0.0:
        return math.nan
    return num / den


def hybrid_para_ratio(
    filt: DyadicFilter,
    u: SpectralField,
    v: SpectralField,
    hspec_out: HybridBesovSpec,
    hspec_u: HybridBesovSpec,
    hspec_v: HybridBesovSpec,
    op: str = "para",
) -> float:
    """Ratio of a paraproduct/remainder hybrid norm to the input-norm product.

    op = "para":           ||T_u v||_{hspec_out}
    op = "remainder_high": high-block weighted sum of ||Delta_l R(u,v)||
    op = "remainder_low":  low-block weighted sum (split at hspec_out.l0)
    """
    den = hybrid_besov_norm(u, hspec_u, filt) * hybrid_besov_norm(v, hspec_v, filt)
    if den == 0.0:
        zero_in = (
            np.abs(u.coeffs).max() == 0.0 or np.abs(v.coeffs).max() == 0.0
        )
        return 0.0 if zero_in else math.nan
    if op == "para":
        num = hybrid_besov_norm(para(filt, u, v), hspec_out, filt)
    elif op in ("remainder_high", "remainder_low"):
        r = remainder(filt, u, v)
        num = 0.0
        for l in filt.levels:
            if (l > hspec_out.l0) != (op == "remainder_high"):
                continue
            s = hspec_out.s_high if op == "remainder_high" else hspec_out.s_low
            p = hspec_out.p_high if op == "remainder_high" else hspec_out.p_low
            num += 2.0 ** (l * s) * lp_norm(dyadic_block(filt, r, l), p)
    else:
        raise ValueError(f"unknown operator {op!r}")
    return num / den


def composition_ratio(
    filt: DyadicFilter,
    field: SpectralField,
    s: float,
    p: float = 2.0,
    quadratic: bool = False,
) -> float:
    """Diagnostic for the exponential composition bound with F(x) = e^x - 1.

    Returns ||e^u - 1||_{B^s_{p,1}} / ||u||  (or the quadratic-part variant
    ||e^u - 1 - u|| / ||u||^2 with ``quadratic=True``).  Requires
    ||u||_inf <= 2 to stay in a fixed composition regime.
    """
    linf = lp_norm(field, math.inf)
    if linf > 2.0:
        raise ValueError(f"||u||_inf = {linf:.3g} exceeds the composition bound 2")
    from .grid import SpectralField as SF, dealias

    expm1 = dealias(SF.from_values(field.grid, np.expm1(field.values)))
    spec = BesovSpec(s, p, 1.0)
    den = besov_norm(field, spec, filt)
    if den == 0.0:
        return math.nan
    if quadratic:
        num = besov_norm(expm1 - field, spec, filt)
        return num / den**2
    return besov_norm(expm1, spec, filt) / den
