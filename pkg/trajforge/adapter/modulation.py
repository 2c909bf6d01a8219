"""
Copyright © 2024 trajforge developers.

Segment-aware modulation of feed-forward outputs: each text position is scaled by
(1 + sum of the per-channel vectors of the segments it belongs to).
"""
from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np

from ..exceptions import DimensionMismatch, NonFinite
from ..parsing.mask import CHANNELS, SegmentMask

MaskLike = Union[SegmentMask, np.ndarray]


@dataclass(frozen=True)
class AdapterParams:
    gamma_thought: np.ndarray
    gamma_action: np.ndarray
    gamma_input: np.ndarray

    def __post_init__(self):
        gammas = [np.asarray(g, dtype=np.float64) for g in
                  (self.gamma_thought, self.gamma_action, self.gamma_input)]
        if any(g.ndim != 1 for g in gammas) or len({g.shape[0] for g in gammas}) != 1:
            raise DimensionMismatch("the three scaling vectors must be 1-d of equal length")
        if gammas[0].shape[0] < 1:
            raise DimensionMismatch("hidden dimension must be >= 1")
        for name, g in zip(("gamma_thought", "gamma_action", "gamma_input"), gammas):
            object.__setattr__(self, name, g)

    @property
    def d(self) -> int:
        return self.gamma_thought.shape[0]

    @property
    def stacked(self) -> np.ndarray:
        """ 3 x d, rows ordered as the mask channels """
        return np.stack([self.gamma_thought, self.gamma_action, self.gamma_input])

    @classmethod
    def zeros(cls, d: int) -> "AdapterParams":
        return cls(np.zeros(d), np.zeros(d), np.zeros(d))

    @classmethod
    def from_stacked(cls, gammas: np.ndarray) -> "AdapterParams":
        gammas = np.asarray(gammas, dtype=np.float64)
        if gammas.ndim != 2 or gammas.shape[0] != len(CHANNELS):
            raise DimensionMismatch(f"expected 3 x d scaling vectors, got {gammas.shape}")
        return cls(*gammas)


def _entries(mask: MaskLike) -> np.ndarray:
    entries = mask.entries if isinstance(mask, SegmentMask) else np.asarray(mask)
    if entries.ndim != 3 or entries.shape[2] != len(CHANNELS):
        raise DimensionMismatch(f"mask must be B x L x 3, got {entries.shape}")
    return entries.astype(np.float64)


def _check_finite(h: np.ndarray, name: str):
    if not np.isfinite(h).all():
        raise NonFinite(f"{name} has non-finite entries")


def modulation_delta(mask: MaskLike, params: AdapterParams) -> np.ndarray:
    """ delta[b, t, :] = sum_i mask[b, t, i] * gamma_i, shape B x L x d """
    return np.einsum("bti,id->btd", _entries(mask), params.stacked)


def apply_modulation(h_ffn: np.ndarray, delta: np.ndarray) -> np.ndarray:
    h_ffn = np.asarray(h_ffn, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if h_ffn.shape != delta.shape:
        raise DimensionMismatch(f"hidden states {h_ffn.shape} and modulation {delta.shape} "
                                "differ in shape")
    _check_finite(h_ffn, "feed-forward output")
    return h_ffn * (1. + delta)


def layer_forward(h_attn: np.ndarray, ffn: Callable[[np.ndarray], np.ndarray],
                  norm: Callable[[np.ndarray], np.ndarray], params: AdapterParams,
                  mask: MaskLike) -> np.ndarray:
    """
    Residual feed-forward block with segment modulation.

    Parameters
    ----------
    h_attn : B x L x d
        hidden states after the attention sub-layer
    ffn : callable
        shape-preserving feed-forward map
    norm : callable
        normalization applied before ``ffn``
    params : AdapterParams
    mask : SegmentMask or B x L x 3 array

    Returns
    -------
    h : B x L x d
        ``h_attn + ffn(norm(h_attn)) * (1 + delta)``
    """
    h_attn = np.asarray(h_attn, dtype=np.float64)
    if h_attn.ndim != 3 or h_attn.shape[2] != params.d:
        raise DimensionMismatch(f"hidden states must be B x L x {params.d}, got {h_attn.shape}")
    _check_finite(h_attn, "attention output")
    h_ffn = np.asarray(ffn(norm(h_attn)), dtype=np.float64)
    if h_ffn.shape != h_attn.shape:
        raise DimensionMismatch(f"ffn changed the shape {h_attn.shape} -> {h_ffn.shape}")
    delta = modulation_delta(mask, params)
    return h_attn + apply_modulation(h_ffn, delta)


class GradientCheck(NamedTuple):
    max_rel_error: float
    analytic: np.ndarray
    numeric: np.ndarray
    passed: bool


def analytic_gradient(h_ffn: np.ndarray, mask: MaskLike, upstream: np.ndarray) -> np.ndarray:
    """ dloss/dgamma_i[c] = sum_{b,t} mask[b,t,i] * h_ffn[b,t,c] * upstream[b,t,c] """
    return np.einsum("bti,btc->ic", _entries(mask), h_ffn * upstream)


def gradient_check(loss: Callable[[np.ndarray], float],
                   loss_grad: Callable[[np.ndarray], np.ndarray],
                   h_ffn: np.ndarray, mask: MaskLike, params: AdapterParams,
                   epsilon: float = 1e-5, tolerance: float = 1e-6) -> GradientCheck:
    """
    Compares the analytic gradient of ``loss(apply_modulation(h_ffn, delta))`` with
    respect to the three scaling vectors against central finite differences.

    Parameters
    ----------
    loss : callable
        scalar loss of the modulated output
    loss_grad : callable
        its gradient with respect to the modulated output
    h_ffn : B x L x d
    mask : SegmentMask or B x L x 3 array
    params : AdapterParams
        point at which the gradient is taken
    epsilon : float
        finite-difference step
    tolerance : float
        maximum relative error for ``passed``

    Returns
    -------
    check : GradientCheck

    Raises
    ------
    NonFinite
        the loss or its gradient overflows
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    h_ffn = np.asarray(h_ffn, dtype=np.float64)
    gammas = params.stacked

    def evaluate(g):
        out = apply_modulation(h_ffn, modulation_delta(mask, AdapterParams.from_stacked(g)))
        value = float(loss(out))
        if not np.isfinite(value):
            raise NonFinite("loss is not finite")
        return value, out

    _, out = evaluate(gammas)
    upstream = np.asarray(loss_grad(out), dtype=np.float64)
    if upstream.shape != out.shape:
        raise DimensionMismatch("loss gradient must match the modulated output in shape")
    analytic = analytic_gradient(h_ffn, mask, upstream)
    if not np.isfinite(analytic).all():
        raise NonFinite("analytic gradient is not finite")

    numeric = np.zeros_like(gammas)
    for i in range(gammas.shape[0]):
        for c in range(gammas.shape[1]):
            plus, minus = gammas.copy(), gammas.copy()
            plus[i, c] += epsilon
            minus[i, c] -= epsilon
            numeric[i, c] = (evaluate(plus)[0] - evaluate(minus)[0]) / (2 * epsilon)

    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-12)
    err = float((np.abs(analytic - numeric) / denom).max())
    return GradientCheck(err, analytic, numeric, err < tolerance)


def sum_of_squares(h: np.ndarray) -> float:
    return float(0.5 * np.sum(h ** 2))


def sum_of_squares_grad(h: np.ndarray) -> np.ndarray:
    return np.asarray(h, dtype=np.float64)
