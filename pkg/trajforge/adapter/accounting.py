"""
Copyright © 2024 trajforge developers.
"""
from typing import Dict


def _positive(**kwargs):
    for k, v in kwargs.items():
        if v <= 0:
            raise ValueError(f"{k} must be positive, got {v}")


def parameter_stats(L: int, d: int, ffn_mult: int = 4, lora_rank: int = 8) -> Dict[str, float]:
    """
    Parameter counts of the segment adapter against the feed-forward blocks and a LoRA
    baseline, assuming the adapter sits in every one of the ``L`` layers.

    Returns
    -------
    stats : dict
        adapter_params (3 L d), ffn_params (3 L d ffn_mult d), rho (their ratio,
        1 / (4 d) at ffn_mult 4), lora_params (2 rank d L) and the per-layer counts
    """
    _positive(L=L, d=d, ffn_mult=ffn_mult, lora_rank=lora_rank)
    adapter_per_layer = 3 * d
    ffn_per_layer = 3 * d * ffn_mult * d
    lora_per_layer = 2 * lora_rank * d
    return {"adapter_params": L * adapter_per_layer,
            "ffn_params": L * ffn_per_layer,
            "rho": adapter_per_layer / ffn_per_layer,
            "lora_params": L * lora_per_layer,
            "adapter_per_layer": adapter_per_layer,
            "lora_per_layer": lora_per_layer}


def overhead_estimate(B: int, L_seq: int, L_t: int, d: int) -> float:
    """ relative flops of the modulation over the feed-forward matmuls:
    (B L_seq d + B L_t) / (B L_seq d^2) """
    _positive(B=B, L_seq=L_seq, d=d)
    if not 0 <= L_t <= L_seq:
        raise ValueError(f"L_t must lie in [0, L_seq], got {L_t}")
    return (B * L_seq * d + B * L_t) / (B * L_seq * d ** 2)
