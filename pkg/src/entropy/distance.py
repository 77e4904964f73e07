from typing import Sequence

import numpy as np

from src.common.errors import ContractError


def statistical_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """
    Half the L1 distance between two distributions over the same finite domain.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ContractError(f"distributions over different domains: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def distance_from_uniform(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=np.float64)
    if p.size == 0:
        raise ContractError("empty distribution")
    return statistical_distance(p, np.full(p.size, 1.0 / p.size))
