"""Counter-based random draws for reproducible Monte Carlo substreams.

Every random number consumed by a drop is a pure function of
(seed, drop_index, slot), so results are bit-identical regardless of
execution order, chunking, or worker count. The mapping is three chained
applications of the splitmix64 finalizer; the algorithm identifier stored
in configs and manifests is "splitmix64-counter".
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

ALGORITHM_ID = "splitmix64-counter"

# Fixed per-drop draw slots. The order (BD radius, BD angle, UE x, UE y,
# LoS draws, shadowing draws) is contractual: adding a sweep or switching
# path-loss mode must never perturb unrelated draws.
SLOT_BD_RADIUS = 0
SLOT_BD_ANGLE = 1
SLOT_UE_X = 2
SLOT_UE_Y = 3
SLOT_LOS_FORWARD = 4
SLOT_LOS_BACK = 5
SLOT_SHADOW_FWD_LOS = 6
SLOT_SHADOW_FWD_NLOS = 7
SLOT_SHADOW_BACK_LOS = 8
SLOT_SHADOW_BACK_NLOS = 9
SLOT_TILT_AZIMUTH = 10

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_U64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _finalize(z: np.ndarray) -> np.ndarray:
    # splitmix64 output function (Steele et al.), full-avalanche bijection
    with np.errstate(over="ignore"):
        z = (z + _GAMMA) & _U64
        z = ((z ^ (z >> _S30)) * _MUL1) & _U64
        z = ((z ^ (z >> _S27)) * _MUL2) & _U64
        return z ^ (z >> _S31)


def _words(seed: int, drop_index, slot: int) -> np.ndarray:
    idx = np.asarray(drop_index, dtype=np.uint64)
    key = _finalize(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    return _finalize(_finalize(key ^ idx) ^ np.uint64(slot))


def uniform(seed: int, drop_index, slot: int) -> np.ndarray:
    """Uniform draw on the open interval (0, 1) for each drop index."""
    w = _words(seed, drop_index, slot)
    return ((w >> _S11).astype(np.float64) + 0.5) * 2.0**-53


def standard_normal(seed: int, drop_index, slot: int) -> np.ndarray:
    """Standard normal draw per drop index, via the inverse normal CDF."""
    return ndtri(uniform(seed, drop_index, slot))
