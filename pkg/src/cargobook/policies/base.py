"""Policy interface and the stationary random baseline."""

from __future__ import annotations

import numpy as np

from ..simulator import BookingState

POLICY_FORMAT = "cargobook-policy/1"


class Policy:
    """Accept/reject controller. ``decide`` receives the state and the 1-based location."""

    kind = "abstract"

    def __init__(self):
        self.provenance: dict = {}
        self.offline_seconds = 0.0

    def decide(self, state: BookingState, j: int) -> bool:
        raise NotImplementedError

    def reset(self, seed: int | None = None) -> None:
        """Reseed any internal randomness before an episode."""

    def describe(self) -> dict:
        return {"kind": self.kind}


def rand_p_decide(p: float, rng: np.random.Generator) -> bool:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"acceptance probability {p} outside [0, 1]")
    return bool(rng.random() < p)


class RandPolicy(Policy):
    kind = "rand_p"

    def __init__(self, p: float, seed: int = 0):
        super().__init__()
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"acceptance probability {p} outside [0, 1]")
        self.p = p
        self.rng = np.random.default_rng(seed)

    def reset(self, seed=None):
        self.rng = np.random.default_rng(seed)

    def decide(self, state, j):
        return rand_p_decide(self.p, self.rng)

    def describe(self):
        return {"kind": self.kind, "p": self.p}


class ConstantPolicy(Policy):
    """Always accept or always reject."""

    kind = "constant"

    def __init__(self, accept: bool):
        super().__init__()
        self.accept = bool(accept)

    def decide(self, state, j):
        return self.accept

    def describe(self):
        return {"kind": self.kind, "accept": self.accept}
