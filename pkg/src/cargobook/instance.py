"""Booking instances: parameters, the four benchmark families, and file I/O."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT_TAG = "cargobook-instance/1"

FAMILIES = (4, 10, 15, 50)


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class InstanceSpec:
    """Full definition of a booking-control instance.

    Locations are indexed 0..n-1 internally; period indices run 1..T.
    ``Q`` is derived from the demand parameters when left as ``None``.
    """

    n: int
    T: int
    revenues: tuple[float, ...]
    lambda0: float
    lambda_init: tuple[float, ...]
    lambda_drift: tuple[float, ...]
    coords: tuple[tuple[float, float], ...]
    depot: tuple[float, float]
    K0: int
    C: float
    LF: float
    Q: int | None = None
    seed: int | None = None
    family: int | None = None
    _dist: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        obj_set = object.__setattr__
        obj_set(self, "revenues", tuple(float(x) for x in self.revenues))
        obj_set(self, "lambda_init", tuple(float(x) for x in self.lambda_init))
        obj_set(self, "lambda_drift", tuple(float(x) for x in self.lambda_drift))
        obj_set(self, "coords", tuple((float(x), float(y)) for x, y in self.coords))
        obj_set(self, "depot", (float(self.depot[0]), float(self.depot[1])))
        self._validate_shape()
        if self.Q is None:
            obj_set(self, "Q", derive_capacity(self))
        elif self.Q < 1:
            raise InstanceError(f"capacity must be >= 1, got {self.Q}")
        pts = np.array((self.depot,) + self.coords, dtype=np.float64)
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        dist.setflags(write=False)
        obj_set(self, "_dist", dist)

    def _validate_shape(self):
        n = self.n
        if n < 1 or self.T < 1 or self.K0 < 1:
            raise InstanceError("n, T and K0 must all be >= 1")
        if not (self.C > 0 and self.LF > 0):
            raise InstanceError("C and LF must be positive")
        for name in ("revenues", "lambda_init", "lambda_drift", "coords"):
            if len(getattr(self, name)) != n:
                raise InstanceError(f"{name} must have length n={n}")
        if not 0.0 < self.lambda0 < 1.0:
            raise InstanceError("lambda0 must lie in (0, 1)")
        if min(self.revenues) <= 0 or min(self.lambda_init) <= 0:
            raise InstanceError("revenues and initial probabilities must be positive")
        lam = self.raw_lambdas()
        if (lam < 0).any():
            t, j = np.argwhere(lam < 0)[0]
            raise InstanceError(f"negative probability for location {j} in period {t}")

    def raw_lambdas(self) -> np.ndarray:
        """T x (n+1) matrix of unnormalized probabilities; column 0 is no-request."""
        steps = np.arange(self.T, dtype=np.float64)[:, None]
        lam = np.asarray(self.lambda_init) + steps * np.asarray(self.lambda_drift)
        col0 = np.full((self.T, 1), self.lambda0)
        return np.hstack([col0, lam])

    @property
    def distances(self) -> np.ndarray:
        """Euclidean distance matrix; node 0 is the depot, node j+1 is location j."""
        return self._dist

    def depot_distance(self, j: int) -> float:
        return float(self._dist[0, j + 1])

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_TAG,
            "family": self.family,
            "seed": self.seed,
            "n": self.n,
            "T": self.T,
            "revenues": list(self.revenues),
            "lambda0": self.lambda0,
            "lambda_init": list(self.lambda_init),
            "lambda_drift": list(self.lambda_drift),
            "K0": self.K0,
            "C": self.C,
            "LF": self.LF,
            "Q": self.Q,
            "depot": list(self.depot),
            "coords": [list(c) for c in self.coords],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InstanceSpec":
        if data.get("format") != FORMAT_TAG:
            raise InstanceError(f"unsupported instance format {data.get('format')!r}")
        spec = cls(
            n=data["n"],
            T=data["T"],
            revenues=data["revenues"],
            lambda0=data["lambda0"],
            lambda_init=data["lambda_init"],
            lambda_drift=data["lambda_drift"],
            coords=data["coords"],
            depot=data["depot"],
            K0=data["K0"],
            C=data["C"],
            LF=data["LF"],
            Q=data["Q"],
            seed=data.get("seed"),
            family=data.get("family"),
        )
        return spec

    def digest(self) -> str:
        """Short content hash used to tie derived files back to this instance."""
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


@dataclass(frozen=True)
class ArrivalTable:
    """Per-period event distribution; ``probs[t-1, 0]`` is P(no request)."""

    probs: np.ndarray
    cumulative: np.ndarray

    @property
    def T(self) -> int:
        return self.probs.shape[0]

    def row(self, t: int) -> np.ndarray:
        if not 1 <= t <= self.T:
            raise IndexError(f"period {t} outside 1..{self.T}")
        return self.probs[t - 1]


def derive_capacity(spec: InstanceSpec) -> int:
    """Vehicle capacity from the load factor: total raw demand mass / (K0 * LF)."""
    total = float(spec.raw_lambdas().sum())
    # guard against 21.999999... style float noise before flooring
    q = math.floor(total / (spec.K0 * spec.LF) + 1e-9)
    if q < 1:
        raise InstanceError(f"derived capacity {q} < 1")
    return q


def arrival_table(spec: InstanceSpec) -> ArrivalTable:
    raw = spec.raw_lambdas()
    if (raw < 0).any():
        raise InstanceError("negative arrival probability")
    probs = raw / raw.sum(axis=1, keepdims=True)
    cum = np.cumsum(probs, axis=1)
    cum[:, -1] = 1.0
    probs.setflags(write=False)
    cum.setflags(write=False)
    return ArrivalTable(probs=probs, cumulative=cum)


def _groups(*pairs):
    out = []
    for count, value in pairs:
        out.extend([value] * count)
    return tuple(out)


# scalar parameters of the four instance families; coordinates are sampled
_FAMILY_PARAMS = {
    4: dict(
        T=20,
        revenues=(4, 8, 12, 16),
        lambda_init=(0.45, 0.40, 0.10, 0.05),
        lambda_drift=(-0.01, -0.01, 0.01, 0.01),
        K0=2, C=100.0, LF=1.1, side=10.0,
    ),
    10: dict(
        T=30,
        revenues=_groups((4, 10), (4, 12), (2, 20)),
        lambda_init=_groups((4, 0.125), (4, 0.075), (2, 0.05)),
        lambda_drift=_groups((4, -0.001), (4, 0.0), (2, 0.002)),
        K0=4, C=100.0, LF=1.2, side=10.0,
    ),
    15: dict(
        T=50,
        revenues=_groups((5, 10), (5, 12), (5, 20)),
        lambda_init=_groups((5, 0.10), (5, 0.06), (5, 0.02)),
        lambda_drift=_groups((5, -0.001), (5, 0.0), (5, 0.001)),
        K0=4, C=250.0, LF=1.2, side=10.0,
    ),
    50: dict(
        T=100,
        revenues=_groups((30, 15), (10, 22), (10, 30)),
        lambda_init=_groups((30, 0.0166), (10, 0.03), (10, 0.01)),
        lambda_drift=_groups((30, -0.0001), (10, 0.0), (10, 0.0003)),
        K0=4, C=600.0, LF=1.3, side=50.0,
    ),
}


def build_family(family: int, seed: int) -> InstanceSpec:
    """Instantiate one of the benchmark families with seeded coordinates."""
    if family not in _FAMILY_PARAMS:
        raise InstanceError(f"unknown family {family!r}; expected one of {FAMILIES}")
    params = dict(_FAMILY_PARAMS[family])
    side = params.pop("side")
    n = len(params["revenues"])
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0.0, side, size=(n, 2))
    depot = rng.uniform(0.0, side, size=2)
    return InstanceSpec(
        n=n,
        lambda0=0.10,
        coords=[tuple(c) for c in coords],
        depot=tuple(depot),
        seed=seed,
        family=family,
        **params,
    )


def save_instance(spec: InstanceSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2) + "\n")


def load_instance(path) -> InstanceSpec:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"instance file not found: {path}")
    return InstanceSpec.from_dict(json.loads(path.read_text()))
