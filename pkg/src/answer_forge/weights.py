"""Loss weights living on the probability simplex."""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError

SIMPLEX_TOL = 1e-9
N_WEIGHTS = 5


@dataclass(frozen=True)
class LossWeights:
    """Weights of the diversity, LLM, entity, relation and answer losses."""

    lambda1: float = 0.2
    lambda2: float = 0.2
    lambda3: float = 0.2
    lambda4: float = 0.2
    lambda5: float = 0.2

    def __post_init__(self):
        values = self.as_array()
        if not np.all(np.isfinite(values)):
            raise ContractError(f"non-finite loss weights {values}")
        if np.any(values < 0):
            raise ContractError(f"negative loss weight in {values}")
        if abs(values.sum() - 1.0) > SIMPLEX_TOL:
            raise ContractError(f"loss weights sum to {values.sum()!r}, not 1")

    @classmethod
    def from_array(cls, values):
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        if values.shape != (N_WEIGHTS,):
            raise ContractError(f"expected {N_WEIGHTS} weights, got {values.shape}")
        return cls(*(float(x) for x in values))

    @classmethod
    def uniform(cls):
        return cls()

    def as_array(self):
        return np.array([self.lambda1, self.lambda2, self.lambda3, self.lambda4, self.lambda5])

    def __getitem__(self, index):
        """1-based access, ``w[1]`` is lambda1."""
        if not 1 <= index <= N_WEIGHTS:
            raise IndexError(index)
        return getattr(self, f"lambda{index}")

    def as_list(self):
        return [float(x) for x in self.as_array()]
