"""Synthetic regression problems ``Y = <t0, X> + W`` with known truth.

Every design is isotropic (``E <t, X>**2 = ||t||**2``) and every noise law is
symmetric with variance ``sigma**2``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Candidate, Dataset, InvalidArgumentError, RngSpec


class Design(enum.Enum):
    GAUSSIAN_ISO = "gaussian"
    RADEMACHER = "rademacher"
    STUDENT_T_ISO = "student_t"


class Noise(enum.Enum):
    NONE = "none"
    GAUSSIAN = "gaussian"
    STUDENT_T = "student_t"
    SYMMETRIZED_PARETO = "pareto"


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """A learning problem.

    ``design_dof`` is the Student-t degrees of freedom of the design (only for
    ``STUDENT_T_ISO``). ``noise_param`` is the Student-t degrees of freedom or
    the Pareto tail index; both must exceed 2.
    """

    n_dim: int
    n_per_part: int
    t0: np.ndarray
    design: Design = Design.GAUSSIAN_ISO
    noise: Noise = Noise.GAUSSIAN
    sigma: float = 1.0
    design_dof: float | None = None
    noise_param: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "design", Design(self.design))
        object.__setattr__(self, "noise", Noise(self.noise))
        t0 = np.asarray(self.t0, dtype=np.float64)
        object.__setattr__(self, "t0", t0)
        if self.n_dim < 1 or self.n_per_part < 1:
            raise InvalidArgumentError("n_dim and n_per_part must be positive")
        if t0.shape != (self.n_dim,):
            raise InvalidArgumentError(f"t0 has shape {t0.shape}, expected ({self.n_dim},)")
        if self.design is Design.STUDENT_T_ISO and not (self.design_dof or 0) > 2:
            raise InvalidArgumentError("Student-t design needs dof > 2")
        if self.noise in (Noise.STUDENT_T, Noise.SYMMETRIZED_PARETO):
            if not (self.noise_param or 0) > 2:
                raise InvalidArgumentError(f"{self.noise.value} noise needs a parameter > 2")
        if self.noise is not Noise.NONE and not self.sigma > 0:
            raise InvalidArgumentError("sigma must be positive")

    @property
    def noise_variance(self) -> float:
        return 0.0 if self.noise is Noise.NONE else self.sigma**2


def sample_design(spec: ProblemSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    shape = (n, spec.n_dim)
    if spec.design is Design.GAUSSIAN_ISO:
        return rng.standard_normal(shape)
    if spec.design is Design.RADEMACHER:
        return rng.choice(np.array([-1.0, 1.0]), size=shape)
    dof = spec.design_dof
    return rng.standard_t(dof, size=shape) * math.sqrt((dof - 2) / dof)


def sample_noise(spec: ProblemSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    if spec.noise is Noise.NONE:
        return np.zeros(n)
    s = spec.sigma
    if spec.noise is Noise.GAUSSIAN:
        return s * rng.standard_normal(n)
    if spec.noise is Noise.STUDENT_T:
        dof = spec.noise_param
        return s * math.sqrt((dof - 2) / dof) * rng.standard_t(dof, size=n)
    # sign * P with P classical Pareto(a) on [1, inf): E P^2 = a / (a - 2)
    a = spec.noise_param
    p = 1.0 + rng.pareto(a, size=n)
    sign = rng.choice(np.array([-1.0, 1.0]), size=n)
    return s * sign * p / math.sqrt(a / (a - 2))


def generate(spec: ProblemSpec, rng: RngSpec | np.random.Generator) -> Dataset:
    """Draw ``3 * n_per_part`` i.i.d. rows; deterministic under ``RngSpec``."""
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    n = 3 * spec.n_per_part
    xs = sample_design(spec, n, gen)
    w = sample_noise(spec, n, gen)
    return Dataset(xs, xs @ spec.t0 + w)


def _diff(t_hat, spec):
    c = t_hat.coeffs if isinstance(t_hat, Candidate) else np.asarray(t_hat, dtype=np.float64)
    if c.shape != spec.t0.shape:
        raise InvalidArgumentError(f"estimate has shape {c.shape}, truth {spec.t0.shape}")
    return c - spec.t0


def true_l2_error(t_hat, spec: ProblemSpec) -> float:
    """``||t_hat - t0||_2``, the L2(mu) distance under an isotropic design."""
    return float(np.linalg.norm(_diff(t_hat, spec)))


def true_excess_risk(t_hat, spec: ProblemSpec) -> float:
    """Excess squared risk; equals the squared L2 error since the noise is
    independent of the design."""
    d = _diff(t_hat, spec)
    return float(d @ d)


def export_csv(dataset: Dataset, path) -> None:
    """Write ``x_0..x_{d-1},y`` rows at full precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x_{j}" for j in range(dataset.n_dim)] + ["y"])
        for x, y in zip(dataset.xs, dataset.ys):
            w.writerow([f"{v:.17g}" for v in x] + [f"{y:.17g}"])


def import_csv(path) -> Dataset:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Dataset(data[:, :-1], data[:, -1])
