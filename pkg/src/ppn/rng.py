"""Seedable, splittable random variate streams and special functions.

Every stochastic task in the package draws from a ``VariateStream`` derived
from a root :class:`Seed` and a string label.  Streams with distinct labels
are statistically independent (counter-based Philox keys derived by hashing),
so replicates and chains can run in any order, or concurrently, and still
give bit-identical results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DegenerateSampleError, DomainError, ParameterError

_PROB_TOL = 1e-9


@dataclass(frozen=True)
class Seed:
    """Root seed; sub-streams are addressed by label."""

    root: int

    def __post_init__(self):
        if not 0 <= int(self.root) < 2**64:
            raise ParameterError("root seed must be a 64-bit unsigned integer")

    def stream(self, *labels) -> "VariateStream":
        return VariateStream(self, "/".join(str(x) for x in labels))


class VariateStream:
    """A deterministic variate stream keyed by (seed root, label).

    Single-owner: never share one stream between concurrent tasks; derive a
    fresh labeled stream for each task instead.
    """

    def __init__(self, seed: Seed, label: str):
        digest = hashlib.sha256(f"{seed.root}\x1f{label}".encode()).digest()
        key = np.frombuffer(digest, dtype=np.uint64)[:2]
        self.seed = seed
        self.label = label
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def substream(self, *labels) -> "VariateStream":
        return VariateStream(self.seed, self.label + "/" + "/".join(str(x) for x in labels))


def _check_prob_vector(p, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ParameterError(f"{name} must be a nonempty vector")
    if np.any(p < 0):
        raise ParameterError(f"{name} has negative entries")
    if abs(p.sum() - 1.0) > _PROB_TOL:
        raise ParameterError(f"{name} must sum to 1 (got {p.sum()!r})")
    return p


def categorical(stream: VariateStream, p, size: int) -> np.ndarray:
    """Draw ``size`` labels from Categorical(p) via inverse CDF."""
    p = _check_prob_vector(p, "p")
    u = stream.generator.random(size)
    return np.minimum((u[:, None] > np.cumsum(p)[None, :-1]).sum(axis=1), len(p) - 1)


def sample(dist, count: int, stream: VariateStream) -> np.ndarray:
    """Draw ``count`` i.i.d. variates from a named distribution.

    ``dist`` is a tuple naming the distribution and its parameters:
      ("normal", mu, var), ("mvnormal_diag", mean_vec, var_vec),
      ("inverse_gamma", a, b), ("dirichlet", alpha_vec),
      ("categorical", p_vec), ("multinomial", p_vec, 1).
    """
    if count < 0:
        raise ParameterError("count must be nonnegative")
    g = stream.generator
    name, *params = dist
    if name == "normal":
        mu, var = params
        if var <= 0:
            raise ParameterError("normal variance must be positive")
        return mu + np.sqrt(var) * g.standard_normal(count)
    if name == "mvnormal_diag":
        mean, var = (np.asarray(p, dtype=float) for p in params)
        if np.any(var <= 0):
            raise ParameterError("diagonal covariance entries must be positive")
        return mean + np.sqrt(var) * g.standard_normal((count, len(mean)))
    if name == "inverse_gamma":
        a, b = params
        if a <= 0 or b <= 0:
            raise ParameterError("inverse-gamma shape and scale must be positive")
        # reciprocal of a Gamma(a, 1/b) draw
        return 1.0 / g.gamma(a, 1.0 / b, size=count)
    if name == "dirichlet":
        alpha = np.asarray(params[0], dtype=float)
        if np.any(alpha <= 0):
            raise ParameterError("dirichlet concentrations must be positive")
        gam = g.gamma(alpha, 1.0, size=(count, len(alpha)))
        return gam / gam.sum(axis=1, keepdims=True)
    if name == "categorical":
        return categorical(stream, params[0], count)
    if name == "multinomial":
        p, trials = params
        if trials != 1:
            raise ParameterError("only single-trial multinomials are supported")
        p = _check_prob_vector(p, "p")
        idx = categorical(stream, p, count)
        out = np.zeros((count, len(p)))
        out[np.arange(count), idx] = 1.0
        return out
    raise ParameterError(f"unknown distribution {name!r}")


def chi_square_cdf(x: float, k: float) -> float:
    """Chi-square CDF: regularized lower incomplete gamma P(k/2, x/2)."""
    if x < 0:
        raise DomainError("chi-square CDF argument must be nonnegative")
    if k < 1:
        raise DomainError("degrees of freedom must be >= 1")
    return float(special.gammainc(k / 2.0, np.asarray(x, dtype=float) / 2.0))


def ks_distance(samples, cdf) -> float:
    """Kolmogorov-Smirnov distance between an empirical sample and a CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    if s.size == 0:
        raise DegenerateSampleError("ks_distance needs a nonempty sample")
    n = s.size
    c = np.asarray([cdf(v) for v in s], dtype=float)
    upper = np.max(np.arange(1, n + 1) / n - c)
    lower = np.max(c - np.arange(0, n) / n)
    return float(max(upper, lower))
