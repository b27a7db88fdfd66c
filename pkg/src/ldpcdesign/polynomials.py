"""Polynomial arithmetic and degree-distribution types for LDPC ensemble design.

Everything downstream (density evolution, the certifier, both optimizers)
works with dense monomial-basis polynomials over [0, 1].  Degrees stay small
at the scales considered here, so 64-bit floats and repeated multiplication
are adequate; no sparse or arbitrary-precision representation is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

# Trailing coefficients below this magnitude are trimmed so degree is well
# defined in the canonical form.
TRIM_TOL = 1e-15

# Simplex (sum-to-one) tolerance for degree distributions.
SIMPLEX_TOL = 1e-12


class Polynomial:
    """Dense real polynomial; ``coeffs[k]`` is the coefficient of x^k."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[float]):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        last = arr.size
        while last > 1 and abs(arr[last - 1]) < TRIM_TOL:
            last -= 1
        arr = arr[:last]
        arr.setflags(write=False)
        self._coeffs = arr

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def degree(self) -> int:
        return self._coeffs.size - 1

    def __call__(self, x):
        """Evaluate by Horner accumulation; accepts scalars or arrays."""
        result = np.zeros_like(np.asarray(x, dtype=float))
        for c in self._coeffs[::-1]:
            result = result * x + c
        if np.ndim(x) == 0:
            return float(result)
        return result

    def __add__(self, other) -> "Polynomial":
        other = _as_poly(other)
        n = max(self._coeffs.size, other._coeffs.size)
        out = np.zeros(n)
        out[: self._coeffs.size] += self._coeffs
        out[: other._coeffs.size] += other._coeffs
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self._coeffs)

    def __sub__(self, other) -> "Polynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Polynomial":
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "Polynomial":
        if np.ndim(other) == 0 and not isinstance(other, Polynomial):
            return Polynomial(self._coeffs * float(other))
        other = _as_poly(other)
        return Polynomial(np.convolve(self._coeffs, other._coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0 or int(n) != n:
            raise ValueError("exponent must be a nonnegative integer")
        # Repeated multiplication: exactness of low-order terms matters more
        # than speed at these degrees.
        out = Polynomial([1.0])
        for _ in range(int(n)):
            out = out * self
        return out

    def derivative(self) -> "Polynomial":
        if self._coeffs.size == 1:
            return Polynomial([0.0])
        k = np.arange(1, self._coeffs.size)
        return Polynomial(self._coeffs[1:] * k)

    def integral01(self) -> float:
        """Integral over [0, 1]: sum of coeffs[k] / (k + 1)."""
        k = np.arange(self._coeffs.size)
        return float(np.sum(self._coeffs / (k + 1)))

    def quotient_by_x(self) -> "Polynomial":
        """Exact division by x; requires a (numerically) zero constant term."""
        if abs(self._coeffs[0]) > 1e-12:
            raise ValueError("polynomial has a nonzero constant term")
        if self._coeffs.size == 1:
            return Polynomial([0.0])
        return Polynomial(self._coeffs[1:])

    def with_zero_constant(self) -> "Polynomial":
        out = self._coeffs.copy()
        out[0] = 0.0
        return Polynomial(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self._coeffs.size == other._coeffs.size
            and bool(np.all(self._coeffs == other._coeffs))
        )

    def __hash__(self):
        return hash(self._coeffs.tobytes())

    def __repr__(self) -> str:
        return f"Polynomial({self._coeffs.tolist()})"


def _as_poly(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    if np.ndim(value) == 0:
        return Polynomial([float(value)])
    return Polynomial(value)


def poly_from_edge_coeffs(coeffs: Mapping[int, float]) -> Polynomial:
    """Edge-perspective polynomial sum_d coeffs[d] * x^(d-1) from a degree map."""
    if not coeffs:
        raise ValueError("empty coefficient map")
    max_deg = max(coeffs)
    dense = np.zeros(max_deg)
    for d, c in coeffs.items():
        if d < 2 or int(d) != d:
            raise ValueError(f"node degrees must be integers >= 2, got {d}")
        dense[d - 1] = c
    return Polynomial(dense)


@dataclass(frozen=True)
class ChannelSpec:
    """Binary erasure channel with erasure probability epsilon."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    @property
    def capacity(self) -> float:
        return 1.0 - self.epsilon


class DegreeDistribution:
    """Edge-perspective variable/check degree distribution pair.

    ``lambda_coeffs[i]`` is the fraction of edges attached to degree-i
    variable nodes, ``rho_coeffs[j]`` the same for check nodes.  Both sides
    must be probability vectors over degrees >= 2.
    """

    __slots__ = ("_lambda", "_rho")

    def __init__(self, lambda_coeffs: Mapping[int, float], rho_coeffs: Mapping[int, float]):
        self._lambda = dict(lambda_coeffs)
        self._rho = dict(rho_coeffs)
        for name, side in (("lambda", self._lambda), ("rho", self._rho)):
            if not side:
                raise ValueError(f"{name} coefficients are empty")
            for d, c in side.items():
                if int(d) != d or d < 2:
                    raise ValueError(f"{name} degree {d} is invalid (degrees start at 2)")
                if c < 0.0:
                    raise ValueError(f"{name} coefficient for degree {d} is negative")
            total = sum(side.values())
            if abs(total - 1.0) > SIMPLEX_TOL:
                raise ValueError(f"{name} coefficients sum to {total}, not 1")

    @property
    def lambda_coeffs(self) -> dict:
        return dict(self._lambda)

    @property
    def rho_coeffs(self) -> dict:
        return dict(self._rho)

    @property
    def max_variable_degree(self) -> int:
        return max(self._lambda)

    @property
    def max_check_degree(self) -> int:
        return max(self._rho)

    def lambda_polynomial(self) -> Polynomial:
        return poly_from_edge_coeffs(self._lambda)

    def rho_polynomial(self) -> Polynomial:
        return poly_from_edge_coeffs(self._rho)

    def __repr__(self) -> str:
        return f"DegreeDistribution(lambda={self._lambda!r}, rho={self._rho!r})"


@dataclass(frozen=True)
class RateReport:
    rate: float
    capacity: float
    gap: float


def compose_inner(rho: Polynomial, epsilon: float) -> Polynomial:
    """Expand f(x) = 1 - rho(1 - epsilon*x) in the monomial basis.

    Requires rho(1) = 1 (a valid edge distribution), which makes f(0) = 0;
    the constant coefficient is forced to exactly zero because downstream
    code divides by x.
    """
    if abs(rho(1.0) - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"rho(1) = {rho(1.0)} deviates from 1 beyond tolerance")
    inner = Polynomial([1.0, -float(epsilon)])
    acc = Polynomial([0.0])
    for c in rho.coeffs[::-1]:
        acc = acc * inner + c
    f = Polynomial([1.0]) - acc
    return f.with_zero_constant()


def constraint_basis(rho: Polynomial, epsilon: float, d_v: int) -> list[Polynomial]:
    """Powers g_i = f^(i-1) for i = 2..d_v, with f = compose_inner(rho, epsilon).

    The density-evolution inequality becomes linear in the lambda
    coefficients over this basis.
    """
    if d_v < 2:
        raise ValueError(f"d_v must be at least 2, got {d_v}")
    f = compose_inner(rho, epsilon)
    basis = []
    g = f
    for _ in range(2, d_v + 1):
        basis.append(g)
        g = g * f
    return basis


def design_rate(dist: DegreeDistribution) -> float:
    """R = 1 - (sum_j rho_j / j) / (sum_i lambda_i / i)."""
    rho_mean = sum(c / j for j, c in dist.rho_coeffs.items())
    lam_mean = sum(c / i for i, c in dist.lambda_coeffs.items())
    return 1.0 - rho_mean / lam_mean


def rate_report(dist: DegreeDistribution, ch: ChannelSpec) -> RateReport:
    rate = design_rate(dist)
    capacity = ch.capacity
    return RateReport(rate=rate, capacity=capacity, gap=1.0 - rate / capacity)
