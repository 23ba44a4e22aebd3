"""Symmetric positive definite matrices with the affine-invariant metric."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError, ParameterError, StepTooLongError
from ..linalg import POSITIVITY_FLOOR, SpectralDecomposition, sym_eig, symmetrize
from .base import POINT_TOL, Manifold, Point, Tangent

__all__ = ["Spd"]

# exp of eigenvalues beyond this magnitude overflows double precision
# headroom; treat such steps as divergence rather than producing inf.
_EXP_EIG_GUARD = 300.0


class Spd(Manifold):
    """SPD(n) under the affine-invariant metric ``<u, v>_x = tr(x^-1 u x^-1 v)``.

    A Hadamard manifold: sectional curvature lies in [-1/2, 0], geodesics
    are globally length-minimizing, and exp/log are inverse bijections.
    Tangent vectors are symmetric matrices. The closed forms used here
    conjugate by ``x^{1/2}``:

    - ``Exp_x(v) = x^{1/2} expm(x^{-1/2} v x^{-1/2}) x^{1/2}``
    - ``Log_x(y) = x^{1/2} logm(x^{-1/2} y x^{-1/2}) x^{1/2}``
    - ``d(x, y) = || logm(x^{-1/2} y x^{-1/2}) ||_F``
    - transport of ``v`` from ``x`` to ``y`` is ``e v e^T`` with
      ``e = x^{1/2} (x^{-1/2} y x^{-1/2})^{1/2} x^{-1/2}``.

    Each point caches its eigendecomposition (and the square roots
    derived from it) the first time an operation needs it.

    Parameters
    ----------
    n : int
        Matrix dimension, at least 1.
    diameter_bound : float
        Declared working-domain diameter, positive and finite.
    """

    name = "spd"

    def __init__(self, n: int, diameter_bound: float = 10.0):
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ParameterError(f"n must be a positive integer, got {n!r}")
        if not (0.0 < diameter_bound < np.inf):
            raise ParameterError(f"diameter_bound must be positive and finite, got {diameter_bound!r}")
        self.n = int(n)
        self.ambient_shape = (self.n, self.n)
        self.dim = int(n) * (int(n) + 1) // 2
        self.kappa_min = -0.5
        self.kappa_max = 0.0
        self.diameter_bound = float(diameter_bound)
        self.exp_guard = np.inf

    # -- cached spectral helpers ----------------------------------------

    def _dec(self, x: Point) -> SpectralDecomposition:
        dec = x.cache.get("eig")
        if dec is None:
            dec = sym_eig(x.value)
            lam = dec.eigenvalues
            floor = POSITIVITY_FLOOR * max(1.0, float(lam[0]))
            if lam[-1] <= floor:
                raise DomainError(
                    f"matrix is not positive definite: smallest eigenvalue "
                    f"{lam[-1]:.6g} is below the floor {floor:.6g}"
                )
            x.cache["eig"] = dec
        return dec

    def _sqrt(self, x: Point) -> np.ndarray:
        s = x.cache.get("sqrt")
        if s is None:
            dec = self._dec(x)
            s = (dec.q * np.sqrt(dec.eigenvalues)) @ dec.q.T
            x.cache["sqrt"] = s
        return s

    def _isqrt(self, x: Point) -> np.ndarray:
        s = x.cache.get("isqrt")
        if s is None:
            dec = self._dec(x)
            s = (dec.q / np.sqrt(dec.eigenvalues)) @ dec.q.T
            x.cache["isqrt"] = s
        return s

    def _inv(self, x: Point) -> np.ndarray:
        s = x.cache.get("inv")
        if s is None:
            dec = self._dec(x)
            s = (dec.q / dec.eigenvalues) @ dec.q.T
            x.cache["inv"] = s
        return s

    # -- manifold interface ---------------------------------------------

    def point(self, value) -> Point:
        arr = np.asarray(value, dtype=float)
        if arr.shape != (self.n, self.n):
            raise ParameterError(f"expected shape ({self.n}, {self.n}), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("matrix contains non-finite entries")
        skew = np.linalg.norm(arr - arr.T)
        if skew > POINT_TOL * max(1.0, np.linalg.norm(arr)):
            raise ParameterError(f"matrix is not symmetric: ||a - a.T|| = {skew:.3g}")
        p = Point(self, symmetrize(arr))
        self._dec(p)  # validates positive definiteness and primes the cache
        return p

    def _validate_point_array(self, value: np.ndarray) -> np.ndarray:
        return self.point(value).value

    def _project_array(self, x: Point, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=float).reshape(self.n, self.n)
        return (a + a.T) / 2.0

    def _inner_array(self, x: Point, u: np.ndarray, v: np.ndarray) -> float:
        inv = self._inv(x)
        return float(np.einsum("ij,ji->", inv @ u, inv @ v))

    def _conj_dec(self, x: Point, a: np.ndarray) -> SpectralDecomposition:
        """Eigendecomposition of ``x^{-1/2} a x^{-1/2}``."""
        isq = self._isqrt(x)
        return sym_eig(isq @ a @ isq)

    def exp(self, x: Point, v: Tangent) -> Point:
        self._check_tangent_at(v, x)
        dec = self._conj_dec(x, v.value)
        top = float(np.max(np.abs(dec.eigenvalues))) if self.n else 0.0
        if top > _EXP_EIG_GUARD:
            raise StepTooLongError(
                f"tangent is too long for the SPD exponential: leading conjugated "
                f"eigenvalue {top:.6g} exceeds the overflow guard {_EXP_EIG_GUARD:.0f}"
            )
        sq = self._sqrt(x)
        e = (dec.q * np.exp(dec.eigenvalues)) @ dec.q.T
        return self._point_unchecked(symmetrize(sq @ e @ sq))

    def _log_dec(self, x: Point, y: Point) -> SpectralDecomposition:
        dec = self._conj_dec(x, y.value)
        lam = dec.eigenvalues
        floor = POSITIVITY_FLOOR * max(1.0, float(lam[0]))
        if lam[-1] <= floor:
            raise DomainError(
                f"logarithm target is not positive definite relative to the base: "
                f"smallest conjugated eigenvalue {lam[-1]:.6g} is below {floor:.6g}"
            )
        return dec

    def log(self, x: Point, y: Point) -> Tangent:
        self._check_point(x)
        self._check_point(y)
        dec = self._log_dec(x, y)
        sq = self._sqrt(x)
        m = (dec.q * np.log(dec.eigenvalues)) @ dec.q.T
        return Tangent(x, symmetrize(sq @ m @ sq))

    def transport(self, v: Tangent, y: Point) -> Tangent:
        self._check_point(y)
        x = v.base
        dec = self._log_dec(x, y)
        half = (dec.q * np.sqrt(dec.eigenvalues)) @ dec.q.T
        e = self._sqrt(x) @ half @ self._isqrt(x)
        return Tangent(y, symmetrize(e @ v.value @ e.T))

    def distance(self, x: Point, y: Point) -> float:
        self._check_point(x)
        self._check_point(y)
        dec = self._log_dec(x, y)
        return float(np.linalg.norm(np.log(dec.eigenvalues)))

    def tangent_basis(self, x: Point):
        """Closed-form orthonormal basis ``x^{1/2} S x^{1/2}``.

        ``S`` runs over the Frobenius-orthonormal symmetric basis (unit
        diagonal matrices and normalized symmetric pairs); conjugation by
        ``x^{1/2}`` turns it into an orthonormal family for the
        affine-invariant inner product at ``x``.
        """
        self._check_point(x)
        sq = self._sqrt(x)
        cols = [sq[:, i] for i in range(self.n)]
        basis = []
        inv_rt2 = 1.0 / np.sqrt(2.0)
        for i in range(self.n):
            for j in range(i, self.n):
                if i == j:
                    basis.append(Tangent(x, np.outer(cols[i], cols[i])))
                else:
                    outer = np.outer(cols[i], cols[j])
                    basis.append(Tangent(x, (outer + outer.T) * inv_rt2))
        return basis

    def _random_point_array(self, rng: np.random.Generator) -> np.ndarray:
        radius = float(rng.uniform(0.0, min(self.diameter_bound / 2.0, 3.0)))
        s = symmetrize(rng.standard_normal((self.n, self.n)))
        nrm = float(np.linalg.norm(s))
        if nrm < 1e-12:
            s = np.eye(self.n)
            nrm = float(np.linalg.norm(s))
        s = s * (radius / nrm)
        dec = sym_eig(s)
        return symmetrize((dec.q * np.exp(dec.eigenvalues)) @ dec.q.T)

    def identity(self) -> Point:
        """The identity matrix as a point."""
        return self.point(np.eye(self.n))
