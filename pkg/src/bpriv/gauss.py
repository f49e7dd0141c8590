"""Symplectic linear algebra and Gaussian-state entropies.

Conventions used throughout the package:

* Quadratures of an ``n``-mode system are ordered ``(q_1, ..., q_n, p_1, ..., p_n)``
  with ``q = (a + a^dag)/sqrt(2)`` and ``p = -i (a - a^dag)/sqrt(2)``.
* The vacuum covariance is ``0.5 * I`` (variance one half per quadrature), so a
  Wigner exponent ``exp(-u A u^T)`` corresponds to covariance ``0.5 * inv(A)``.
* The symplectic form in this ordering is ``[[0, I_n], [-I_n, 0]]``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm

from bpriv.errors import PhysicalityError

# ν - 1/2 values in [-PHYS_TOL, 0) are rounding noise and get clamped to 0
PHYS_TOL = 1e-9
G_CLAMP_TOL = 1e-12


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return ``Omega = [[0, I], [-I, 0]]`` for ``n_modes`` modes."""
    if n_modes < 1:
        raise ValueError(f"n_modes must be positive, got {n_modes}")
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


def squeeze_exponent(param: float, convention: str = "input") -> np.ndarray:
    """Two-mode squeezing exponent matrix ``A_param`` (4x4).

    The q-block is ``[[cosh 2x, -sinh 2x], [-sinh 2x, cosh 2x]]`` and the p-block
    flips the sign of the off-diagonal. ``A_x @ A_{-x} == I``, so the covariance of
    the corresponding two-mode squeezed vacuum is ``0.5 * A_{-x}``.

    Args:
        param: squeezing parameter (``r`` for the input, ``s`` for the environment).
        convention: ``"input"`` or ``"environment"``. Both produce the same matrix;
            the argument only documents which party the matrix describes.
    """
    if convention not in ("input", "environment"):
        raise ValueError(f"unknown convention {convention!r}")
    if not math.isfinite(param):
        raise ValueError(f"squeezing parameter must be finite, got {param}")
    c = math.cosh(2 * param)
    sh = math.sinh(2 * param)
    return np.array(
        [
            [c, -sh, 0.0, 0.0],
            [-sh, c, 0.0, 0.0],
            [0.0, 0.0, c, sh],
            [0.0, 0.0, sh, c],
        ]
    )


def cov_from_exponent(A: np.ndarray) -> np.ndarray:
    """Convert a Wigner exponent matrix into a covariance matrix, ``0.5 * inv(A)``."""
    A = np.asarray(A, dtype=float)
    if np.linalg.cond(A) > 1e14:
        raise np.linalg.LinAlgError("exponent matrix is numerically singular")
    return as_covariance(0.5 * np.linalg.inv(A))


def as_covariance(V: np.ndarray) -> np.ndarray:
    """Validate shape and symmetrize a candidate covariance matrix."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
        raise ValueError(f"covariance must be square with even size, got {V.shape}")
    return 0.5 * (V + V.T)


def symplectic_eigenvalues(V: np.ndarray, omega: np.ndarray | None = None) -> np.ndarray:
    """Symplectic eigenvalues of a positive-definite covariance matrix.

    These are the moduli of the eigenvalues of ``Omega @ V``, which come in
    ``+-i nu`` pairs. With ``V = L L^T`` the matrix ``L^T Omega L`` is similar to
    ``Omega V`` and antisymmetric, so ``i L^T Omega L`` is Hermitian and its
    eigenvalues are the ``+-nu`` pairs computed stably by ``eigvalsh``.

    Args:
        V: 2n x 2n covariance.
        omega: symplectic form; defaults to :func:`symplectic_form` for n modes.

    Returns:
        Array of the n symplectic eigenvalues, sorted descending.
    """
    V = as_covariance(V)
    n = V.shape[0] // 2
    if omega is None:
        omega = symplectic_form(n)
    ev = np.linalg.eigvalsh(V)
    if ev[0] <= 0:
        idx = int(np.argmin(ev))
        raise PhysicalityError(
            f"covariance is not positive definite: eigenvalue #{idx} = {ev[idx]:.3e}"
        )
    L = np.linalg.cholesky(V)
    herm = 1j * (L.T @ omega @ L)
    w = np.linalg.eigvalsh(herm)
    # eigvalsh sorts ascending: the upper half holds the positive members of each pair
    return np.sort(w[n:])[::-1].copy()


def check_physical(spectrum: np.ndarray, tol: float = PHYS_TOL) -> None:
    """Raise if any symplectic eigenvalue lies below the vacuum value 1/2."""
    spectrum = np.asarray(spectrum)
    bad = spectrum < 0.5 - tol
    if np.any(bad):
        raise PhysicalityError(
            f"symplectic eigenvalue {spectrum[bad].min():.12g} violates the uncertainty bound 1/2"
        )


def g_entropy(x):
    """Entropy in bits of a thermal mode with mean occupation ``x``.

    ``g(x) = (x + 1) log2(x + 1) - x log2(x)``, evaluated as
    ``[log1p(x) + x log1p(1/x)] / ln 2`` to avoid cancellation at small ``x``.
    Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)):
        raise ValueError("g_entropy requires finite arguments")
    if np.any(arr < -G_CLAMP_TOL):
        raise PhysicalityError(f"g_entropy argument {arr.min():.3e} is negative")
    arr = np.clip(arr, 0.0, None)
    out = np.zeros_like(arr)
    pos = arr > 0
    xp = arr[pos]
    out[pos] = (np.log1p(xp) + xp * np.log1p(1.0 / xp)) / math.log(2)
    if np.ndim(x) == 0:
        return float(out)
    return out


def entropy_from_spectrum(spectrum: np.ndarray) -> float:
    """Sum of ``g(nu - 1/2)`` with rounding noise below 1/2 clamped."""
    spectrum = np.asarray(spectrum, dtype=float)
    check_physical(spectrum)
    return float(np.sum(g_entropy(np.clip(spectrum - 0.5, 0.0, None))))


def gaussian_entropy(V: np.ndarray) -> float:
    """Von Neumann entropy (bits) of a Gaussian state with covariance ``V``."""
    return entropy_from_spectrum(symplectic_eigenvalues(V))


def multimode_squeeze_generator(n: int) -> np.ndarray:
    """Heisenberg generator of ``exp[1/2 sum_{k != k'} (b_k^dag b_k'^dag - b_k b_k')]``.

    With ``J`` the all-ones matrix minus the identity, ``d q/dt = J q`` and
    ``d p/dt = -J p``, so the generator is ``diag(J, -J)``.
    """
    if n < 2:
        raise ValueError(f"multimode squeezing needs n >= 2, got {n}")
    J = np.ones((n, n)) - np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[J, zero], [zero, -J]])


def multimode_squeeze_symplectic(s: float, n: int) -> np.ndarray:
    """Symplectic matrix of the symmetric n-mode squeezer with strength ``s``.

    For ``n = 2`` the squeezed vacuum ``0.5 * M @ M.T`` equals ``0.5 * A_{-s}``.
    """
    if not math.isfinite(s):
        raise ValueError(f"squeezing parameter must be finite, got {s}")
    return expm(s * multimode_squeeze_generator(n))


def squeezed_vacuum_cov(param: float, n: int) -> np.ndarray:
    """Covariance of the symmetric n-mode squeezed vacuum."""
    M = multimode_squeeze_symplectic(param, n)
    return as_covariance(0.5 * M @ M.T)
