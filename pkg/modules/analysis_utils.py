# modules/analysis_utils.py
"""
Utilitaires numériques partagés : noyaux et images par SVD, sous-espaces orthonormés.
Les décisions de rang utilisent tol = max(atol, rtol * sigma_max).
"""
import logging
from dataclasses import dataclass
from math import comb
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from modules.errors import DimensionMismatchError, ValidationError
from modules.settings import settings

logger = logging.getLogger("killing-forms.analysis")


def _rank_tol(s: np.ndarray, rtol: Optional[float], atol: Optional[float]) -> float:
    rtol = settings["rank_rtol"] if rtol is None else rtol
    atol = settings["rank_rtol"] if atol is None else atol
    smax = float(s[0]) if s.size else 0.0
    return max(atol, rtol * smax)


def null_space(a: np.ndarray, rtol: Optional[float] = None, atol: Optional[float] = None) -> np.ndarray:
    """
    Base orthonormée (colonnes) du noyau de a.
    Une matrice sans ligne a pour noyau l'espace entier.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    k = a.shape[1]
    if k == 0:
        return np.zeros((0, 0))
    if a.shape[0] == 0:
        return np.eye(k)
    _, s, vh = scipy.linalg.svd(a, full_matrices=True)
    tol = _rank_tol(s, rtol, atol)
    rank = int((s > tol).sum())
    return vh[rank:].T.copy()


def orth(a: np.ndarray, rtol: Optional[float] = None, atol: Optional[float] = None) -> np.ndarray:
    """Base orthonormée (colonnes) de l'image de a."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = scipy.linalg.svd(a, full_matrices=False)
    tol = _rank_tol(s, rtol, atol)
    rank = int((s > tol).sum())
    return u[:, :rank].copy()


def numerical_rank(a: np.ndarray, rtol: Optional[float] = None, atol: Optional[float] = None) -> int:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0
    s = scipy.linalg.svdvals(a)
    return int((s > _rank_tol(s, rtol, atol)).sum())


def as_columns(a, rows: int) -> np.ndarray:
    """Met un tableau sous forme (rows, k) ; un vecteur devient une colonne."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(rows, -1) if rows else np.zeros((0, 0))
    if a.ndim != 2 or a.shape[0] != rows:
        raise DimensionMismatchError(f"Attendu {rows} lignes, reçu la forme {a.shape}")
    return a


def max_column_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(a, axis=0)))


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    Sous-espace de l'espace des p-formes sur R^n, tenu par une base orthonormée.
    `basis` a pour colonnes les coefficients des vecteurs de base (ordre lexicographique des indices).
    """
    n: int
    p: int
    basis: np.ndarray

    def __post_init__(self):
        ambient = comb(self.n, self.p) if 0 <= self.p <= self.n else 0
        basis = as_columns(self.basis, ambient).copy()
        if basis.shape[1] > ambient:
            raise ValidationError(f"Sous-espace de dimension {basis.shape[1]} > {ambient}")
        gram = basis.T @ basis
        if basis.shape[1] and not np.allclose(gram, np.eye(basis.shape[1]), atol=1e-10):
            raise ValidationError("Base non orthonormée")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    # --- constructeurs ---
    @classmethod
    def full(cls, n: int, p: int) -> "Subspace":
        return cls(n, p, np.eye(comb(n, p)))

    @classmethod
    def zero(cls, n: int, p: int) -> "Subspace":
        return cls(n, p, np.zeros((comb(n, p), 0)))

    @classmethod
    def span(cls, n: int, p: int, columns: np.ndarray,
             rtol: Optional[float] = None, atol: Optional[float] = None) -> "Subspace":
        """Sous-espace engendré par les colonnes données (orthonormalisées)."""
        columns = as_columns(columns, comb(n, p))
        return cls(n, p, orth(columns, rtol=rtol, atol=atol))

    # --- propriétés ---
    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    @property
    def ambient_dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def complement_projector(self) -> np.ndarray:
        return np.eye(self.ambient_dim) - self.projector()

    def vectors(self) -> List:
        from modules.exterior_core import Multivector
        return [Multivector.from_array(self.n, self.p, self.basis[:, k]) for k in range(self.dim)]

    # --- comparaisons ---
    def _check_compatible(self, other: "Subspace"):
        if (self.n, self.p) != (other.n, other.p):
            raise DimensionMismatchError(
                f"Sous-espaces incompatibles: (n={self.n}, p={self.p}) vs (n={other.n}, p={other.p})")

    def outside_residual(self, columns: np.ndarray) -> float:
        """Plus grande norme de la composante orthogonale à self parmi les colonnes données."""
        columns = as_columns(columns, self.ambient_dim)
        if columns.shape[1] == 0:
            return 0.0
        return max_column_norm(columns - self.basis @ (self.basis.T @ columns))

    def contains(self, other: "Subspace", tol: Optional[float] = None) -> bool:
        self._check_compatible(other)
        tol = settings["identity_tol"] if tol is None else tol
        return self.outside_residual(other.basis) < tol

    def distance(self, other: "Subspace") -> float:
        """Distance de Frobenius entre projecteurs orthogonaux."""
        self._check_compatible(other)
        return float(np.linalg.norm(self.projector() - other.projector()))

    def equals(self, other: "Subspace", tol: Optional[float] = None) -> bool:
        tol = settings["identity_tol"] if tol is None else tol
        return self.dim == other.dim and self.distance(other) < tol

    def invariance_residual(self, operators: Sequence[np.ndarray]) -> float:
        """max ||(1 - P) A w|| sur les opérateurs A et les vecteurs de base w."""
        if self.dim == 0 or self.is_full:
            return 0.0
        return max((self.outside_residual(op @ self.basis) for op in operators), default=0.0)

    def __repr__(self) -> str:
        return f"Subspace(n={self.n}, p={self.p}, dim={self.dim}/{self.ambient_dim})"
