# modules/exterior_core.py
"""
Algèbre extérieure sur R^n (base orthonormée e_1..e_n).

Les p-formes de base e_{i1} ^ ... ^ e_{ip} (i1 < ... < ip) sont rangées dans l'ordre
lexicographique des tuples d'indices ; un Multivector stocke un tableau dense de
coefficients par degré. Indices internes 0-based, affichage 1-based (e1, e2, ...).
Les valeurs sont immuables.
"""
import itertools
import logging
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from modules.analysis_utils import Subspace, orth
from modules.errors import DegreeError, DimensionMismatchError, ValidationError
from modules.settings import settings

logger = logging.getLogger("killing-forms.exterior")

Blade = Tuple[int, ...]


def dim_forms(n: int, p: int) -> int:
    """Dimension de l'espace des p-formes (0 hors de 0..n)."""
    return comb(n, p) if 0 <= p <= n else 0


def check_dimension(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValidationError(f"Dimension invalide: {n!r} (attendu un entier >= 1)")
    if n > settings["max_dimension"]:
        raise ValidationError(f"Dimension {n} > max_dimension={settings['max_dimension']}")
    return int(n)


def check_degree(n: int, p: int, low: int = 0, high: Optional[int] = None) -> int:
    high = n if high is None else high
    if not isinstance(p, (int, np.integer)) or not low <= p <= high:
        raise DegreeError(f"Degré p={p!r} hors de [{low}, {high}] (n={n})")
    return int(p)


@lru_cache(maxsize=None)
def blades(n: int, p: int) -> Tuple[Blade, ...]:
    if not 0 <= p <= n:
        return ()
    return tuple(itertools.combinations(range(n), p))


@lru_cache(maxsize=None)
def blade_index(n: int, p: int) -> Dict[Blade, int]:
    return {b: k for k, b in enumerate(blades(n, p))}


def sort_sign(indices: Sequence[int]) -> Tuple[int, Blade]:
    """
    Signe de la permutation qui trie les indices (parité du tri par insertion)
    et tuple trié ; signe 0 si un indice est répété.
    """
    items = list(indices)
    if len(set(items)) != len(items):
        return 0, ()
    sign = 1
    for k in range(1, len(items)):
        j = k
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(items)


def blade_label(blade: Blade) -> str:
    if not blade:
        return "1"
    return "^".join(f"e{i + 1}" for i in blade)


# ---------------------------------------------------------------------------
# Matrices élémentaires par degré
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def wedge_operators(n: int, p: int) -> np.ndarray:
    """Pile (n, dim_{p+1}, dim_p) des matrices de u -> e_i ^ u sur les p-formes."""
    out = np.zeros((n, dim_forms(n, p + 1), dim_forms(n, p)))
    target = blade_index(n, p + 1)
    for col, b in enumerate(blades(n, p)):
        for i in range(n):
            sign, merged = sort_sign((i,) + b)
            if sign:
                out[i, target[merged], col] = sign
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def contraction_operators(n: int, p: int) -> np.ndarray:
    """Pile (n, dim_{p-1}, dim_p) des matrices de u -> e_i ⌟ u ; transposée de wedge_operators(n, p-1)."""
    out = np.zeros((n, dim_forms(n, p - 1), dim_forms(n, p)))
    target = blade_index(n, p - 1)
    for col, b in enumerate(blades(n, p)):
        for pos, i in enumerate(b):
            out[i, target[b[:pos] + b[pos + 1:]], col] = -1.0 if pos % 2 else 1.0
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def elementary_actions(n: int, p: int) -> np.ndarray:
    """
    Pile (n, n, dim_p, dim_p) : [a, b] est la dérivation étendant E_ab = e_a e_b^T,
    soit u -> e_a ^ (e_b ⌟ u).
    """
    d = dim_forms(n, p)
    if p == 0:
        out = np.zeros((n, n, d, d))
    else:
        out = np.einsum("axy,byz->abxz", wedge_operators(n, p - 1), contraction_operators(n, p))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _wedge_table(n: int, p: int, q: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    rows, left, right, signs = [], [], [], []
    target = blade_index(n, p + q)
    for i, a in enumerate(blades(n, p)):
        for j, b in enumerate(blades(n, q)):
            sign, merged = sort_sign(a + b)
            if sign:
                rows.append(target[merged])
                left.append(i)
                right.append(j)
                signs.append(sign)
    return (np.array(rows, dtype=int), np.array(left, dtype=int),
            np.array(right, dtype=int), np.array(signs, dtype=float))


@lru_cache(maxsize=None)
def _hodge_table(n: int, p: int) -> Tuple[np.ndarray, np.ndarray]:
    target = blade_index(n, n - p)
    rows, signs = [], []
    for b in blades(n, p):
        rest = tuple(i for i in range(n) if i not in b)
        sign, _ = sort_sign(b + rest)
        rows.append(target[rest])
        signs.append(float(sign))
    return np.array(rows, dtype=int), np.array(signs)


# ---------------------------------------------------------------------------
# Multivector
# ---------------------------------------------------------------------------

class Multivector:
    """
    Élément gradué de l'algèbre extérieure de R^n.
    Homogène de degré 1 : un vecteur (vecteurs et 1-formes identifiés via la métrique).
    """
    __slots__ = ("n", "_coeffs")

    def __init__(self, n: int, coeffs: Optional[Dict[int, Iterable[float]]] = None):
        self.n = check_dimension(n)
        parts = []
        coeffs = coeffs or {}
        for p in coeffs:
            if not 0 <= p <= self.n:
                raise DegreeError(f"Degré {p} hors de [0, {self.n}]")
        for p in range(self.n + 1):
            arr = np.zeros(dim_forms(self.n, p))
            if p in coeffs:
                given = np.asarray(coeffs[p], dtype=float).ravel()
                if given.shape != arr.shape:
                    raise ValidationError(
                        f"Degré {p}: {given.size} coefficients au lieu de {arr.size}")
                arr = given.copy()
            arr.setflags(write=False)
            parts.append(arr)
        self._coeffs = tuple(parts)

    # --- constructeurs ---
    @classmethod
    def zero(cls, n: int) -> "Multivector":
        return cls(n)

    @classmethod
    def from_array(cls, n: int, p: int, array: Iterable[float]) -> "Multivector":
        return cls(n, {p: array})

    def component(self, p: int) -> np.ndarray:
        """Coefficients du degré p (tableau vide hors de 0..n)."""
        if not 0 <= p <= self.n:
            return np.zeros(0)
        return self._coeffs[p]

    # --- graduation ---
    def grades(self, tol: float = 0.0) -> Tuple[int, ...]:
        return tuple(p for p, arr in enumerate(self._coeffs) if arr.size and np.max(np.abs(arr)) > tol)

    @property
    def grade(self) -> Optional[int]:
        """Degré d'une valeur homogène ; None pour zéro ; erreur si non homogène."""
        present = self.grades()
        if not present:
            return None
        if len(present) > 1:
            raise ValidationError(f"Multivecteur non homogène (degrés {present})")
        return present[0]

    def is_homogeneous(self) -> bool:
        return len(self.grades()) <= 1

    def grade_part(self, p: int) -> "Multivector":
        if not 0 <= p <= self.n:
            return Multivector(self.n)
        return Multivector(self.n, {p: self._coeffs[p]})

    # --- arithmétique ---
    def _check_same_n(self, other: "Multivector"):
        if not isinstance(other, Multivector):
            raise TypeError(f"Multivector attendu, reçu {type(other).__name__}")
        if other.n != self.n:
            raise DimensionMismatchError(f"Dimensions différentes: {self.n} vs {other.n}")

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check_same_n(other)
        return Multivector(self.n, {p: a + b for p, (a, b) in enumerate(zip(self._coeffs, other._coeffs))})

    def __sub__(self, other: "Multivector") -> "Multivector":
        self._check_same_n(other)
        return Multivector(self.n, {p: a - b for p, (a, b) in enumerate(zip(self._coeffs, other._coeffs))})

    def __neg__(self) -> "Multivector":
        return Multivector(self.n, {p: -a for p, a in enumerate(self._coeffs)})

    def __mul__(self, scalar: float) -> "Multivector":
        if isinstance(scalar, Multivector):
            return NotImplemented
        return Multivector(self.n, {p: float(scalar) * a for p, a in enumerate(self._coeffs)})

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Multivector":
        return self * (1.0 / float(scalar))

    def __xor__(self, other: "Multivector") -> "Multivector":
        return wedge(self, other)

    def norm(self) -> float:
        return float(np.sqrt(inner(self, self)))

    def allclose(self, other: "Multivector", atol: float = 1e-10) -> bool:
        self._check_same_n(other)
        return all(np.allclose(a, b, rtol=0.0, atol=atol) for a, b in zip(self._coeffs, other._coeffs))

    def to_dict(self, tol: float = 0.0) -> Dict[str, float]:
        """Coefficients non nuls indexés par étiquette ("e1^e2")."""
        out = {}
        for p, arr in enumerate(self._coeffs):
            for b, value in zip(blades(self.n, p), arr):
                if abs(value) > tol:
                    out[blade_label(b)] = float(value)
        return out

    def __repr__(self) -> str:
        terms = [f"{v:+g} {k}" for k, v in self.to_dict(tol=1e-14).items()]
        return f"Multivector(n={self.n}: {' '.join(terms) if terms else '0'})"


Vector = Multivector


def scalar(n: int, c: float = 1.0) -> Multivector:
    return Multivector(n, {0: [c]})


def vector(n: int, components: Sequence[float]) -> Multivector:
    return Multivector(n, {1: components})


def basis_vector(n: int, i: int) -> Multivector:
    """e_i avec i 1-based, comme dans les formules."""
    if not 1 <= i <= n:
        raise ValidationError(f"Indice de base {i} hors de [1, {n}]")
    comps = np.zeros(n)
    comps[i - 1] = 1.0
    return vector(n, comps)


def blade(n: int, indices: Sequence[int], coeff: float = 1.0) -> Multivector:
    """Forme de base e_{i1} ^ ... ^ e_{ip} (indices 1-based, ordre quelconque)."""
    n = check_dimension(n)
    zero_based = [i - 1 for i in indices]
    if any(not 0 <= i < n for i in zero_based):
        raise ValidationError(f"Indices {tuple(indices)} hors de [1, {n}]")
    sign, ordered = sort_sign(zero_based)
    p = len(zero_based)
    arr = np.zeros(dim_forms(n, p))
    if sign:
        arr[blade_index(n, p)[ordered]] = sign * coeff
    return Multivector(n, {p: arr})


def volume_form(n: int) -> Multivector:
    return blade(n, range(1, n + 1))


def vector_components(X: Union[Multivector, Sequence[float], np.ndarray], n: int) -> np.ndarray:
    """Composantes d'un vecteur donné comme multivecteur de degré 1 ou comme tableau."""
    if isinstance(X, Multivector):
        if X.n != n:
            raise DimensionMismatchError(f"Vecteur de dimension {X.n}, attendu {n}")
        if X.grades() not in ((), (1,)):
            raise ValidationError("Un vecteur doit être homogène de degré 1")
        return np.array(X.component(1))
    comps = np.asarray(X, dtype=float).ravel()
    if comps.size != n:
        raise DimensionMismatchError(f"Vecteur à {comps.size} composantes, attendu {n}")
    return comps


# ---------------------------------------------------------------------------
# Opérations
# ---------------------------------------------------------------------------

def wedge(a: Multivector, b: Multivector) -> Multivector:
    """Produit extérieur, bilinéaire et associatif ; degré p+q (nul au-delà de n)."""
    a._check_same_n(b)
    n = a.n
    out = [np.zeros(dim_forms(n, r)) for r in range(n + 1)]
    for p in a.grades():
        for q in b.grades():
            if p + q > n:
                continue
            rows, left, right, signs = _wedge_table(n, p, q)
            np.add.at(out[p + q], rows, signs * a.component(p)[left] * b.component(q)[right])
    return Multivector(n, dict(enumerate(out)))


def contract(X: Union[Multivector, Sequence[float]], u: Multivector) -> Multivector:
    """Produit intérieur X ⌟ u : antidérivation de degré -1, nulle sur les scalaires."""
    x = vector_components(X, u.n)
    n = u.n
    parts = {}
    for p in u.grades():
        if p == 0:
            continue
        ops = contraction_operators(n, p)
        parts[p - 1] = np.tensordot(x, ops, axes=1) @ u.component(p)
    return Multivector(n, parts)


def inner(u: Multivector, v: Multivector) -> float:
    """Produit scalaire induit : degrés orthogonaux, formes de base orthonormées."""
    u._check_same_n(v)
    return float(sum(np.dot(a, b) for a, b in zip(u._coeffs, v._coeffs)))


def hodge(u: Multivector) -> Multivector:
    """
    Étoile de Hodge sur une valeur homogène de degré p : u ^ hodge(v) = <u, v> ω.
    La valeur nulle est envoyée sur zéro.
    """
    p = u.grade
    n = u.n
    if p is None:
        return Multivector(n)
    rows, signs = _hodge_table(n, p)
    arr = np.zeros(dim_forms(n, n - p))
    arr[rows] = signs * u.component(p)
    return Multivector(n, {n - p: arr})


def volume_contractions(n: int, p: int) -> Subspace:
    """Span des contractions de ω par n-p vecteurs de base ; c'est tout l'espace des p-formes."""
    n = check_dimension(n)
    p = check_degree(n, p)
    omega = volume_form(n).component(n).reshape(-1, 1)
    images = omega
    for degree in range(n, p, -1):
        ops = contraction_operators(n, degree)
        # au plus C(n, degree-1) colonnes par niveau
        images = orth(np.hstack([ops[i] @ images for i in range(n)]))
    return Subspace(n, p, images)


def self_dual_basis() -> Tuple[Multivector, Multivector, Multivector]:
    """(α, β, γ) : base orthogonale des 2-formes auto-duales de R^4, ||·||² = 2."""
    alpha = blade(4, (1, 2)) + blade(4, (3, 4))
    beta = blade(4, (1, 3)) - blade(4, (2, 4))
    gamma = blade(4, (1, 4)) + blade(4, (2, 3))
    return alpha, beta, gamma


def anti_self_dual_basis() -> Tuple[Multivector, Multivector, Multivector]:
    return (blade(4, (1, 2)) - blade(4, (3, 4)),
            blade(4, (1, 3)) + blade(4, (2, 4)),
            blade(4, (1, 4)) - blade(4, (2, 3)))


def random_form(n: int, p: int, rng: np.random.Generator, unit: bool = True) -> Multivector:
    arr = rng.standard_normal(dim_forms(n, p))
    if unit and arr.size:
        arr /= np.linalg.norm(arr)
    return Multivector(n, {p: arr})
