# modules/form_operators.py
"""
Opérateurs sur les formes : action de so(n) par dérivations, R_{X,Y}, R⁺, Casimir q(R)
et opérateurs kählériens algébriques (J, L, Λ).

Tous les opérateurs sont matérialisés en matrices denses par degré (base lexicographique).
Convention de signe : R_{e_i,e_j} agit sur les vecteurs par la matrice M[k, l] = R_ijkl,
de sorte que la sphère ronde a Ric = (n-1) id et un Casimir positif.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Union

import numpy as np

from modules.curvature_models import CurvatureTensor
from modules.errors import DegreeError, DimensionMismatchError, ValidationError
from modules.exterior_core import (
    Multivector, blades, check_degree, contraction_operators, dim_forms, elementary_actions,
    vector_components, wedge_operators,
)
from modules.settings import settings

logger = logging.getLogger("killing-forms.operators")


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SkewEndo:
    """Endomorphisme antisymétrique de R^n ; A_ω X = X ⌟ ω pour une 2-forme ω."""
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.shape != (self.n, self.n):
            raise DimensionMismatchError(f"Matrice de forme {matrix.shape}, attendu ({self.n}, {self.n})")
        if matrix.size and np.max(np.abs(matrix + matrix.T)) > 1e-12 * max(1.0, np.max(np.abs(matrix))):
            raise ValidationError("Matrice non antisymétrique")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_form(cls, omega: Multivector) -> "SkewEndo":
        n = omega.n
        matrix = np.zeros((n, n))
        for (i, j), v in zip(blades(n, 2), omega.component(2)):
            matrix[j, i] = v
            matrix[i, j] = -v
        return cls(n, matrix)

    def to_form(self) -> Multivector:
        return Multivector.from_array(self.n, 2, [self.matrix[j, i] for i, j in blades(self.n, 2)])

    def __call__(self, X) -> Multivector:
        return Multivector.from_array(self.n, 1, self.matrix @ vector_components(X, self.n))


@dataclass(frozen=True, eq=False)
class FormOperator:
    """Opérateur linéaire des p_in-formes vers les p_out-formes."""
    n: int
    p_in: int
    p_out: int
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        expected = (dim_forms(self.n, self.p_out), dim_forms(self.n, self.p_in))
        if matrix.shape != expected:
            raise DimensionMismatchError(f"Matrice de forme {matrix.shape}, attendu {expected}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def __call__(self, u: Multivector) -> Multivector:
        if u.n != self.n:
            raise DimensionMismatchError(f"Forme de dimension {u.n}, attendu {self.n}")
        if u.grades() not in ((), (self.p_in,)):
            raise DegreeError(f"Opérateur défini sur le degré {self.p_in}, reçu {u.grades()}")
        return Multivector.from_array(self.n, self.p_out, self.matrix @ u.component(self.p_in))

    def __matmul__(self, other: "FormOperator") -> "FormOperator":
        if other.p_out != self.p_in or other.n != self.n:
            raise DegreeError(f"Composition impossible: degré {other.p_out} -> {self.p_in}")
        return FormOperator(self.n, other.p_in, self.p_out, self.matrix @ other.matrix)

    def is_symmetric(self, tol: float = 1e-10) -> bool:
        return self.p_in == self.p_out and np.allclose(self.matrix, self.matrix.T, rtol=0.0, atol=tol)


# ---------------------------------------------------------------------------
# Action de so(n)
# ---------------------------------------------------------------------------

def rho_matrix(A: Union[SkewEndo, np.ndarray], n: int, p: int) -> np.ndarray:
    """Matrice de la dérivation étendant A au degré p."""
    A = A.matrix if isinstance(A, SkewEndo) else np.asarray(A, dtype=float)
    return np.einsum("ab,abxy->xy", A, elementary_actions(n, p))


def rho_action(A: SkewEndo, u: Multivector) -> Multivector:
    if A.n != u.n:
        raise DimensionMismatchError(f"Dimensions différentes: {A.n} vs {u.n}")
    parts = {p: rho_matrix(A, u.n, p) @ u.component(p) for p in u.grades()}
    return Multivector(u.n, parts)


def _check_model(R: CurvatureTensor, u: Multivector):
    if u.n != R.n:
        raise DimensionMismatchError(f"Forme de dimension {u.n}, modèle de dimension {R.n}")


def curvature_endomorphism(R: CurvatureTensor, X, Y) -> SkewEndo:
    """R_{X,Y} agissant sur les vecteurs."""
    x = vector_components(X, R.n)
    y = vector_components(Y, R.n)
    return SkewEndo(R.n, np.einsum("i,j,ijkl->kl", x, y, R.components))


@lru_cache(maxsize=512)
def curvature_matrices(R: CurvatureTensor, p: int) -> np.ndarray:
    """Pile (n, n, d_p, d_p) des matrices de R_{e_i,e_j} en degré p."""
    out = np.einsum("ijab,abxy->ijxy", R.components, elementary_actions(R.n, p))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=512)
def r_plus_matrices(R: CurvatureTensor, p: int) -> np.ndarray:
    """Pile (n, d_{p+1}, d_p) des matrices de R⁺(e_k) = sum_i e_i ^ R_{e_k,e_i}."""
    out = np.einsum("ixy,kiyz->kxz", wedge_operators(R.n, p), curvature_matrices(R, p))
    out.setflags(write=False)
    return out


def curv_action(R: CurvatureTensor, X, Y, u: Multivector) -> Multivector:
    _check_model(R, u)
    x = vector_components(X, R.n)
    y = vector_components(Y, R.n)
    parts = {}
    for p in u.grades():
        mats = curvature_matrices(R, p)
        parts[p] = np.einsum("i,j,ijxy,y->x", x, y, mats, u.component(p))
    return Multivector(R.n, parts)


def r_plus(R: CurvatureTensor, X, u: Multivector) -> Multivector:
    """R⁺(X)u = sum_i e_i ^ R_{X,e_i} u ; degré p+1 (nul en degré n)."""
    _check_model(R, u)
    x = vector_components(X, R.n)
    parts = {}
    for p in u.grades():
        if p == R.n:
            continue
        parts[p + 1] = np.einsum("k,kxy,y->x", x, r_plus_matrices(R, p), u.component(p))
    return Multivector(R.n, parts)


@lru_cache(maxsize=512)
def _casimir_matrix(R: CurvatureTensor, p: int) -> np.ndarray:
    out = -np.einsum("ixy,iyz->xz", contraction_operators(R.n, p + 1), r_plus_matrices(R, p))
    out.setflags(write=False)
    return out


def casimir(R: CurvatureTensor, p: int) -> FormOperator:
    """q(R) = -sum_i e_i ⌟ R⁺(e_i) en degré p ; q(R) = Ric en degré 1."""
    p = check_degree(R.n, p)
    return FormOperator(R.n, p, p, _casimir_matrix(R, p))


# ---------------------------------------------------------------------------
# Équations (k1) et (k2)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=512)
def k1_matrices(R: CurvatureTensor, p: int) -> np.ndarray:
    """
    Pile sur les paires i < j de u -> p R_{e_i,e_j} u + e_i ⌟ R⁺(e_j) u - e_j ⌟ R⁺(e_i) u.
    Son noyau commun est E₀.
    """
    n = R.n
    C = contraction_operators(n, p + 1)
    RP = r_plus_matrices(R, p)
    curv = curvature_matrices(R, p)
    pairs = blades(n, 2)
    d = dim_forms(n, p)
    out = np.zeros((len(pairs), d, d))
    for k, (i, j) in enumerate(pairs):
        out[k] = p * curv[i, j] + C[i] @ RP[j] - C[j] @ RP[i]
    out.setflags(write=False)
    return out


@lru_cache(maxsize=512)
def k2_matrices(R: CurvatureTensor, p: int) -> np.ndarray:
    """
    Pile sur les paires i < j, en degré p+1, de v -> p R_{e_i,e_j} v + R⁺(e_i)(e_j ⌟ v) - R⁺(e_j)(e_i ⌟ v).
    Son noyau commun est F₀.
    """
    n = R.n
    C = contraction_operators(n, p + 1)
    RP = r_plus_matrices(R, p)
    curv = curvature_matrices(R, p + 1)
    pairs = blades(n, 2)
    d = dim_forms(n, p + 1)
    out = np.zeros((len(pairs), d, d))
    for k, (i, j) in enumerate(pairs):
        out[k] = p * curv[i, j] + RP[i] @ C[j] - RP[j] @ C[i]
    out.setflags(write=False)
    return out


def k1_defect(R: CurvatureTensor, u: Multivector) -> float:
    """max sur les paires de base de |p R_{X,Y}u + X⌟R⁺(Y)u - Y⌟R⁺(X)u|."""
    _check_model(R, u)
    p = u.grade
    if p is None:
        return 0.0
    mats = k1_matrices(R, p)
    if not len(mats):
        return 0.0
    return float(np.max(np.linalg.norm(mats @ u.component(p), axis=1)))


# ---------------------------------------------------------------------------
# Opérateurs kählériens
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KahlerOperators:
    """
    J = sum J0e_i ^ e_i⌟ (dérivation), L = produit par la forme de Kähler
    ½ sum J0e_i ^ e_i, et Λ = ½ sum e_i⌟ J0e_i⌟, adjoint de L.
    """
    n: int
    J0: np.ndarray

    @property
    def m(self) -> int:
        return self.n // 2

    def J(self, p: int) -> FormOperator:
        return FormOperator(self.n, p, p, rho_matrix(self.J0, self.n, p))

    def L(self, p: int) -> FormOperator:
        if not 0 <= p <= self.n:
            return FormOperator(self.n, p, p + 2, np.zeros((dim_forms(self.n, p + 2), dim_forms(self.n, p))))
        return FormOperator(self.n, p, p + 2, 0.5 * np.einsum("ai,axy,iyz->xz", self.J0,
                                                             wedge_operators(self.n, p + 1),
                                                             wedge_operators(self.n, p)))

    def Lam(self, p: int) -> FormOperator:
        return FormOperator(self.n, p, p - 2, self.L(p - 2).matrix.T)

    def kahler_form(self) -> Multivector:
        return Multivector.from_array(self.n, 2, self.L(0).matrix[:, 0])


def kahler_ops(J0) -> KahlerOperators:
    J0 = np.array(J0.matrix if isinstance(J0, SkewEndo) else J0, dtype=float)
    if J0.ndim != 2 or J0.shape[0] != J0.shape[1] or J0.shape[0] % 2:
        raise ValidationError(f"Structure complexe de forme {J0.shape} invalide (n pair attendu)")
    n = J0.shape[0]
    if np.max(np.abs(J0 + J0.T)) > 1e-10 or np.max(np.abs(J0 @ J0 + np.eye(n))) > 1e-10:
        raise ValidationError("J0 n'est pas une structure complexe orthogonale (J0² != -id)")
    J0.setflags(write=False)
    return KahlerOperators(n, J0)


def check_kahler_identities(ops: KahlerOperators) -> Dict[str, float]:
    """Résidus de [L, Λ] = (p - m) id, [J, L] = 0 et [J, Λ] = 0 sur tous les degrés."""
    res = {"L_Lambda": 0.0, "J_L": 0.0, "J_Lambda": 0.0}
    n, m = ops.n, ops.m
    for p in range(n + 1):
        d = dim_forms(n, p)
        comm = (ops.L(p - 2) @ ops.Lam(p)).matrix - (ops.Lam(p + 2) @ ops.L(p)).matrix
        res["L_Lambda"] = max(res["L_Lambda"], float(np.max(np.abs(comm - (p - m) * np.eye(d)), initial=0.0)))
        jl = (ops.J(p + 2) @ ops.L(p)).matrix - (ops.L(p) @ ops.J(p)).matrix
        res["J_L"] = max(res["J_L"], float(np.max(np.abs(jl), initial=0.0)))
        jlam = (ops.J(p - 2) @ ops.Lam(p)).matrix - (ops.Lam(p) @ ops.J(p)).matrix
        res["J_Lambda"] = max(res["J_Lambda"], float(np.max(np.abs(jlam), initial=0.0)))
    logger.debug("Identités kählériennes: %s", res)
    return res


def relative_tol(R: CurvatureTensor, tol: Optional[float] = None) -> float:
    """Tolérance absolue adaptée à l'échelle du modèle."""
    tol = settings["identity_tol"] if tol is None else tol
    return tol * max(1.0, R.scale)
