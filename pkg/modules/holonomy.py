# modules/holonomy.py
"""
Algèbre d'holonomie d'un modèle d'espace symétrique : span des endomorphismes de courbure
R_{e_i,e_j}, fermé par crochets. Sous-espaces invariants, commutant sur les vecteurs,
détection kählérienne.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from modules.analysis_utils import Subspace, null_space, orth
from modules.curvature_models import CurvatureTensor
from modules.errors import ValidationError
from modules.exterior_core import check_degree, dim_forms
from modules.form_operators import SkewEndo, casimir, relative_tol, rho_matrix
from modules.settings import settings

logger = logging.getLogger("killing-forms.holonomy")

__all__ = [
    "HolonomyAlgebra", "Subspace", "generate", "holonomy_of", "trivial_summand", "commutant_basis",
    "commutant_dim_on_vectors", "skew_commutant_basis", "is_kahler", "is_symmetric_model",
    "curvature_invariance_residual", "check_casimir_kernel",
]


@dataclass(frozen=True, eq=False)
class HolonomyAlgebra:
    """
    Sous-algèbre de so(n) ; `basis` a pour lignes les générateurs aplatis (ordre ligne),
    orthonormés pour le produit scalaire de Frobenius.
    """
    n: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        basis = basis.reshape(-1, self.n * self.n) if basis.size else np.zeros((0, self.n * self.n))
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def generators(self) -> List[SkewEndo]:
        return [SkewEndo(self.n, row.reshape(self.n, self.n)) for row in self.basis]

    def matrices(self) -> np.ndarray:
        return self.basis.reshape(self.dim, self.n, self.n)

    def rho_generators(self, p: int) -> np.ndarray:
        """Pile (dim, d_p, d_p) des actions des générateurs en degré p."""
        return _rho_stack(self, p)

    def bracket_residual(self) -> float:
        """Distance maximale des crochets [g_a, g_b] au span."""
        mats = self.matrices()
        worst = 0.0
        for a in range(self.dim):
            for b in range(a + 1, self.dim):
                c = (mats[a] @ mats[b] - mats[b] @ mats[a]).ravel()
                worst = max(worst, float(np.linalg.norm(c - self.basis.T @ (self.basis @ c))))
        return worst

    def contains(self, matrix: np.ndarray, tol: Optional[float] = None) -> bool:
        tol = settings["identity_tol"] if tol is None else tol
        v = np.asarray(matrix, dtype=float).ravel()
        return float(np.linalg.norm(v - self.basis.T @ (self.basis @ v))) < tol * max(1.0, np.linalg.norm(v))

    def __repr__(self) -> str:
        return f"HolonomyAlgebra(n={self.n}, dim={self.dim})"


@lru_cache(maxsize=512)
def _rho_stack(H: HolonomyAlgebra, p: int) -> np.ndarray:
    d = dim_forms(H.n, p)
    if H.dim == 0:
        out = np.zeros((0, d, d))
    else:
        out = np.stack([rho_matrix(g, H.n, p) for g in H.matrices()])
    out.setflags(write=False)
    return out


def _bracket_closure(n: int, spanning: np.ndarray, atol: float) -> np.ndarray:
    """Ajoute les crochets jusqu'à stabilité de la dimension ; colonnes orthonormées en sortie."""
    basis = orth(spanning, atol=atol)
    for step in range(n * (n - 1) // 2 + 1):
        mats = basis.T.reshape(-1, n, n)
        brackets = [(mats[a] @ mats[b] - mats[b] @ mats[a]).ravel()
                    for a in range(len(mats)) for b in range(a + 1, len(mats))]
        if not brackets:
            return basis
        enlarged = orth(np.column_stack([basis] + brackets), atol=atol)
        logger.debug("Fermeture par crochets, étape %d: dim %d -> %d", step, basis.shape[1], enlarged.shape[1])
        if enlarged.shape[1] == basis.shape[1]:
            return basis
        basis = enlarged
    return basis


def generate(R: CurvatureTensor) -> HolonomyAlgebra:
    """Span des R_{e_i,e_j} (fermé par crochets), base déterministe."""
    n = R.n
    if n == 0:
        return HolonomyAlgebra(0, np.zeros((0, 0)))
    spanning = np.asarray(R.components).reshape(n * n, n * n).T
    basis = _bracket_closure(n, spanning, atol=relative_tol(R, settings["rank_rtol"]))
    H = HolonomyAlgebra(n, basis.T)
    logger.debug("Holonomie de %s: dim %d", R.label, H.dim)
    return H


@lru_cache(maxsize=256)
def holonomy_of(R: CurvatureTensor) -> HolonomyAlgebra:
    return generate(R)


def trivial_summand(H: HolonomyAlgebra, p: int) -> Subspace:
    """Noyau commun des générateurs en degré p : la partie sur laquelle H agit trivialement."""
    p = check_degree(H.n, p)
    stack = H.rho_generators(p)
    d = dim_forms(H.n, p)
    if H.dim == 0:
        return Subspace.full(H.n, p)
    return Subspace(H.n, p, null_space(stack.reshape(-1, d)))


def commutant_basis(H: HolonomyAlgebra) -> List[np.ndarray]:
    """Base des matrices C (n x n) avec [C, g] = 0 pour tout générateur g."""
    n = H.n
    if H.dim == 0:
        return [e.reshape(n, n) for e in np.eye(n * n)]
    eye = np.eye(n)
    system = np.vstack([np.kron(eye, g.T) - np.kron(g, eye) for g in H.matrices()])
    return [c.reshape(n, n) for c in null_space(system).T]


def commutant_dim_on_vectors(H: HolonomyAlgebra) -> int:
    """1 signifie irréductible de type réel (lemme de Schur réel)."""
    return len(commutant_basis(H))


def _transpose_permutation(n: int) -> np.ndarray:
    P = np.zeros((n * n, n * n))
    for a in range(n):
        for b in range(n):
            P[a * n + b, b * n + a] = 1.0
    return P


def skew_commutant_basis(H: HolonomyAlgebra) -> List[np.ndarray]:
    n = H.n
    rows = [np.eye(n * n) + _transpose_permutation(n)]
    eye = np.eye(n)
    rows += [np.kron(eye, g.T) - np.kron(g, eye) for g in H.matrices()]
    return [c.reshape(n, n) for c in null_space(np.vstack(rows)).T]


def _polar_complex_structure(S: np.ndarray, tol: float) -> Optional[np.ndarray]:
    """J = S (-S²)^{-1/2} si S antisymétrique est inversible."""
    lam, V = np.linalg.eigh(-S @ S)
    if lam.size == 0 or lam.min() <= tol * max(1.0, lam.max()):
        return None
    J = S @ V @ np.diag(lam ** -0.5) @ V.T
    if np.max(np.abs(J @ J + np.eye(len(S)))) > 1e-8:
        return None
    return 0.5 * (J - J.T)


def is_kahler(H: HolonomyAlgebra, seed: Optional[int] = None, attempts: int = 16) -> Tuple[bool, Optional[SkewEndo]]:
    """
    Cherche une structure complexe orthogonale commutant avec H, par la partie polaire
    d'éléments du commutant antisymétrique (éléments de base puis combinaisons aléatoires).
    """
    n = H.n
    if n == 0 or n % 2:
        return False, None
    skew = skew_commutant_basis(H)
    if not skew:
        return False, None
    rng = np.random.default_rng(settings["seed"] if seed is None else seed)
    candidates = list(skew)
    candidates += [sum(c * S for c, S in zip(rng.standard_normal(len(skew)), skew)) for _ in range(attempts)]
    for S in candidates:
        J = _polar_complex_structure(S, settings["rank_rtol"])
        if J is not None:
            return True, SkewEndo(n, J)
    logger.warning("⚠️ Commutant antisymétrique de dim %d sans structure complexe trouvée", len(skew))
    return False, None


def curvature_invariance_residual(R: CurvatureTensor, H: Optional[HolonomyAlgebra] = None) -> float:
    """max_g |[rho_2(g), op2]| : nul quand R est parallèle pour sa propre holonomie."""
    H = holonomy_of(R) if H is None else H
    if H.dim == 0 or R.n < 2:
        return 0.0
    op2 = np.asarray(R.op2)
    return max(float(np.max(np.abs(g @ op2 - op2 @ g))) for g in H.rho_generators(2))


def is_symmetric_model(R: CurvatureTensor, H: Optional[HolonomyAlgebra] = None) -> bool:
    return curvature_invariance_residual(R, H) < relative_tol(R)


def check_casimir_kernel(R: CurvatureTensor, H: Optional[HolonomyAlgebra], q: int) -> float:
    """
    Distance entre le noyau commun des générateurs en degré q et ker q(R).
    Vaut au moins 1 si les dimensions diffèrent.
    """
    H = holonomy_of(R) if H is None else H
    if H.n != R.n:
        raise ValidationError(f"Holonomie de dimension {H.n} pour un modèle de dimension {R.n}")
    joint = trivial_summand(H, q)
    kernel = Subspace(R.n, q, null_space(casimir(R, q).matrix, atol=relative_tol(R, settings["rank_rtol"])))
    distance = joint.distance(kernel)
    logger.debug("Noyau Casimir degré %d: dim %d vs %d (distance %.2e)", q, joint.dim, kernel.dim, distance)
    return distance
