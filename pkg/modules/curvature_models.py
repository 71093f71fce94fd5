# modules/curvature_models.py
"""
Tenseurs de courbure algébriques : construction, validation, décomposition, catalogue.

Un tenseur est tenu par op2, endomorphisme symétrique des 2-formes
(base e_i ^ e_j, i < j, ordre lexicographique), et R_ijkl = <op2(e_i ^ e_j), e_k ^ e_l>.
Convention : Ric_jk = sum_i R_ijik, si bien que la sphère ronde a Ric = (n-1) id.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from modules.errors import DimensionMismatchError, ValidationError
from modules.exterior_core import (
    Multivector, blade, blade_index, blades, dim_forms, self_dual_basis, sort_sign, vector_components,
    wedge,
)
from modules.settings import settings

logger = logging.getLogger("killing-forms.curvature")

Entry = Tuple[int, int, int, int, float]


def _components_from_op2(n: int, op2: np.ndarray) -> np.ndarray:
    comps = np.zeros((n, n, n, n))
    pairs = blades(n, 2)
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            v = op2[a, b]
            comps[i, j, k, l] = v
            comps[j, i, k, l] = -v
            comps[i, j, l, k] = -v
            comps[j, i, l, k] = v
    return comps


def _op2_from_components(n: int, comps: np.ndarray) -> np.ndarray:
    pairs = blades(n, 2)
    op2 = np.zeros((len(pairs), len(pairs)))
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            op2[a, b] = comps[i, j, k, l]
    return op2


def bianchi_map(comps: np.ndarray) -> np.ndarray:
    """Somme cyclique R_ijkl + R_iklj + R_iljk sur (j, k, l)."""
    return comps + np.einsum("iklj->ijkl", comps) + np.einsum("iljk->ijkl", comps)


def _scale(op2: np.ndarray) -> float:
    return float(np.max(np.abs(op2))) if op2.size else 0.0


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """
    Tenseur de courbure algébrique sur R^n.
    Valeur immuable (op2 en lecture seule) ; le hachage par identité permet
    la mise en cache des opérateurs qui en dépendent.
    """
    n: int
    op2: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise ValidationError(f"Dimension invalide: {self.n!r}")
        if self.n > settings["max_dimension"]:
            raise ValidationError(f"Dimension {self.n} > max_dimension={settings['max_dimension']}")
        size = dim_forms(self.n, 2)
        op2 = np.array(self.op2, dtype=float)
        if op2.size == 0 and size == 0:
            op2 = np.zeros((0, 0))
        if op2.shape != (size, size):
            raise DimensionMismatchError(f"op2 de forme {op2.shape}, attendu ({size}, {size})")
        scale = max(1.0, _scale(op2))
        tol = settings["symmetry_tol"] * scale
        if size and np.max(np.abs(op2 - op2.T)) > tol:
            raise ValidationError("op2 n'est pas symétrique")
        if size:
            residual = float(np.max(np.abs(bianchi_map(_components_from_op2(self.n, op2)))))
            if residual > tol:
                raise ValidationError(f"Identité de Bianchi violée (résidu {residual:.3e})")
        op2.setflags(write=False)
        object.__setattr__(self, "op2", op2)
        object.__setattr__(self, "n", int(self.n))

    @property
    def scale(self) -> float:
        return _scale(self.op2)

    @cached_property
    def components(self) -> np.ndarray:
        """Tableau (n, n, n, n) des R_ijkl."""
        comps = _components_from_op2(self.n, self.op2)
        comps.setflags(write=False)
        return comps

    @cached_property
    def ricci(self) -> np.ndarray:
        ric = np.einsum("ijik->jk", self.components) if self.n else np.zeros((0, 0))
        ric = 0.5 * (ric + ric.T)
        ric.setflags(write=False)
        return ric

    @property
    def scalar_curvature(self) -> float:
        return float(np.trace(self.ricci))

    @property
    def einstein_constant(self) -> Optional[float]:
        """r si Ric = r id (à la tolérance près), None sinon."""
        if self.n == 0:
            return None
        r = self.scalar_curvature / self.n
        if np.max(np.abs(self.ricci - r * np.eye(self.n))) <= settings["identity_tol"] * max(1.0, self.scale):
            return r
        return None

    @cached_property
    def decomposition(self) -> "CurvatureDecomposition":
        return decompose(self)

    @property
    def weyl_part(self) -> np.ndarray:
        return self.decomposition.weyl.op2

    @property
    def weyl_norm(self) -> float:
        return self.decomposition.weyl_norm

    def entries(self, tol: float = 0.0) -> List[Entry]:
        """Composantes non redondantes (i<j, k<l, (i,j) <= (k,l)), indices 1-based."""
        out = []
        pairs = blades(self.n, 2)
        for a, (i, j) in enumerate(pairs):
            for b in range(a, len(pairs)):
                v = float(self.op2[a, b])
                if abs(v) > tol:
                    k, l = pairs[b]
                    out.append((i + 1, j + 1, k + 1, l + 1, v))
        return out

    def apply(self, omega: Multivector) -> Multivector:
        """op2 appliqué à une 2-forme."""
        if omega.n != self.n:
            raise DimensionMismatchError(f"2-forme de dimension {omega.n}, attendu {self.n}")
        return Multivector.from_array(self.n, 2, self.op2 @ omega.component(2))

    def sectional_curvature(self, X, Y) -> float:
        """K(X, Y) = <op2(X^Y), X^Y> / |X^Y|^2 ; erreur si X, Y sont colinéaires."""
        x = Multivector.from_array(self.n, 1, vector_components(X, self.n))
        y = Multivector.from_array(self.n, 1, vector_components(Y, self.n))
        plane = wedge(x, y).component(2)
        area = float(plane @ plane)
        if area < 1e-24:
            raise ValidationError("Vecteurs colinéaires : courbure sectionnelle indéfinie")
        return float(plane @ self.op2 @ plane) / area

    def allclose(self, other: "CurvatureTensor", atol: float = 1e-10) -> bool:
        return self.n == other.n and np.allclose(self.op2, other.op2, rtol=0.0, atol=atol)

    def __repr__(self) -> str:
        return f"CurvatureTensor(label={self.label!r}, n={self.n})"


@dataclass(frozen=True)
class CurvatureDecomposition:
    scalar_part: CurvatureTensor
    traceless_ricci_part: CurvatureTensor
    weyl: CurvatureTensor
    norms: dict = field(default_factory=dict)

    @property
    def weyl_norm(self) -> float:
        return self.norms["weyl"]


# ---------------------------------------------------------------------------
# Constructeurs
# ---------------------------------------------------------------------------

def from_op2(n: int, op2, label: str = "custom") -> CurvatureTensor:
    op2 = np.asarray(op2, dtype=float)
    return CurvatureTensor(n, 0.5 * (op2 + op2.T), label)


def from_components(n: int, entries: Iterable[Union[Entry, dict]], label: str = "custom") -> CurvatureTensor:
    """
    Construit un tenseur depuis une liste (i, j, k, l, valeur), indices 1..n.
    Les composantes absentes se déduisent des symétries ou valent zéro ;
    deux entrées contradictoires sont rejetées.
    """
    size = dim_forms(n, 2)
    op2 = np.zeros((size, size))
    seen = {}
    index = blade_index(n, 2)
    for entry in entries:
        if isinstance(entry, dict):
            try:
                entry = (entry["i"], entry["j"], entry["k"], entry["l"], entry["value"])
            except KeyError as e:
                raise ValidationError(f"Entrée incomplète: clé {e} manquante")
        try:
            i, j, k, l, value = entry
            value = float(value)
        except (TypeError, ValueError):
            raise ValidationError(f"Entrée mal formée: {entry!r}")
        for idx in (i, j, k, l):
            if not isinstance(idx, (int, np.integer)) or not 1 <= idx <= n:
                raise ValidationError(f"Indice {idx!r} hors de [1, {n}]")
        s1, first = sort_sign((i - 1, j - 1))
        s2, second = sort_sign((k - 1, l - 1))
        if s1 == 0 or s2 == 0:
            if abs(value) > settings["symmetry_tol"]:
                raise ValidationError(f"R_{i}{j}{k}{l} doit être nul (indice répété)")
            continue
        a, b = sorted((index[first], index[second]))
        value *= s1 * s2
        if (a, b) in seen and abs(seen[(a, b)] - value) > settings["symmetry_tol"] * max(1.0, abs(value)):
            raise ValidationError(
                f"Entrées incohérentes pour R_{i}{j}{k}{l}: {seen[(a, b)]} vs {value}")
        seen[(a, b)] = value
        op2[a, b] = op2[b, a] = value
    return CurvatureTensor(n, op2, label)


def flat(n: int) -> CurvatureTensor:
    size = dim_forms(n, 2)
    return CurvatureTensor(n, np.zeros((size, size)), f"flat:{n}")


def constant_curvature(n: int, kappa: float) -> CurvatureTensor:
    """Courbure sectionnelle constante kappa : op2 = kappa id, Ric = (n-1) kappa id."""
    if n < 2:
        raise ValidationError(f"constant_curvature exige n >= 2 (reçu {n})")
    return CurvatureTensor(n, kappa * np.eye(dim_forms(n, 2)), f"sphere:{n}:{kappa:g}")


def standard_complex_structure(m: int) -> np.ndarray:
    """J0 e_{2k-1} = e_{2k} sur R^{2m}."""
    J0 = np.zeros((2 * m, 2 * m))
    for k in range(m):
        J0[2 * k + 1, 2 * k] = 1.0
        J0[2 * k, 2 * k + 1] = -1.0
    return J0


def fubini_study(m: int) -> CurvatureTensor:
    """Espace projectif complexe CP^m, courbure sectionnelle holomorphe 4 ; Ric = (2m+2) id."""
    if m < 1:
        raise ValidationError(f"fubini_study exige m >= 1 (reçu {m})")
    n = 2 * m
    g = np.eye(n)
    K = standard_complex_structure(m).T
    comps = (np.einsum("ik,jl->ijkl", g, g) - np.einsum("il,jk->ijkl", g, g)
             + np.einsum("ik,jl->ijkl", K, K) - np.einsum("il,jk->ijkl", K, K)
             + 2.0 * np.einsum("ij,kl->ijkl", K, K))
    return CurvatureTensor(n, _op2_from_components(n, comps), f"cpn:{m}")


def product(R1: CurvatureTensor, R2: CurvatureTensor) -> CurvatureTensor:
    """Somme directe sur R^{n1+n2} : composantes mixtes nulles."""
    if R2.n == 0:
        return R1
    if R1.n == 0:
        return R2
    n1, n2 = R1.n, R2.n
    n = n1 + n2
    comps = np.zeros((n, n, n, n))
    comps[:n1, :n1, :n1, :n1] = R1.components
    comps[n1:, n1:, n1:, n1:] = R2.components
    return CurvatureTensor(n, _op2_from_components(n, comps), f"{R1.label}x{R2.label}")


def self_dual_weyl4() -> CurvatureTensor:
    """
    Tenseur de Weyl auto-dual en dimension 4 : R(α) = α, R(β) = -β, R(γ) = 0,
    nul sur les 2-formes anti-auto-duales. Ricci-plat.
    """
    alpha, beta, _ = self_dual_basis()
    a = alpha.component(2)
    b = beta.component(2)
    # |α|² = |β|² = 2
    op2 = 0.5 * (np.outer(a, a) - np.outer(b, b))
    return CurvatureTensor(4, op2, "weyl4")


def embed_trivial(R: CurvatureTensor, n_new: int) -> CurvatureTensor:
    """Prolonge R par zéro sur R^{n_new} (composantes d'indice > R.n nulles)."""
    if n_new < R.n:
        raise ValidationError(f"embed_trivial: n_new={n_new} < n={R.n}")
    if n_new == R.n:
        return R
    label = f"{R.label}:{n_new}"
    return CurvatureTensor(n_new, product(R, flat(n_new - R.n)).op2, label)


# ---------------------------------------------------------------------------
# Décomposition et projection de Bianchi
# ---------------------------------------------------------------------------

def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    return (np.einsum("ik,jl->ijkl", h, k) + np.einsum("jl,ik->ijkl", h, k)
            - np.einsum("il,jk->ijkl", h, k) - np.einsum("jk,il->ijkl", h, k))


def decompose(R: CurvatureTensor) -> CurvatureDecomposition:
    """Décomposition orthogonale R = scalaire + Ricci sans trace + Weyl."""
    n = R.n
    comps = np.array(R.components)
    g = np.eye(n)
    if n >= 2:
        S = R.scalar_curvature / (2.0 * n * (n - 1)) * kulkarni_nomizu(g, g)
    else:
        S = np.zeros_like(comps)
    if n >= 3:
        Z = R.ricci - R.scalar_curvature / n * g
        T = kulkarni_nomizu(Z, g) / (n - 2)
    else:
        T = np.zeros_like(comps)
    W = comps - S - T
    parts = {}
    for name, arr in (("scalar", S), ("traceless_ricci", T), ("weyl", W)):
        parts[name] = CurvatureTensor(n, _op2_from_components(n, arr), f"{R.label}:{name}")
    norms = {name: float(np.linalg.norm(part.components)) for name, part in parts.items()}
    return CurvatureDecomposition(parts["scalar"], parts["traceless_ricci"], parts["weyl"], norms)


def bianchi_residual(R: Union[CurvatureTensor, np.ndarray], n: Optional[int] = None) -> float:
    """Plus grande composante de la somme cyclique ; accepte un tenseur ou un op2 brut."""
    if isinstance(R, CurvatureTensor):
        return float(np.max(np.abs(bianchi_map(np.array(R.components))), initial=0.0))
    op2 = np.asarray(R, dtype=float)
    if n is None:
        raise ValidationError("bianchi_residual sur un op2 brut exige n")
    return float(np.max(np.abs(bianchi_map(_components_from_op2(n, op2))), initial=0.0))


def project_bianchi(n: int, op2) -> np.ndarray:
    """Projection orthogonale d'un op2 symétrique sur le noyau de l'antisymétrisation de Bianchi."""
    op2 = np.asarray(op2, dtype=float)
    op2 = 0.5 * (op2 + op2.T)
    comps = _components_from_op2(n, op2)
    return _op2_from_components(n, comps - bianchi_map(comps) / 3.0)


def random_curvature(n: int, seed: int) -> CurvatureTensor:
    """Tenseur aléatoire reproductible : op2 symétrique gaussien projeté sur Bianchi."""
    if n < 2:
        raise ValidationError(f"random_curvature exige n >= 2 (reçu {n})")
    rng = np.random.default_rng(seed)
    size = dim_forms(n, 2)
    raw = rng.standard_normal((size, size))
    op2 = project_bianchi(n, raw)
    return CurvatureTensor(n, 0.5 * (op2 + op2.T), f"random:{n}:{seed}")


def weyl_probe_form(n: int, p: int) -> Multivector:
    """β ^ e5 ^ ... ^ e_{p+2} : formes exclues de E₀ pour le tenseur de Weyl plongé (2 <= p <= n-2)."""
    if n < 4 or not 2 <= p <= n - 2:
        raise ValidationError(f"weyl_probe_form défini pour n >= 4 et 2 <= p <= n-2 (reçu n={n}, p={p})")
    _, beta, _ = self_dual_basis()
    probe = Multivector.from_array(n, 2, _embed_form(beta, n))
    if p > 2:
        probe = wedge(probe, blade(n, range(5, p + 3)))
    return probe


def _embed_form(u: Multivector, n: int) -> np.ndarray:
    p = u.grade
    target = blade_index(n, p)
    arr = np.zeros(dim_forms(n, p))
    for b, v in zip(blades(u.n, p), u.component(p)):
        arr[target[b]] = v
    return arr

