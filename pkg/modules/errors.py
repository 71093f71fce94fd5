# modules/errors.py
"""
Hiérarchie d'erreurs du projet.
Chaque classe porte le code de sortie utilisé par la CLI (0 succès, 1 incohérence, 2 entrée invalide).
"""


class KillingFormsError(Exception):
    """Erreur racine du projet."""
    exit_code = 1


class ValidationError(KillingFormsError, ValueError):
    """Données d'entrée invalides (tenseur, fichier, degré, structure complexe...)."""
    exit_code = 2


class DimensionMismatchError(ValidationError):
    """Opérandes définis sur des espaces de dimensions différentes."""


class DegreeError(ValidationError):
    """Degré de forme hors de l'intervalle admissible."""


class PreconditionError(KillingFormsError):
    """Hypothèse d'un énoncé non satisfaite (sous-espace non invariant, etc.)."""


class ConvergenceError(KillingFormsError):
    """L'itération (E_k, F_k) n'a pas stationné avant le plafond."""


class CheckSkipped(KillingFormsError):
    """Vérification non applicable : statut distinct, jamais compté comme échec."""
    exit_code = 0

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason
