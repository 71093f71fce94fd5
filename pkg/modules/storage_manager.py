# modules/storage_manager.py
"""
Entrées/sorties JSON : fichiers de courbure en entrée, rapports en sortie.
Format de courbure : {"n": int, "entries": [{"i", "j", "k", "l", "value"}, ...]}.
"""
import json
import logging
import os
from typing import Any, Dict, Optional

from modules.curvature_models import CurvatureTensor, from_components
from modules.errors import ValidationError

logger = logging.getLogger("killing-forms.storage")


def load_curvature_file(path: str, label: Optional[str] = None) -> CurvatureTensor:
    """Charge et valide un tenseur ; toute anomalie devient une ValidationError."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"Fichier introuvable: {path}")
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"Fichier de courbure illisible {path}: {e}")

    if not isinstance(data, dict) or "n" not in data:
        raise ValidationError(f"{path}: objet JSON avec une clé 'n' attendu")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValidationError(f"{path}: 'n' doit être un entier positif (reçu {n!r})")
    entries = data.get("entries", [])
    if not isinstance(entries, list):
        raise ValidationError(f"{path}: 'entries' doit être une liste")

    R = from_components(n, entries, label=label or f"file:{os.path.basename(path)}")
    logger.info("✅ Tenseur chargé depuis %s (n=%d, %d entrées)", path, n, len(entries))
    return R


def dump_curvature(R: CurvatureTensor) -> Dict[str, Any]:
    return {
        "n": R.n,
        "entries": [{"i": i, "j": j, "k": k, "l": l, "value": v} for i, j, k, l, v in R.entries()],
    }


def save_curvature_file(R: CurvatureTensor, path: str) -> None:
    _write_json(dump_curvature(R), path)


def save_report(report: Dict[str, Any], path: str) -> None:
    _write_json(report, path)
    logger.info("Rapport écrit dans %s", path)


def _write_json(payload: Dict[str, Any], path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=False, indent=2)
    except OSError as e:
        logger.error("❌ Erreur écriture %s: %s", path, e)
        raise
