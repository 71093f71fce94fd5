# modules/settings.py
"""
Configuration globale : valeurs par défaut, puis config.json, puis variables d'environnement.
Le fichier .env éventuel est chargé via python-dotenv.
"""
import json
import logging
import os
from typing import Any, Callable, Dict, Optional, Tuple

from dotenv import load_dotenv

logger = logging.getLogger("killing-forms.settings")

load_dotenv()

CONFIG_FILE = os.path.join(os.path.dirname(__file__), "..", "config.json")

DEFAULT_SETTINGS: Dict[str, Any] = {
    "max_dimension": 10,
    "identity_tol": 1e-8,
    "rank_rtol": 1e-9,
    "symmetry_tol": 1e-10,
    "sample_count": 32,
    "seed": 0,
    "sweep_workers": 4,
    "log_level": "INFO",
    "catalog": [],
}

# clé -> (variable d'environnement, conversion)
ENV_OVERRIDES: Dict[str, Tuple[str, Callable[[str], Any]]] = {
    "max_dimension": ("KILLING_MAX_DIMENSION", int),
    "identity_tol": ("KILLING_IDENTITY_TOL", float),
    "rank_rtol": ("KILLING_RANK_RTOL", float),
    "symmetry_tol": ("KILLING_SYMMETRY_TOL", float),
    "sample_count": ("KILLING_SAMPLE_COUNT", int),
    "seed": ("KILLING_SEED", int),
    "sweep_workers": ("KILLING_SWEEP_WORKERS", int),
    "log_level": ("LOG_LEVEL", str),
}


def load_settings(config_file: Optional[str] = None) -> Dict[str, Any]:
    """
    Charge la configuration : défauts <- config.json <- environnement.
    Un fichier ou une variable mal formés sont signalés puis ignorés.
    """
    path = config_file or CONFIG_FILE
    config = dict(DEFAULT_SETTINGS)

    try:
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as f:
                config = {**config, **json.load(f)}
    except Exception as e:
        logger.error("Erreur chargement config %s: %s", path, e)
        config = dict(DEFAULT_SETTINGS)

    for key, (env_name, cast) in ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw is None or raw == "":
            continue
        try:
            config[key] = cast(raw)
        except ValueError:
            logger.warning("⚠️ Variable %s ignorée (valeur invalide: %r)", env_name, raw)

    return config


# Instance globale
settings = load_settings()
