# modules/metrics.py
"""
Balayage du catalogue : classification de chaque modèle pour 2 <= p <= n-2,
puis agrégation (comptes par branche, pires résidus).
"""
import logging
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from modules.curvature_models import CurvatureTensor
from modules.errors import KillingFormsError
from modules.killing_classifier import BRANCHES, INCONSISTENT, classify
from modules.settings import settings

logger = logging.getLogger("killing-forms.metrics")


def sweep_jobs(models: Sequence[CurvatureTensor]) -> List[Tuple[CurvatureTensor, int]]:
    return [(R, p) for R in models for p in range(2, R.n - 1)]


def _classify_job(R: CurvatureTensor, p: int) -> Dict[str, Any]:
    try:
        return classify(R, p).to_dict()
    except KillingFormsError as e:
        logger.exception("❌ Classification impossible pour %s (p=%d)", R.label, p)
        return {"model": R.label, "n": R.n, "p": p, "error": str(e), "code": e.exit_code}
    except (np.linalg.LinAlgError, ValueError, FloatingPointError) as e:
        logger.exception("❌ Échec numérique pour %s (p=%d)", R.label, p)
        return {"model": R.label, "n": R.n, "p": p, "error": f"{type(e).__name__}: {e}", "code": 1}


def run_sweep(models: Sequence[CurvatureTensor], workers: Optional[int] = None) -> List[Dict[str, Any]]:
    """Classe chaque (modèle, p) dans un pool de threads ; ordre de sortie déterministe."""
    workers = settings["sweep_workers"] if workers is None else workers
    jobs = sweep_jobs(models)
    logger.info("Balayage: %d modèles, %d classifications, %d workers", len(models), len(jobs), workers)
    results: Dict[int, Dict[str, Any]] = {}
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = {pool.submit(_classify_job, R, p): k for k, (R, p) in enumerate(jobs)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return [results[k] for k in range(len(jobs))]


def summarize_reports(reports: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    branch_counter = Counter({b: 0 for b in BRANCHES})
    worst = defaultdict(float)
    by_model = defaultdict(dict)
    errors = []

    for r in reports:
        if "error" in r:
            errors.append({"model": r["model"], "p": r["p"], "error": r["error"]})
            continue
        branch_counter[r["branch"]] += 1
        by_model[r["model"]][str(r["p"])] = r["branch"]
        for name, value in r.get("residuals", {}).items():
            if name == "r_plus_on_E":
                continue
            worst[name] = max(worst[name], float(value))

    return {
        "total": len(reports),
        "branches": dict(branch_counter),
        "worst_residuals": dict(worst),
        "by_model": dict(by_model),
        "inconsistent": [f"{r['model']}:p={r['p']}" for r in reports if r.get("branch") == INCONSISTENT],
        "errors": errors,
    }
