# modules/cli.py
"""
Interface en ligne de commande : catalogue, vérification, classification,
démonstration du tenseur de Weyl en dimension 4, balayage du catalogue.
Codes de sortie : 0 succès, 1 incohérence, 2 entrée invalide.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from modules import curvature_models as cm
from modules.curvature_models import CurvatureTensor
from modules.errors import KillingFormsError, ValidationError
from modules.exterior_core import Multivector, basis_vector, contract, self_dual_basis, volume_form
from modules.form_operators import SkewEndo, curv_action, k1_defect, r_plus
from modules.killing_classifier import INCONSISTENT, classify, e0, verify
from modules.metrics import run_sweep, summarize_reports
from modules.settings import settings
from modules.storage_manager import load_curvature_file, save_report

logger = logging.getLogger("killing-forms.cli")

MODEL_KINDS = {
    "sphere": "sphere n kappa  (courbure constante kappa, défaut 1)",
    "flat": "flat n",
    "cpn": "cpn m  (Fubini-Study, n = 2m)",
    "product": "product --factor A --factor B  (ex: sphere:2:1, cpn:1, flat:3, weyl4)",
    "weyl4": "weyl4 [n]  (tenseur de Weyl auto-dual, prolongé trivialement en dimension n)",
    "random": "random n seed  (tenseur aléatoire projeté sur Bianchi)",
    "file": "file <path>  (JSON {n, entries})",
}


@dataclass
class ModelSpec:
    kind: str
    n: Optional[int] = None
    kappa: float = 1.0
    m: Optional[int] = None
    factors: List[str] = field(default_factory=list)
    path: Optional[str] = None
    seed: int = 0

    @classmethod
    def from_string(cls, text: str) -> "ModelSpec":
        """Forme compacte "kind:arg1:arg2" (ex: sphere:2:1, cpn:1, flat:3, weyl4, weyl4:6, random:4:7)."""
        kind, *args = text.strip().split(":")
        try:
            if kind == "sphere":
                return cls(kind, n=int(args[0]), kappa=float(args[1]) if len(args) > 1 else 1.0)
            if kind == "flat":
                return cls(kind, n=int(args[0]))
            if kind == "cpn":
                return cls(kind, m=int(args[0]))
            if kind == "weyl4":
                return cls(kind, n=int(args[0]) if args else None)
            if kind == "random":
                return cls(kind, n=int(args[0]), seed=int(args[1]) if len(args) > 1 else 0)
            if kind == "file":
                return cls(kind, path=":".join(args))
        except (IndexError, ValueError):
            raise ValidationError(f"Spécification de modèle invalide: {text!r}")
        raise ValidationError(f"Type de modèle inconnu: {kind!r}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise ValidationError(f"Entrée de catalogue invalide: {data!r}")
        known = {"kind", "n", "kappa", "m", "factors", "path", "seed"}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"Clés inconnues dans le catalogue: {sorted(unknown)}")
        return cls(**data)

    def resolve(self) -> CurvatureTensor:
        kind = self.kind
        if kind == "sphere":
            return cm.constant_curvature(self._need("n"), self.kappa)
        if kind == "flat":
            return cm.flat(self._need("n"))
        if kind == "cpn":
            return cm.fubini_study(self._need("m"))
        if kind == "weyl4":
            R = cm.self_dual_weyl4()
            return R if self.n is None else cm.embed_trivial(R, self.n)
        if kind == "random":
            return cm.random_curvature(self._need("n"), self.seed)
        if kind == "product":
            if len(self.factors) != 2:
                raise ValidationError("product attend exactement deux --factor")
            left, right = (ModelSpec.from_string(f).resolve() for f in self.factors)
            return cm.product(left, right)
        if kind == "file":
            if not self.path:
                raise ValidationError("file attend --path")
            return load_curvature_file(self.path)
        raise ValidationError(f"Type de modèle inconnu: {kind!r}")

    def _need(self, name: str) -> int:
        value = getattr(self, name)
        if value is None:
            raise ValidationError(f"Le modèle {self.kind} exige --{name}")
        return value


# ---------------------------------------------------------------------------
# Sortie
# ---------------------------------------------------------------------------

def _table(rows: List[Sequence[Any]], headers: Sequence[str]) -> str:
    cells = [[str(h) for h in headers]] + [[_fmt(c) for c in row] for row in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.3e}"
    return str(value)


def _emit(payload: Dict[str, Any], args, human: Callable[[Dict[str, Any]], str]):
    if getattr(args, "out", None):
        save_report(payload, args.out)
    if getattr(args, "human", False):
        print(human(payload))
    else:
        print(json.dumps(payload, ensure_ascii=False, indent=2))


def _human_report(report: Dict[str, Any]) -> str:
    rows = [("model", report["model"]), ("n", report["n"]), ("p", report["p"]), ("branch", report["branch"])]
    rows += [(f"dim {k}", v) for k, v in report["dims"].items()]
    rows += [(k, v) for k, v in report["flags"].items()]
    rows += [(f"residual {k}", v) for k, v in report["residuals"].items()]
    if "probe" in report:
        rows += [(f"probe {k}", v) for k, v in report["probe"].items()]
    rows.append(("trace", " ".join(f"({k},{e},{f})" for k, e, f in report["trace"])))
    return _table(rows, ("champ", "valeur"))


def _human_checks(payload: Dict[str, Any]) -> str:
    rows = [(c["name"], c.get("p", "-"), c["status"], c.get("residual", c.get("reason", "")))
            for c in payload["checks"]]
    return _table(rows, ("contrôle", "p", "statut", "résidu")) + f"\n\nsuccès: {payload['success']}"


def _human_sweep(payload: Dict[str, Any]) -> str:
    rows = [(r["model"], r["p"], r.get("branch", "ERREUR"), r.get("dims", {}).get("E", "-"))
            for r in payload["reports"]]
    branches = ", ".join(f"{k}={v}" for k, v in payload["summary"]["branches"].items())
    return _table(rows, ("modèle", "p", "branche", "dim E")) + f"\n\n{branches}"


# ---------------------------------------------------------------------------
# Commandes
# ---------------------------------------------------------------------------

def _model_from_args(args) -> ModelSpec:
    if args.model is None:
        raise ValidationError("--model est obligatoire")
    return ModelSpec(kind=args.model, n=args.n, kappa=args.kappa, m=args.m,
                     factors=list(args.factor or []), path=args.path, seed=args.seed)


def _degree(value: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ValidationError(f"Degré invalide: {value!r}")


def cmd_catalog(args) -> int:
    catalog = []
    for entry in settings.get("catalog", []):
        try:
            catalog.append(ModelSpec.from_dict(entry).resolve().label)
        except KillingFormsError as e:
            logger.warning("⚠️ Entrée de catalogue ignorée %r: %s", entry, e)
    payload = {"kinds": MODEL_KINDS, "catalog": catalog}
    if args.human:
        lines = ["Types de modèles :"] + [f"  {spec}" for spec in MODEL_KINDS.values()]
        lines += ["", "Catalogue configuré :"] + [f"  {label}" for label in catalog]
        print("\n".join(lines))
    else:
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    return 0


def cmd_verify(args) -> int:
    R = _model_from_args(args).resolve()
    degrees = None if args.p in (None, "all") else [_degree(args.p)]
    checks = verify(R, degrees=degrees, tol=args.tol, seed=args.seed)
    failed = [c.name if c.p is None else f"{c.name}[p={c.p}]" for c in checks if c.status == "failed"]
    payload = {
        "model": R.label,
        "n": R.n,
        "success": not failed,
        "failed": failed,
        "checks": [c.to_dict() for c in checks],
    }
    _emit(payload, args, _human_checks)
    if failed:
        logger.error("❌ Contrôles en échec: %s", ", ".join(failed))
        return 1
    return 0


def cmd_classify(args) -> int:
    R = _model_from_args(args).resolve()
    if args.p in (None, "all"):
        raise ValidationError("classify exige un degré --p entier")
    report = classify(R, _degree(args.p), tol=args.tol).to_dict()
    _emit(report, args, _human_report)
    return 1 if report["branch"] == INCONSISTENT else 0


def weyl_demo_lines(tol: float = 1e-10) -> List[str]:
    """Transcript de l'exemple en dimension 4 ; chaque contrôle finit par OK ou FAILED."""
    R = cm.self_dual_weyl4()
    alpha, beta, gamma = self_dual_basis()
    omega = volume_form(4)
    J = SkewEndo.from_form(beta)
    e = [basis_vector(4, i) for i in range(1, 5)]

    def status(ok: bool) -> str:
        return "OK" if ok else "FAILED"

    lines = [f"alpha = {_terms(alpha)}", f"beta = {_terms(beta)}", f"gamma = {_terms(gamma)}"]
    all_ok = True
    for i, X in enumerate(e, start=1):
        lhs = r_plus(R, X, beta)
        rhs = contract(J(X), omega)
        ok = lhs.allclose(rhs, atol=tol)
        all_ok &= ok
        lines.append(f"R+(e{i})beta = {_terms(lhs)}   J(e{i}) ⌟ omega = {_terms(rhs)}")
    lines.append(f"R+(X)beta = J(X) ⌟ omega: {status(all_ok)}")

    combo = contract(e[0], r_plus(R, e[1], beta)) - contract(e[1], r_plus(R, e[0], beta))
    checks = [
        ("e1 ⌟ R+(e2)beta - e2 ⌟ R+(e1)beta = gamma", combo, gamma),
        ("R_{e1,e2}beta = -gamma", curv_action(R, e[0], e[1], beta), -gamma),
        ("R_{e1,e4}beta = 0", curv_action(R, e[0], e[3], beta), Multivector.zero(4)),
        ("e1 ⌟ R+(e4)beta - e4 ⌟ R+(e1)beta = -alpha",
         contract(e[0], r_plus(R, e[3], beta)) - contract(e[3], r_plus(R, e[0], beta)), -alpha),
    ]
    for text, lhs, rhs in checks:
        ok = lhs.allclose(rhs, atol=tol)
        all_ok &= ok
        lines.append(f"{text}: {status(ok)}")

    defect = k1_defect(R, beta)
    excluded = e0(R, 2).outside_residual(beta.component(2)) > 1e-8
    ok = defect > 0.5 and excluded
    all_ok &= ok
    lines.append(f"(k1) defect of beta = {defect:.6f}; beta not in E0: {status(ok)}")
    lines.append(f"weyl demo: {status(all_ok)}")
    return lines


def _terms(u: Multivector) -> str:
    terms = u.to_dict(tol=1e-12)
    if not terms:
        return "0"
    return " ".join(f"{v:+g} {k}" for k, v in terms.items())


def cmd_weyl_demo(args) -> int:
    lines = weyl_demo_lines()
    print("\n".join(lines))
    return 0 if lines[-1].endswith("OK") else 1


def cmd_sweep(args) -> int:
    models = [ModelSpec.from_dict(entry).resolve() for entry in settings.get("catalog", [])]
    reports = run_sweep(models, workers=args.workers)
    summary = summarize_reports(reports)
    payload = {"summary": summary, "reports": reports}
    _emit(payload, args, _human_sweep)
    if summary["inconsistent"]:
        logger.error("❌ Rapports incohérents: %s", ", ".join(summary["inconsistent"]))
        return 1
    if summary["errors"]:
        return 1
    return 0


# ---------------------------------------------------------------------------
# Analyse des arguments
# ---------------------------------------------------------------------------

def _add_model_options(parser: argparse.ArgumentParser):
    parser.add_argument("--model", choices=sorted(MODEL_KINDS))
    parser.add_argument("--n", type=int)
    parser.add_argument("--kappa", type=float, default=1.0)
    parser.add_argument("--m", type=int)
    parser.add_argument("--factor", action="append", help="facteur d'un produit (répétable)")
    parser.add_argument("--path")
    parser.add_argument("--p", default=None)
    parser.add_argument("--seed", type=int, default=settings["seed"])
    parser.add_argument("--tol", type=float, default=settings["identity_tol"])


def _add_output_options(parser: argparse.ArgumentParser):
    parser.add_argument("--out", help="écrit aussi le rapport JSON dans ce fichier")
    parser.add_argument("--human", action="store_true", help="tableaux alignés au lieu du JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="killing-forms",
                                     description="Classification des modèles de courbure par le couple (E, F)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_catalog = sub.add_parser("catalog", help="types de modèles et catalogue configuré")
    p_catalog.add_argument("--human", action="store_true")
    p_catalog.set_defaults(func=cmd_catalog)

    p_verify = sub.add_parser("verify", help="suite d'identités sur un modèle")
    _add_model_options(p_verify)
    _add_output_options(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_classify = sub.add_parser("classify", help="classification pour un degré p")
    _add_model_options(p_classify)
    _add_output_options(p_classify)
    p_classify.set_defaults(func=cmd_classify)

    p_demo = sub.add_parser("weyl-demo", help="exemple du tenseur de Weyl en dimension 4")
    p_demo.set_defaults(func=cmd_weyl_demo)

    p_sweep = sub.add_parser("sweep", help="classification de tout le catalogue")
    p_sweep.add_argument("--workers", type=int, default=settings["sweep_workers"])
    _add_output_options(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        return args.func(args)
    except KillingFormsError as e:
        logger.exception("❌ Commande %s interrompue: %s", args.command, e)
        print(json.dumps({"success": False, "error": str(e), "code": e.exit_code}, ensure_ascii=False))
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
