"""``discordq`` command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error,
3 scan finished with at least one failed row.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import marker
from .covariance import CovarianceMatrix, GaussianParams, standard_form_reduce, validate_covariance
from .errors import DiscordQError
from .fock import (
    FockState,
    fock_photon_number_mixed,
    fock_q,
    fock_squeezed_thermal,
    photon_added_matching_wigner,
)
from .marker import DEFAULT_THRESHOLD, QReport, classify

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2, 3
FAMILIES = ("squeezed-thermal", "photon-mixed", "gaussian-vacuum-mix", "photon-added")
METHODS = ("closed", "general", "fock", "all")
METHOD_KEYS = {"closed": "ClosedGaussian", "general": "GeneralWigner", "fock": "FockOracle"}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    method: str = "closed"
    threshold: float = DEFAULT_THRESHOLD
    fock_dim: int = 16
    output: str = "human"
    out_path: str | None = None

    def __post_init__(self):
        if not self.threshold > 0:
            raise UsageError("--threshold must be > 0")
        if self.fock_dim < 4:
            raise UsageError("--fock-dim must be >= 4")
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}")

    def methods(self) -> list[str]:
        return ["closed", "general", "fock"] if self.method == "all" else [self.method]


# formatting


def fmt(x, digits: int = 17) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, f".{digits}g")


def to_json(obj, indent: int = 0) -> str:
    """JSON text with every float written at 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json_str(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, str):
        return _json_str(obj)
    return fmt(obj)


def _json_str(s: str) -> str:
    import json

    return json.dumps(s)


def _emit(cfg: RunConfig, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out_path:
        Path(cfg.out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _report_entry(rep: QReport, threshold: float) -> dict:
    d = rep.to_dict()
    d["verdict"] = classify(rep.q, threshold).verdict.value
    return d


def _render_reports(cfg: RunConfig, header: dict, entries: list[dict], extra: dict | None = None) -> str:
    if cfg.output == "json":
        return to_json({**header, "reports": entries, **(extra or {})})
    if cfg.output == "csv":
        buf = io.StringIO()
        buf.write("method,q,term1,term2,verdict,error\n")
        for e in entries:
            if "error" in e:
                buf.write(f"{e['method']},,,,,{_csv_field(e['error'])}\n")
            else:
                buf.write(f"{e['method']},{fmt(e['q'])},{fmt(e['term1'])},{fmt(e['term2'])},{e['verdict']},\n")
        return buf.getvalue()
    lines = [", ".join(f"{k}={_human(v)}" for k, v in header.items())]
    for e in entries:
        if "error" in e:
            lines.append(f"  {e['method']:<15} error: {e['error']}")
        else:
            lines.append(
                f"  {e['method']:<15} Q = {fmt(e['q'], 6):<14} term1 = {fmt(e['term1'], 6):<12}"
                f" term2 = {fmt(e['term2'], 6):<12} verdict: {e['verdict']}"
            )
    for k, v in (extra or {}).items():
        if isinstance(v, dict):
            for kk, vv in v.items():
                lines.append(f"  {k} {kk}: {_human(vv)}")
        else:
            lines.append(f"  {k}: {_human(v)}")
    return "\n".join(lines)


def _human(v) -> str:
    if isinstance(v, float):
        return fmt(v, 6)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_human(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_human(x) for x in v) + "]"
    return str(v)


def _csv_field(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


# commands


def cmd_gaussian(args, cfg: RunConfig) -> int:
    p = GaussianParams(args.a, args.b, args.c1, args.c2)
    bad = p.violations()
    if bad:
        raise UsageError("invalid parameters: " + "; ".join(bad))
    entries = []
    for method in cfg.methods():
        if method == "fock":
            if cfg.method == "fock":
                raise UsageError("the Fock oracle is only available for the named state families")
            continue
        if method == "closed":
            rep = marker.q_gaussian_closed(p)
        else:
            from .wigner import wigner_of_gaussian

            rep = marker.q_general(wigner_of_gaussian(p))
        entries.append(_report_entry(rep, cfg.threshold))
    header = {
        "params": {"a": p.a, "b": p.b, "c1": p.c1, "c2": p.c2},
        "physical": validate_covariance(p.matrix()).ok,
        "threshold": cfg.threshold,
    }
    extra = {"deltas": _deltas(entries)} if len(entries) > 1 else None
    _emit(cfg, _render_reports(cfg, header, entries, extra))
    return EXIT_OK


def _family_params(name: str, args) -> dict:
    def need(flag):
        val = getattr(args, flag)
        if val is None:
            raise UsageError(f"family {name} needs --{flag}")
        return val

    if name in ("squeezed-thermal", "photon-added"):
        n, r = args.n if args.n is not None else 0.0, args.r if args.r is not None else 0.0
        if n < 0:
            raise UsageError("n must be >= 0")
        return {"n": n, "r": r}
    k = need("k")
    if not 0 <= k <= 1:
        raise UsageError("k must lie in [0, 1]")
    if name == "photon-mixed":
        return {"k": k}
    if args.a is not None or args.b is not None or args.c is not None:
        return {"k": k, "a": need("a"), "b": need("b"), "c": need("c")}
    n, r = args.n if args.n is not None else 0.0, args.r if args.r is not None else 0.0
    if n < 0:
        raise UsageError("n must be >= 0")
    return {"k": k, "n": n, "r": r}


def _gaussian_of(params: dict) -> GaussianParams:
    if "a" in params:
        c = params["c"]
        return GaussianParams(params["a"], params["b"], c, -c)
    return GaussianParams.squeezed_thermal(params["n"], params["r"])


def family_state(name: str, params: dict):
    from . import wigner

    if name == "squeezed-thermal":
        return wigner.make_squeezed_thermal(params["n"], params["r"])
    if name == "photon-mixed":
        return wigner.make_photon_number_mixed(params["k"])
    if name == "gaussian-vacuum-mix":
        return wigner.make_gaussian_vacuum_mixture(params["k"], _gaussian_of(params))
    if name == "photon-added":
        return wigner.make_photon_added_squeezed_thermal(params["n"], params["r"])
    raise UsageError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")


def family_closed(name: str, params: dict) -> QReport:
    """Closed forms; only ``q`` is known for the non-Gaussian families."""
    if name == "squeezed-thermal":
        return marker.q_gaussian_closed(GaussianParams.squeezed_thermal(params["n"], params["r"]))
    if name == "photon-mixed":
        q = marker.q_photon_mixed_closed(params["k"])
    elif name == "gaussian-vacuum-mix":
        q = marker.q_mixture_closed(params["k"], _gaussian_of(params))
    elif params["n"] == 0:
        q = marker.q_photon_added_n0(params["r"])
    else:
        raise UsageError("the photon-added closed form is only known for n = 0")
    return QReport(q, float("nan"), float("nan"), marker.Method.CLOSED_GAUSSIAN, {"closed_form": name})


def family_fock(name: str, params: dict, dim: int) -> QReport:
    if name == "squeezed-thermal":
        s = fock_squeezed_thermal(params["n"], params["r"], dim)
    elif name == "photon-mixed":
        s = fock_photon_number_mixed(params["k"])
    elif name == "photon-added":
        s, mode = photon_added_matching_wigner(params["n"], params["r"], dim)
    elif "a" in params:
        raise UsageError("the Fock form of gaussian-vacuum-mix needs squeezed-thermal --n/--r parameters")
    else:
        g = fock_squeezed_thermal(params["n"], params["r"], dim)
        vac = np.zeros(dim * dim)
        vac[0] = 1.0
        k = params["k"]
        s = FockState(k * g.rho + (1 - k) * np.outer(vac, vac), dim, dim, g.deficit)
    return fock_q(s)


def _deltas(entries: list[dict]) -> dict:
    ok = [e for e in entries if "error" not in e]
    out = {}
    for i, e1 in enumerate(ok):
        for e2 in ok[i + 1 :]:
            out[f"{e1['method']}-{e2['method']}"] = e1["q"] - e2["q"]
    return out


def cmd_family(args, cfg: RunConfig) -> int:
    name = args.name
    if name not in FAMILIES:
        raise UsageError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    params = _family_params(name, args)
    try:
        state = family_state(name, params)
    except (ValueError, DiscordQError) as exc:
        raise UsageError(str(exc)) from exc
    entries = []
    for method in cfg.methods():
        try:
            if method == "closed":
                rep = family_closed(name, params)
            elif method == "general":
                rep = marker.q_general(state)
            else:
                rep = family_fock(name, params, cfg.fock_dim)
        except (UsageError, DiscordQError, ValueError) as exc:
            if cfg.method != "all":
                raise UsageError(str(exc)) from exc
            entries.append({"method": METHOD_KEYS[method], "error": str(exc)})
            continue
        entries.append(_report_entry(rep, cfg.threshold))
    header = {"family": name, "params": params, "threshold": cfg.threshold}
    extra = {"deltas": _deltas(entries)} if cfg.method == "all" else None
    _emit(cfg, _render_reports(cfg, header, entries, extra))
    return EXIT_OK


def cmd_reduce(args, cfg: RunConfig) -> int:
    try:
        cov = CovarianceMatrix.from_json(Path(args.cov_file).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read covariance file: {exc}") from exc
    verdict = validate_covariance(cov)
    if not verdict.ok:
        raise UsageError(f"covariance matrix rejected: {verdict}")
    try:
        p = standard_form_reduce(cov)
    except DiscordQError as exc:
        raise UsageError(str(exc)) from exc
    data = {
        "params": {"a": p.a, "b": p.b, "c1": p.c1, "c2": p.c2},
        "validation": {"ok": True, "violations": [], "min_eigenvalue": verdict.min_eigenvalue},
    }
    if cfg.output == "json":
        text = to_json(data)
    elif cfg.output == "csv":
        text = f"a,b,c1,c2\n{fmt(p.a)},{fmt(p.b)},{fmt(p.c1)},{fmt(p.c2)}\n"
    else:
        text = (
            f"a = {fmt(p.a, 6)}, b = {fmt(p.b, 6)}, c1 = {fmt(p.c1, 6)}, c2 = {fmt(p.c2, 6)}\n"
            f"physical: yes (min eigenvalue of V + i*Omega/4: {fmt(verdict.min_eigenvalue, 6)})"
        )
    _emit(cfg, text)
    return EXIT_OK


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` with inclusive endpoints."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"malformed grid {text!r}; expected start:stop:count")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise UsageError(f"malformed grid {text!r}: {exc}") from exc
    if count < 1 or not (math.isfinite(start) and math.isfinite(stop)):
        raise UsageError(f"malformed grid {text!r}; count must be >= 1")
    if count == 1:
        if start != stop:
            raise UsageError(f"grid {text!r} has one point but distinct endpoints")
        return np.array([start])
    return np.linspace(start, stop, count)


SCAN_FAMILIES = {
    "photon-added": "make_photon_added_squeezed_thermal",
    "squeezed-thermal": "make_squeezed_thermal",
}


def cmd_scan(args, cfg: RunConfig) -> int:
    if args.family not in SCAN_FAMILIES:
        raise UsageError(f"scan supports families {', '.join(SCAN_FAMILIES)}")
    n_grid = parse_grid(args.n)
    r_grid = parse_grid(args.r)
    if np.any(n_grid < 0):
        raise UsageError("n grid must be >= 0")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if args.family == "photon-added":
        rows = marker.scan_photon_added(n_grid, r_grid, workers=args.workers)
    else:
        rows = marker.scan_family(marker.squeezed_thermal_q, n_grid, r_grid, workers=args.workers)
    if cfg.output == "json":
        text = to_json(
            [{"n": r.n, "r": r.r, "log10_q": r.log10_q, "q": r.q, "status": r.status} for r in rows]
        )
    elif cfg.output == "human":
        lines = [f"{'n':>8} {'r':>8} {'log10 Q':>12}  status"]
        lines += [f"{fmt(r.n, 6):>8} {fmt(r.r, 6):>8} {fmt(r.log10_q, 6):>12}  {r.status}" for r in rows]
        text = "\n".join(lines)
    else:
        buf = io.StringIO()
        buf.write("n,r,log10_q,status\n")
        for r in rows:
            log_q = fmt(r.log10_q) if r.status == "ok" else ""
            status = r.status if r.status == "ok" else _csv_field(r.status)
            buf.write(f"{fmt(r.n)},{fmt(r.r)},{log_q},{status}\n")
        text = buf.getvalue()
    _emit(cfg, text)
    return EXIT_OK if all(r.status == "ok" for r in rows) else EXIT_PARTIAL


def cmd_verify(args, cfg: RunConfig) -> int:
    from .verify import run_checks

    results = run_checks(threshold=cfg.threshold, fock_dim=cfg.fock_dim, quadrature=not args.no_quadrature)
    if cfg.output == "json":
        text = to_json([r.to_dict() for r in results])
    elif cfg.output == "csv":
        text = "check,passed,seconds,detail\n" + "".join(
            f"{r.name},{fmt(r.passed)},{fmt(r.seconds, 6)},{_csv_field(r.detail)}\n" for r in results
        )
    else:
        width = max(len(r.name) for r in results)
        lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}" for r in results]
        failed = [r.name for r in results if not r.passed]
        lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
        text = "\n".join(lines)
    _emit(cfg, text)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("failing checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--method", choices=METHODS, default=None)
    common.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD, help="zero-verdict threshold on Q")
    common.add_argument("--fock-dim", type=int, default=16, help="Fock truncation per mode")
    common.add_argument("--output", choices=("human", "json", "csv"), default=None)
    common.add_argument("--out", dest="out_path", default=None, help="write output to this file")

    parser = argparse.ArgumentParser(prog="discordq", description="Nonzero-discord marker Q for two-mode CV states")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gaussian", parents=[common], help="Q of a standard-form Gaussian state")
    for flag in ("a", "b", "c1", "c2"):
        g.add_argument(f"--{flag}", type=float, required=True)
    g.set_defaults(func=cmd_gaussian, default_method="closed")

    f = sub.add_parser("family", parents=[common], help="Q of a named state family")
    f.add_argument("name", help=" | ".join(FAMILIES))
    for flag in ("n", "r", "k", "a", "b", "c"):
        f.add_argument(f"--{flag}", type=float, default=None)
    f.set_defaults(func=cmd_family, default_method="general")

    r = sub.add_parser("reduce", parents=[common], help="standard form of a covariance matrix JSON file")
    r.add_argument("cov_file")
    r.set_defaults(func=cmd_reduce, default_method="closed")

    s = sub.add_parser("scan", parents=[common], help="log10 Q over an (n, r) grid as CSV")
    s.add_argument("--family", default="photon-added")
    s.add_argument("--n", default="0:1:11", help="start:stop:count")
    s.add_argument("--r", default="0:1:11", help="start:stop:count")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_scan, default_method="general", default_output="csv")

    v = sub.add_parser("verify", parents=[common], help="run the cross-evaluator acceptance checks")
    v.add_argument("--no-quadrature", action="store_true", help="skip the numerical-quadrature cross-check")
    v.set_defaults(func=cmd_verify, default_method="all")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = RunConfig(
            method=args.method or args.default_method,
            threshold=args.threshold,
            fock_dim=args.fock_dim,
            output=args.output or getattr(args, "default_output", "human"),
            out_path=args.out_path,
        )
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"discordq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
