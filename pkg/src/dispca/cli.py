"""Command-line harness for the full pipeline.

Subcommands: ingest, synth, gd-sweep, min-r, cost-table, roc, scree. Every
output file is CSV (or JSON) with a provenance comment carrying the tool
version and a hash of the effective configuration; reruns with identical
inputs produce byte-identical files. Exit codes: 0 success, 1 usage error,
2 data/config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, commcost, simnet
from .detection import equal_error_rate, make_ground_truth, roc_curve
from .errors import DispcaError, InvalidConfigError, SvdConvergenceError
from .ingest import build_histogram_matrix, read_records, write_records_csv
from .matrix import DataMatrix, center_columns, load_csv, zscore_columns
from .pca import fit_pca, scree, select_dimension
from .simnet import run_protocol, sweep_min_r
from .synth import SynthConfig, synth_traffic

_MODE_NAMES = {"hor": ("horizontal",), "ver": ("vertical",), "both": ("horizontal", "vertical")}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; this harness reserves 2 for
    # data errors and reports usage problems as exit 1
    def error(self, message):
        raise _UsageError(message)


def _int_list(text: str) -> list[int]:
    """Parse '2,4' and inclusive ranges 'a:b' (mixable: '1:4,8')."""
    out: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            raise ValueError("empty item in integer list")
        if ":" in token:
            lo_text, hi_text = token.split(":", 1)
            lo, hi = int(lo_text), int(hi_text)
            if hi < lo:
                raise ValueError(f"descending range {token!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(token))
    return sorted(set(out))


def _float_list(text: str) -> list[float]:
    return [float(token) for token in text.split(",") if token.strip()]


def _config_digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def _provenance(args_obj) -> str:
    return f"# dispca {__version__} config={_config_digest(args_obj)}"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _write_csv(path: Path, provenance: str, header: list[str], rows) -> None:
    lines = [provenance, ",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_synth_config(args) -> SynthConfig:
    with open(args.synth_config, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if getattr(args, "seed", None) is not None:
        if not isinstance(obj, dict):
            raise InvalidConfigError("synth config must be a JSON object")
        obj = dict(obj, seed=args.seed)
    return SynthConfig.from_dict(obj)


def _load_matrix(args) -> tuple[DataMatrix, dict]:
    """Feature matrix for an experiment command, from a file or the generator."""
    if getattr(args, "input", None):
        m = load_csv(args.input)
        return m, {"input": str(args.input)}
    if getattr(args, "synth_config", None):
        cfg = _load_synth_config(args)
        records, _ = synth_traffic(cfg)
        hist = build_histogram_matrix(records, top_k=args.top_k)
        return hist.matrix, {"synth": cfg.to_dict(), "top_k": args.top_k}
    raise _UsageError("one of --input or --synth-config is required")


def _normalize(matrix: DataMatrix, how: str) -> np.ndarray:
    if how == "zscore":
        return zscore_columns(matrix)[0].values
    return center_columns(matrix)[0].values


def _resolve_k(x_norm: np.ndarray, args) -> int:
    if getattr(args, "k", None) is not None:
        if args.k < 1:
            raise InvalidConfigError(f"k must be >= 1, got {args.k}")
        return args.k
    model = fit_pca(x_norm)
    return select_dimension(model, args.var_threshold)


def _add_data_opts(p: _Parser, top_k_default: int = 300) -> None:
    p.add_argument("--input", help="feature matrix CSV (ingest output)")
    p.add_argument("--synth-config", help="generator config JSON")
    p.add_argument("--seed", type=int, default=None, help="override generator seed")
    p.add_argument("--top-k", type=int, default=top_k_default, help="retained domains for --synth-config")
    p.add_argument(
        "--normalize",
        choices=("center", "zscore"),
        default="zscore",
        help="column normalization before PCA (default zscore)",
    )


def _add_model_opts(p: _Parser) -> None:
    p.add_argument("--k", type=int, default=None, help="principal subspace dimension")
    p.add_argument(
        "--var-threshold",
        type=float,
        default=0.92,
        help="variance fraction picking k when --k is absent (default 0.92)",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="dispca", description="distributed PCA anomaly-detection toolkit")
    parser.add_argument("--version", action="version", version=f"dispca {__version__}")
    sub = parser.add_subparsers(dest="cmd", metavar="COMMAND")

    p = sub.add_parser("synth", help="generate synthetic DNS traffic records")
    p.add_argument("--synth-config", required=True, help="generator config JSON")
    p.add_argument("--seed", type=int, default=None, help="override generator seed")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("ingest", help="aggregate records into the histogram matrix")
    p.add_argument("--input", required=True, help="records CSV (optionally .gz)")
    p.add_argument("--top-k", type=int, default=300, help="retained domains (default 300)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("scree", help="per-rank variance of the centralized model")
    _add_data_opts(p)
    p.add_argument("--var-threshold", type=float, default=0.92)
    p.add_argument("--out", required=True)

    p = sub.add_parser("gd-sweep", help="subspace distance vs per-monitor rank")
    _add_data_opts(p)
    _add_model_opts(p)
    p.add_argument("--mode", choices=("hor", "ver", "both"), default="both")
    p.add_argument("--s", type=_int_list, default=[4], help="monitor counts, e.g. 2,4 or 2:8")
    p.add_argument("--r", type=_int_list, default=list(range(1, 21)), help="per-monitor ranks")
    p.add_argument("--parallel", action="store_true", help="summarize monitors concurrently")
    p.add_argument("--out", required=True)

    p = sub.add_parser("min-r", help="least rank meeting a distance budget")
    _add_data_opts(p)
    _add_model_opts(p)
    p.add_argument("--mode", choices=("hor", "ver", "both"), default="both")
    p.add_argument("--s", type=_int_list, default=[2, 4, 8])
    p.add_argument("--d-star", type=_float_list, required=True, help="distance budgets, e.g. 0.1,0.05")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("cost-table", help="closed-form uplink cost grid")
    _add_data_opts(p)
    p.add_argument("--s", type=_int_list, default=[2, 4, 8])
    p.add_argument("--r", type=_int_list, default=list(range(1, 41)))
    p.add_argument("--out", required=True)

    p = sub.add_parser("roc", help="detection quality of distributed vs centralized scores")
    _add_data_opts(p)
    _add_model_opts(p)
    p.add_argument("--mode", choices=("hor", "ver", "both"), default="both")
    p.add_argument("--s", type=int, default=4, help="monitor count (single value)")
    p.add_argument("--r", type=_int_list, default=[10, 20, 40])
    p.add_argument("--truth-pct", type=_float_list, default=[0.01, 0.05, 0.1])
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--out", required=True)

    return parser


def cmd_synth(args) -> int:
    cfg = _load_synth_config(args)
    records, truth = synth_traffic(cfg)
    out = _out_dir(args)
    provenance = _provenance(cfg.to_dict())
    with open(out / "records.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(provenance + "\n")
        write_records_csv(records, fh)
    _write_json(
        out / "truth.json",
        {
            "config": cfg.to_dict(),
            "anomaly_bins": list(truth.anomaly_bins),
            "spike_bins": list(truth.spike_bins),
            "bin_counts": truth.bin_counts.tolist(),
        },
    )
    print(f"records={len(records)} bins={cfg.duration_seconds} out={out}")
    return 0


def cmd_ingest(args) -> int:
    parsed = read_records(args.input)
    hist = build_histogram_matrix(parsed.records, top_k=args.top_k)
    out = _out_dir(args)
    provenance = _provenance({"input": str(args.input), "top_k": args.top_k})
    _write_csv(out / "matrix.csv", provenance, list(hist.matrix.col_names), hist.matrix.values)
    meta = hist.meta_dict()
    meta["records"] = len(parsed.records)
    meta["malformed"] = parsed.malformed
    _write_json(out / "meta.json", meta)
    fractions = [b.fraction for b in hist.per_bin]
    print(
        f"records={len(parsed.records)} malformed={parsed.malformed} "
        f"bins={hist.n_bins} domains={len(hist.domains)} "
        f"fraction_min={min(fractions)!r} fraction_mean={sum(fractions) / len(fractions)!r}"
    )
    return 0


def cmd_scree(args) -> int:
    matrix, source = _load_matrix(args)
    x_norm = _normalize(matrix, args.normalize)
    model = fit_pca(x_norm)
    rows = scree(model)
    k = select_dimension(model, args.var_threshold)
    out = _out_dir(args)
    provenance = _provenance({"source": source, "normalize": args.normalize})
    _write_csv(
        out / "scree.csv",
        provenance,
        ["rank", "variance", "cumulative_fraction"],
        ([row.rank, row.variance, row.cumulative_fraction] for row in rows),
    )
    print(f"ranks={len(rows)} k_at_{args.var_threshold}={k}")
    return 0


def cmd_gd_sweep(args) -> int:
    matrix, source = _load_matrix(args)
    x_norm = _normalize(matrix, args.normalize)
    k = _resolve_k(x_norm, args)
    m, n = matrix.m, matrix.n
    rows = []
    for mode in _MODE_NAMES[args.mode]:
        for s in args.s:
            r_hi = simnet.max_feasible_r(matrix.values, mode, s)
            for r in args.r:
                if r > r_hi or s * r < k or (mode == "vertical" and min(s * r, m) < k):
                    continue
                run = run_protocol(
                    matrix.values, mode, s, r, k, normalize=args.normalize, parallel=args.parallel
                )
                rows.append([mode, s, r, run.gd_to_centralized, run.values_sent / (m * n)])
    out = _out_dir(args)
    provenance = _provenance(
        {"source": source, "normalize": args.normalize, "k": k, "s": args.s, "r": args.r}
    )
    _write_csv(out / "gd_sweep.csv", provenance, ["mode", "s", "r", "gd", "normalized_cost"], rows)
    print(f"rows={len(rows)} k={k}")
    return 0


def cmd_min_r(args) -> int:
    matrix, source = _load_matrix(args)
    x_norm = _normalize(matrix, args.normalize)
    k = _resolve_k(x_norm, args)
    rows = []
    for mode in _MODE_NAMES[args.mode]:
        for d_star in args.d_star:
            for row in sweep_min_r(
                matrix.values,
                mode,
                args.s,
                d_star,
                k,
                normalize=args.normalize,
                parallel=args.parallel,
            ):
                rows.append([row.mode, row.s, row.d_star, row.r_star, row.cost])
    out = _out_dir(args)
    provenance = _provenance(
        {"source": source, "normalize": args.normalize, "k": k, "s": args.s, "d_star": args.d_star}
    )
    _write_csv(out / "min_r.csv", provenance, ["mode", "s", "d_star", "r_star", "cost"], rows)
    print(f"rows={len(rows)} k={k}")
    return 0


def cmd_cost_table(args) -> int:
    matrix, source = _load_matrix(args)
    m, n = matrix.m, matrix.n
    rows = [
        [s, r, commcost.horizontal_cost(s, r, m, n), commcost.vertical_cost(s, r, m, n)]
        for s in args.s
        for r in args.r
    ]
    out = _out_dir(args)
    provenance = _provenance({"source": source, "m": m, "n": n, "s": args.s, "r": args.r})
    _write_csv(out / "cost_table.csv", provenance, ["s", "r", "c_hor", "c_ver"], rows)
    print(f"rows={len(rows)} m={m} n={n}")
    return 0


def cmd_roc(args) -> int:
    matrix, source = _load_matrix(args)
    x_norm = _normalize(matrix, args.normalize)
    k = _resolve_k(x_norm, args)
    _, central_scores = simnet.centralized_reference(x_norm, k)
    truths = {pct: make_ground_truth(central_scores, pct) for pct in args.truth_pct}

    roc_rows = []
    err_rows = []

    def emit(method: str, s: int, r: int, scores) -> None:
        for pct in args.truth_pct:
            curve = roc_curve(scores, truths[pct])
            for (far, tpr), _thr in zip(curve.points, curve.thresholds):
                roc_rows.append([method, s, r, pct, float(far), float(tpr)])
            err_rows.append([pct, method, r, equal_error_rate(curve)])

    emit("centralized", 1, 0, central_scores)
    for mode in _MODE_NAMES[args.mode]:
        for r in args.r:
            if r > simnet.max_feasible_r(matrix.values, mode, args.s):
                continue
            if args.s * r < k or (mode == "vertical" and min(args.s * r, matrix.m) < k):
                continue
            run = run_protocol(
                matrix.values, mode, args.s, r, k, normalize=args.normalize, parallel=args.parallel
            )
            emit(mode, args.s, r, run.scores)

    out = _out_dir(args)
    provenance = _provenance(
        {
            "source": source,
            "normalize": args.normalize,
            "k": k,
            "s": args.s,
            "r": args.r,
            "truth_pct": args.truth_pct,
        }
    )
    _write_csv(
        out / "roc.csv",
        provenance,
        ["method", "s", "r", "truth_percentile", "far", "tpr"],
        roc_rows,
    )
    _write_csv(out / "err.csv", provenance, ["truth_percentile", "method", "r", "err"], err_rows)
    print(f"roc_rows={len(roc_rows)} err_rows={len(err_rows)} k={k}")
    return 0


_HANDLERS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "scree": cmd_scree,
    "gd-sweep": cmd_gd_sweep,
    "min-r": cmd_min_r,
    "cost-table": cmd_cost_table,
    "roc": cmd_roc,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help / --version
            return int(exc.code or 0)
        if args.cmd is None:
            raise _UsageError("a subcommand is required")
        return _HANDLERS[args.cmd](args)
    except _UsageError as exc:
        print(f"dispca: usage error: {exc}", file=sys.stderr)
        return 1
    except SvdConvergenceError as exc:
        print(f"dispca: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (DispcaError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"dispca: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
