"""Batch command-line interface.

Commands: warp, distance, validate, grid-search, align, cluster. Jobs are
described by a JSON config (optionally overridden with ``--set key=value``
and the ``--input``/``--output``/``--seed`` flags); results are written as
JSON documents with 17-significant-digit floats plus plot-ready CSV/SVG
companions. Exit codes: 0 success, 1 bad input or config, 2 infeasible
problem.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from .alignment import align, cluster
from .dp import NoFeasiblePathError
from .grid import GridInfeasibleError
from .penalty import LossSpec, PenaltySpec, RegularizerSpec
from .plots import warp_panels_svg
from .signal import Signal
from .solver import SolveParams, distance, solve
from .validation import grid_search, split_times, train_test_losses

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_INFEASIBLE = 2


class ConfigError(ValueError):
    pass


_PENALTY_KEYS = {
    "loss", "huber_m", "band_eps", "band_norm", "reg_cum", "reg_inst",
    "lambda_cum", "lambda_inst", "lambda_inst2", "reg_inst2", "s_min", "s_max",
}
_SOLVER_KEYS = {"M", "eta", "refinements", "beta", "N", "second_order"}
_COMMON_KEYS = _PENALTY_KEYS | _SOLVER_KEYS | {
    "command", "inputs", "output", "seed", "emit_timing",
}
_ALLOWED_KEYS = {
    "warp": _COMMON_KEYS | {"write_warped_csv", "write_plot"},
    "distance": _COMMON_KEYS,
    "validate": _COMMON_KEYS | {"test_fraction"},
    "grid-search": _COMMON_KEYS | {"test_fraction", "lambda_cum_grid", "lambda_inst_grid"},
    "align": _COMMON_KEYS | {"rounds", "centered"},
    "cluster": _COMMON_KEYS | {"rounds", "K"},
}
_INPUT_COUNTS = {"warp": 2, "distance": 2, "validate": 2, "grid-search": 2}


def _validate_config(command: str, cfg: dict) -> None:
    allowed = _ALLOWED_KEYS[command]
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys for {command!r}: {', '.join(unknown)}")
    if "command" in cfg and cfg["command"] != command:
        raise ConfigError(
            f"config names command {cfg['command']!r} but {command!r} was invoked"
        )
    s_min = cfg.get("s_min", 0.001)
    s_max = cfg.get("s_max", 10.0)
    if not s_min < s_max:
        raise ConfigError(
            f"config keys s_min/s_max invalid: s_min ({s_min}) must be < s_max ({s_max})"
        )


def _penalties_from_config(cfg: dict) -> PenaltySpec:
    kind = cfg.get("loss", "squared_l2")
    if kind == "custom" or cfg.get("reg_cum") == "custom" or cfg.get("reg_inst") == "custom":
        raise ConfigError("custom penalties are library-only; use a built-in kind")
    loss = LossSpec(kind=kind, huber_m=cfg.get("huber_m"),
                    band_eps=cfg.get("band_eps"),
                    band_norm=cfg.get("band_norm", "l2"))
    box = dict(slope_min=float(cfg.get("s_min", 0.001)),
               slope_max=float(cfg.get("s_max", 10.0)))
    reg_cum = RegularizerSpec(kind=cfg.get("reg_cum", "square"))
    reg_inst = RegularizerSpec(kind=cfg.get("reg_inst", "square"), **box)
    reg_inst2 = None
    if cfg.get("reg_inst2") is not None:
        reg_inst2 = RegularizerSpec(kind=cfg["reg_inst2"])
    return PenaltySpec(
        loss=loss, reg_cum=reg_cum,
        lambda_cum=float(cfg.get("lambda_cum", 0.01)),
        reg_inst=reg_inst,
        lambda_inst=float(cfg.get("lambda_inst", 0.1)),
        reg_inst2=reg_inst2,
        lambda_inst2=float(cfg.get("lambda_inst2", 0.0)),
    )


def _params_from_config(cfg: dict) -> SolveParams:
    return SolveParams(
        N=int(cfg["N"]) if cfg.get("N") is not None else None,
        M=int(cfg.get("M", 100)),
        eta=float(cfg.get("eta", 0.15)),
        refinements=int(cfg.get("refinements", 3)),
        beta=float(cfg.get("beta", 0.0)),
        second_order=bool(cfg.get("second_order", False)),
    )


def read_signal_csv(path: str) -> Signal:
    """Read one signal: header row, first column is time, remaining columns
    are the signal dimensions. Rows with empty or non-finite cells are
    dropped (missing data)."""
    times: list[float] = []
    values: list[list[float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise ConfigError(f"{path}: need a header row with a time column and "
                              "at least one value column")
        width = len(header)
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != width:
                raise ConfigError(f"{path}: row has {len(row)} cells, expected {width}")
            if any(not cell.strip() for cell in row):
                continue
            try:
                parsed = [float(cell) for cell in row]
            except ValueError as exc:
                raise ConfigError(f"{path}: non-numeric cell: {exc}") from None
            if not all(np.isfinite(parsed)):
                continue
            times.append(parsed[0])
            values.append(parsed[1:])
    try:
        return Signal.from_samples(times, values)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _dumps(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {_dumps(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{inner}{_dumps(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if np.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        return _fmt(v)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _dumps(obj.tolist(), indent)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str, doc: dict) -> None:
    _atomic_write(path, _dumps(doc) + "\n")


def _write_csv(path: str, header: list[str], columns) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([_fmt(v) for v in row])
    _atomic_write(path, buf.getvalue())


def _components_doc(components) -> dict:
    return {
        "loss": components.loss,
        "cum_reg": components.cum_reg,
        "inst_reg": components.inst_reg,
        "inst2_reg": components.inst2_reg,
    }


def _report_timing(doc: dict, timing: dict, cfg: dict) -> None:
    line = ", ".join(f"{k}={v:.4f}s" for k, v in timing.items())
    print(f"timing: {line}", file=sys.stderr)
    if cfg.get("emit_timing", False):
        doc["timing_seconds"] = dict(timing)


def cmd_warp(cfg: dict, inputs: list[str], outdir: str) -> None:
    x, y = (read_signal_csv(p) for p in inputs)
    penalties = _penalties_from_config(cfg)
    params = _params_from_config(cfg)
    result = solve(x, y, penalties, params)
    doc = {
        "command": "warp",
        "objective": result.objective,
        "components": _components_doc(result.components),
        "tau": result.warp.tau,
        "t": result.warp.t,
        "history": result.history,
    }
    _report_timing(doc, result.timing, cfg)
    _write_json(os.path.join(outdir, "result.json"), doc)
    if cfg.get("write_warped_csv", True):
        t = result.warp.t
        warped = x(result.warp(t))
        target = y(t)
        header = (["t"] + [f"x_warped_{j}" for j in range(x.dim)]
                  + [f"y_{j}" for j in range(y.dim)])
        cols = [t] + [warped[:, j] for j in range(x.dim)] \
            + [target[:, j] for j in range(y.dim)]
        _write_csv(os.path.join(outdir, "warped.csv"), header, cols)
    if cfg.get("write_plot", True):
        _atomic_write(os.path.join(outdir, "warp.svg"),
                      warp_panels_svg(result.warp) + "\n")


def cmd_distance(cfg: dict, inputs: list[str], outdir: str) -> None:
    x, y = (read_signal_csv(p) for p in inputs)
    d = distance(x, y, _penalties_from_config(cfg), _params_from_config(cfg))
    _write_json(os.path.join(outdir, "result.json"),
                {"command": "distance", "distance": d})


def _make_split(cfg: dict, y: Signal, params: SolveParams):
    t = np.linspace(0.0, 1.0, params.N) if params.N is not None else (
        y.knot_times if y.n_knots >= 16 else np.linspace(0.0, 1.0, 16))
    return split_times(t, float(cfg.get("test_fraction", 0.5)),
                       int(cfg.get("seed", 0)))


def cmd_validate(cfg: dict, inputs: list[str], outdir: str) -> None:
    x, y = (read_signal_csv(p) for p in inputs)
    penalties = _penalties_from_config(cfg)
    params = _params_from_config(cfg)
    split = _make_split(cfg, y, params)
    l_train, l_test = train_test_losses(x, y, penalties, params, split)
    _write_json(os.path.join(outdir, "result.json"), {
        "command": "validate",
        "l_train": l_train,
        "l_test": l_test,
        "test_fraction": float(cfg.get("test_fraction", 0.5)),
        "seed": int(cfg.get("seed", 0)),
        "t_train": split.t_train,
        "t_test": split.t_test,
    })


def cmd_grid_search(cfg: dict, inputs: list[str], outdir: str) -> None:
    x, y = (read_signal_csv(p) for p in inputs)
    penalties = _penalties_from_config(cfg)
    params = _params_from_config(cfg)
    split = _make_split(cfg, y, params)
    default_grid = np.logspace(-3.0, 0.0, 7)
    lam_cum = np.asarray(cfg.get("lambda_cum_grid", default_grid), dtype=float)
    lam_inst = np.asarray(cfg.get("lambda_inst_grid", default_grid), dtype=float)
    report = grid_search(x, y, penalties, params, lam_cum, lam_inst, split)
    _write_json(os.path.join(outdir, "result.json"), {
        "command": "grid-search",
        "lambda_cum_grid": report.lambda_cum_grid,
        "lambda_inst_grid": report.lambda_inst_grid,
        "test_loss": report.test_loss,
        "train_loss": report.train_loss,
        "best_cell": list(report.best_cell),
        "best_lambda_cum": report.best_lambda_cum,
        "best_lambda_inst": report.best_lambda_inst,
        "l_train": report.l_train,
        "l_test": report.l_test,
    })
    # matrix CSV, contour-plot ready: rows lambda_cum, columns lambda_inst
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["lambda_cum\\lambda_inst"] + [_fmt(v) for v in report.lambda_inst_grid])
    for a, lam in enumerate(report.lambda_cum_grid):
        writer.writerow([_fmt(lam)] + [_fmt(v) for v in report.test_loss[a]])
    _atomic_write(os.path.join(outdir, "test_loss.csv"), buf.getvalue())


def cmd_align(cfg: dict, inputs: list[str], outdir: str) -> None:
    signals = [read_signal_csv(p) for p in inputs]
    result = align(signals, _penalties_from_config(cfg), _params_from_config(cfg),
                   rounds=int(cfg.get("rounds", 5)),
                   centered=bool(cfg.get("centered", False)))
    _write_json(os.path.join(outdir, "result.json"), {
        "command": "align",
        "num_signals": len(signals),
        "rounds": result.rounds,
        "objective_history": result.objective_history,
    })
    t = result.target.knot_times
    header = ["t"] + [f"target_{j}" for j in range(result.target.dim)]
    cols = [t] + [result.target.knot_values[:, j] for j in range(result.target.dim)]
    _write_csv(os.path.join(outdir, "target.csv"), header, cols)
    header = ["t"] + [f"warp_{i}" for i in range(len(signals))]
    cols = [t] + [w(t) for w in result.warps]
    _write_csv(os.path.join(outdir, "warps.csv"), header, cols)


def cmd_cluster(cfg: dict, inputs: list[str], outdir: str) -> None:
    signals = [read_signal_csv(p) for p in inputs]
    k = int(cfg.get("K", 2))
    result = cluster(signals, k, _penalties_from_config(cfg),
                     _params_from_config(cfg),
                     rounds=int(cfg.get("rounds", 5)),
                     seed=int(cfg.get("seed", 0)))
    _write_json(os.path.join(outdir, "result.json"), {
        "command": "cluster",
        "K": k,
        "seed": result.seed,
        "assignments": result.assignments,
        "rounds": result.rounds,
        "objective_history": result.objective_history,
    })
    for j, tpl in enumerate(result.templates):
        t = tpl.knot_times
        header = ["t"] + [f"template_{c}" for c in range(tpl.dim)]
        cols = [t] + [tpl.knot_values[:, c] for c in range(tpl.dim)]
        _write_csv(os.path.join(outdir, f"template_{j}.csv"), header, cols)
    t = result.templates[0].knot_times
    header = ["t"] + [f"warp_{i}" for i in range(len(signals))]
    cols = [t] + [w(t) for w in result.warps]
    _write_csv(os.path.join(outdir, "warps.csv"), header, cols)


_COMMANDS = {
    "warp": cmd_warp,
    "distance": cmd_distance,
    "validate": cmd_validate,
    "grid-search": cmd_grid_search,
    "align": cmd_align,
    "cluster": cmd_cluster,
}


def _parse_set(values: list[str]) -> dict:
    out = {}
    for item in values:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timewarp",
        description="Batch regularized time warping: alignment, distances, "
                    "validation, and clustering over CSV signals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON job config")
        p.add_argument("--input", action="append", default=[],
                       help="input signal CSV (repeatable)")
        p.add_argument("--output", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = {}
        if args.config:
            with open(args.config) as fh:
                cfg = json.load(fh)
            if not isinstance(cfg, dict):
                raise ConfigError("config must be a JSON object")
        cfg.update(_parse_set(args.set))
        if args.seed is not None:
            cfg["seed"] = args.seed
        inputs = list(args.input) or list(cfg.get("inputs", []))
        outdir = args.output or cfg.get("output", ".")
        cfg.pop("inputs", None)
        cfg.pop("output", None)
        cfg["inputs"] = inputs
        cfg["output"] = outdir
        _validate_config(args.command, cfg)
        cfg.pop("inputs")
        cfg.pop("output")
        if not inputs:
            raise ConfigError("no input signals given (use --input or config 'inputs')")
        expected = _INPUT_COUNTS.get(args.command)
        if expected is not None and len(inputs) != expected:
            raise ConfigError(
                f"{args.command} needs exactly {expected} input signals, got {len(inputs)}"
            )
        _COMMANDS[args.command](cfg, inputs, outdir)
    except (GridInfeasibleError, NoFeasiblePathError) as exc:
        print(f"infeasible problem: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
