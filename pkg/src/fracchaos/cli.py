"""Command-line front end.

    fracchaos simulate --alpha 0.90 --x0 5,-2,1 --h 0.005 --T 50 --out traj.csv
    fracchaos analyze --out report.json
    fracchaos design --target Q2 --k1 16.96 --simulate --alpha 0.90 --x0 5,2,2

Exit codes: 0 success, 2 bad arguments, 3 numerical divergence,
4 empty admissible gain interval.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .analysis import flagship_equilibria
from .chaos import system_chaos_threshold
from .control import FeedbackLaw, admissible_gain_interval, design_report
from .core import ContractError, OrderVector, SystemModel, SystemParams
from .solver import DivergenceError, SolverConfig, solve_controlled, solve_pece

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_EMPTY_INTERVAL = 4

PLOT_TEMPLATE = '''\
"""Plot a trajectory written by `fracchaos simulate`."""
import sys

import matplotlib.pyplot as plt
import numpy as np

path = sys.argv[1] if len(sys.argv) > 1 else {csv!r}
data = np.genfromtxt(path, delimiter=",", names=True, comments="#")
fig = plt.figure(figsize=(10, 8))
ax = fig.add_subplot(2, 2, 1, projection="3d")
ax.plot(data["x"], data["y"], data["z"], lw=0.4)
ax.set_xlabel("x"); ax.set_ylabel("y"); ax.set_zlabel("z")
for i, (u, v) in enumerate([("x", "y"), ("x", "z"), ("y", "z")], start=2):
    a = fig.add_subplot(2, 2, i)
    a.plot(data[u], data[v], lw=0.4)
    a.set_xlabel(u); a.set_ylabel(v)
fig.suptitle({title!r})
fig.tight_layout()
plt.show()
'''


@dataclass
class RunConfig:
    command: str
    params: tuple[float, ...] = (3.0, 2.7, 4.7, 2.0, 9.0)
    alpha: float = 0.90
    orders: Optional[tuple[str, ...]] = None
    x0: tuple[float, ...] = (5.0, -2.0, 1.0)
    h: float = 0.005
    T: float = 50.0
    model: str = "flagship"
    target: str = "Q2"
    gains: Optional[tuple[float, float, float]] = None
    k_range: tuple[float, float] = (-50.0, 50.0)
    resolution: float = 1e-3
    simulate: bool = False
    out: str = "-"
    traj_out: Optional[str] = None
    plot_script: Optional[str] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        kw = {}
        for k, v in d.items():
            kw[k] = tuple(v) if isinstance(v, list) else v
        return cls(**kw)

    def system_params(self) -> SystemParams:
        return SystemParams(*self.params)

    def order_vector(self, n: int = 3) -> OrderVector:
        if self.orders:
            return OrderVector(list(self.orders))
        return OrderVector.commensurate(self.alpha, n)


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _orders(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracchaos", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--params", type=_floats, default=(3.0, 2.7, 4.7, 2.0, 9.0), help="a,b,c,d,h")
        p.add_argument("--out", default="-", help="output file ('-' for stdout)")

    def integration(p, x0):
        p.add_argument("--alpha", type=float, default=0.90)
        p.add_argument("--orders", type=_orders, default=None, help="q1,q2,q3 (fractions allowed)")
        p.add_argument("--x0", type=_floats, default=x0)
        p.add_argument("--h", type=float, default=0.005)
        p.add_argument("--T", type=float, default=50.0)

    sim = sub.add_parser("simulate", help="integrate the open-loop system, write CSV")
    common(sim)
    integration(sim, (5.0, -2.0, 1.0))
    sim.add_argument("--model", choices=["flagship", "zero"], default="flagship")
    sim.add_argument("--plot-script", default=None, help="also write a matplotlib script")

    ana = sub.add_parser("analyze", help="equilibria, eigenvalues, chaos thresholds as JSON")
    common(ana)

    des = sub.add_parser("design", help="feedback gain certificate as JSON")
    common(des)
    integration(des, (5.0, 2.0, 2.0))
    des.add_argument("--target", default="Q2", choices=["Q1", "Q2", "Q3", "Q4", "Q5"])
    des.add_argument("--k1", type=float, default=None)
    des.add_argument("--k2", type=float, default=0.0)
    des.add_argument("--k3", type=float, default=0.0)
    des.add_argument("--k-range", type=_floats, default=(-50.0, 50.0))
    des.add_argument("--resolution", type=float, default=1e-3)
    des.add_argument("--simulate", action="store_true")
    des.add_argument("--traj-out", default=None, help="closed-loop CSV (default: derived from --out)")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, params=tuple(ns.params), out=ns.out)
    if ns.command in ("simulate", "design"):
        cfg.alpha = ns.alpha
        cfg.orders = ns.orders
        cfg.x0 = tuple(ns.x0)
        cfg.h = ns.h
        cfg.T = ns.T
    if ns.command == "simulate":
        cfg.model = ns.model
        cfg.plot_script = ns.plot_script
    if ns.command == "design":
        cfg.target = ns.target
        if ns.k1 is not None or ns.k2 or ns.k3:
            cfg.gains = (ns.k1 or 0.0, ns.k2, ns.k3)
        cfg.k_range = tuple(ns.k_range)
        cfg.resolution = ns.resolution
        cfg.simulate = ns.simulate
        cfg.traj_out = ns.traj_out
    return cfg


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trajectory_csv(times, states, meta: dict) -> str:
    lines = ["# meta: " + json.dumps(meta, sort_keys=True), "t,x,y,z"]
    for t, s in zip(times, states):
        lines.append(",".join(f"{v:.17g}" for v in (t, *s)))
    return "\n".join(lines) + "\n"


def _meta(cfg: RunConfig) -> dict:
    return {"config": cfg.to_dict(), "version": __version__}


def cmd_simulate(cfg: RunConfig) -> int:
    p = cfg.system_params()
    model = SystemModel.flagship(p) if cfg.model == "flagship" else SystemModel.zero(3)
    scfg = SolverConfig(h=cfg.h, T=cfg.T, orders=cfg.order_vector())
    try:
        traj = solve_pece(model, cfg.x0, scfg)
    except DivergenceError as exc:
        print(f"fracchaos: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    _write(cfg.out, trajectory_csv(traj.times, traj.states, _meta(cfg)))
    if cfg.plot_script:
        title = f"model={cfg.model} params={list(cfg.params)} orders={list(map(str, scfg.orders))} x0={list(cfg.x0)}"
        _write(cfg.plot_script, PLOT_TEMPLATE.format(csv=cfg.out, title=title))
    return EXIT_OK


def analysis_document(p: SystemParams) -> dict:
    eq = flagship_equilibria(p)
    chaos = system_chaos_threshold(eq.reports) if len(eq) else None
    return {
        "equilibria": [r.to_dict() for r in eq],
        "degenerate": eq.degenerate,
        "index2_saddles": [r.label for r in eq if r.saddle_index.value == "index-2"],
        "chaos": chaos.to_dict() if chaos else None,
    }


def cmd_analyze(cfg: RunConfig) -> int:
    doc = analysis_document(cfg.system_params())
    doc["meta"] = _meta(cfg)
    _write(cfg.out, dumps(doc))
    return EXIT_OK


def cmd_design(cfg: RunConfig) -> int:
    p = cfg.system_params()
    eq = flagship_equilibria(p)
    try:
        target = eq[cfg.target].point
    except KeyError:
        print(f"fracchaos: equilibrium {cfg.target} is not real for these parameters", file=sys.stderr)
        return EXIT_USAGE
    gains = cfg.gains or (0.0, 0.0, 0.0)
    interval = None
    if gains[1] == 0 and gains[2] == 0:
        interval = admissible_gain_interval(p, target, cfg.k_range, cfg.resolution)
    alpha = float(cfg.order_vector().orders[0]) if not cfg.orders else None
    cert = design_report(p, target, gains, alpha=alpha, interval=interval)
    doc = {"certificate": cert.to_dict(), "meta": _meta(cfg)}
    code = EXIT_OK
    if cfg.simulate:
        law = FeedbackLaw.for_model(SystemModel.flagship(p), gains, target)
        scfg = SolverConfig(h=cfg.h, T=cfg.T, orders=cfg.order_vector())
        try:
            traj = solve_controlled(SystemModel.flagship(p), law, cfg.x0, scfg)
        except DivergenceError as exc:
            print(f"fracchaos: {exc}", file=sys.stderr)
            return EXIT_DIVERGED
        doc["simulation"] = {
            "final_state": [float(v) for v in traj.final],
            "final_distance": float(np.linalg.norm(traj.final - target)),
        }
        traj_out = cfg.traj_out or (os.path.splitext(cfg.out)[0] + "-trajectory.csv" if cfg.out != "-" else None)
        if traj_out:
            _write(traj_out, trajectory_csv(traj.times, traj.states, _meta(cfg)))
    _write(cfg.out, dumps(doc))
    if interval is not None and interval.empty:
        print("fracchaos: no admissible k1 in the sweep range", file=sys.stderr)
        code = EXIT_EMPTY_INTERVAL
    return code


COMMANDS = {"simulate": cmd_simulate, "analyze": cmd_analyze, "design": cmd_design}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except ContractError as exc:
        print(f"fracchaos: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
