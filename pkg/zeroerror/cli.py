"""
Command-line front end: graph I/O, entropy computations, identity checks
and the zero-error coding simulator.
"""

import argparse
import json
import logging
import math
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from . import __version__
from .coding import characteristic_graph, simulate
from .combinatorics import chromatic_number, clique_number, is_perfect
from .config_manager import ConfigManager, Limits
from .entropy import (
    chromatic_entropy, chromatic_entropy_oracle, koerner_entropy, koerner_entropy_oracle,
)
from .errors import CapExceededError, GraphValidationError, ZeroErrorToolkitError
from .graph_core import (
    ProbabilisticGraph, WeightVector, and_power, and_product_all, complement, disjoint_union,
    induced_subgraph,
)
from .graph_io import graph_to_json, read_graph, read_source, vertex_label, write_graph
from .hbar import GraphFamily, eta_profile, hbar_exact, verify_linearization, verify_theorem1

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_CAP = 3
EXIT_USAGE = 64

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(funcName)s:%(lineno)d] - %(message)s'


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


class CommandConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    subcommand: str
    inputs: List[str] = []
    tolerance: Optional[float] = None
    max_vertices: Optional[int] = None
    max_power: Optional[int] = None
    max_iters: Optional[int] = None
    k_cap: Optional[int] = None
    output: Literal["text", "json"] = "text"
    seed: Optional[int] = None

    @field_validator("tolerance")
    @classmethod
    def tolerance_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not v > 0:
            raise ValueError("tolerance must be > 0")
        return v

    @field_validator("max_vertices", "max_power", "max_iters", "k_cap")
    @classmethod
    def caps_positive(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v <= 0:
            raise ValueError("caps must be positive")
        return v

    def limits(self, config: ConfigManager) -> Limits:
        vertex_caps = {}
        if self.max_vertices is not None:
            vertex_caps = {
                "max_vertices_chromatic": self.max_vertices,
                "max_vertices_maximal_sets": self.max_vertices,
                "max_vertices_perfect": self.max_vertices,
                "max_vertices_all_sets": self.max_vertices,
            }
        return config.get_limits(
            tolerance=self.tolerance, max_power_vertices=self.max_power,
            max_iters=self.max_iters, k_cap=self.k_cap, **vertex_caps)


def remove_handlers() -> None:
    """Detach handlers installed by setup_logging"""
    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        if getattr(handler, "_zeroerror", False):
            root_logger.removeHandler(handler)
            handler.close()


def setup_logging(config: ConfigManager, level: Optional[str] = None) -> None:
    """Console logging on stderr, plus a rotating file when logging.log_dir is set"""
    try:
        log_config = config.get_section("logging")
        log_level = getattr(logging, (level or log_config.get("level", "WARNING")).upper())
        formatter = logging.Formatter(LOG_FORMAT)

        root_logger = logging.getLogger()
        remove_handlers()
        root_logger.setLevel(log_level)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        console_handler._zeroerror = True
        root_logger.addHandler(console_handler)

        log_dir = log_config.get("log_dir")
        if log_dir:
            Path(log_dir).mkdir(parents=True, exist_ok=True)
            file_handler = RotatingFileHandler(
                Path(log_dir) / "zeroerror.log",
                maxBytes=log_config.get("max_file_size_mb", 10) * 1024 * 1024,
                backupCount=log_config.get("backup_count", 5),
                encoding='utf-8'
            )
            file_handler.setFormatter(formatter)
            file_handler._zeroerror = True
            root_logger.addHandler(file_handler)

    except Exception as e:
        logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(levelname)s - %(message)s',
                            stream=sys.stderr)
        logging.error(f"Failed to setup logging, using basic: {e}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, help="numeric tolerance (default from config, 1e-9)")
    common.add_argument("--max-vertices", type=int, help="cap on vertices for exact solvers")
    common.add_argument("--max-power", type=int, help="cap on vertices of products and powers")
    common.add_argument("--max-iters", type=int, help="iteration cap for alternating minimization")
    common.add_argument("--k-cap", type=int, help="denominator cap for type weights")
    common.add_argument("--output", choices=("text", "json"), default="text")
    common.add_argument("--config", help="configuration file (default: ZEROERROR_CONFIG or bundled)")
    common.add_argument("--log-level", help="override logging level")

    parser = _Parser(prog="zeroerror", description="Entropy invariants of probabilistic graphs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    add("info", "summarize a graph").add_argument("graph")

    p = add("product", "AND product of two or more graphs")
    p.add_argument("graphs", nargs="+")
    p.add_argument("--out")

    p = add("union", "weighted disjoint union")
    p.add_argument("graphs", nargs="+")
    p.add_argument("--pa", required=True, help='part weights, e.g. "0.25,0.75"')
    p.add_argument("--out")

    p = add("power", "n-th AND power")
    p.add_argument("graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")

    p = add("complement", "graph complement")
    p.add_argument("graph")
    p.add_argument("--out")

    p = add("induced", "induced subgraph, weights renormalized")
    p.add_argument("graph")
    p.add_argument("--vertices", required=True, help="comma-separated vertex ids")
    p.add_argument("--out")

    add("perfect", "perfectness test with odd-hole witness").add_argument("graph")

    p = add("chromatic-entropy", "minimum-entropy colouring")
    p.add_argument("graph")
    p.add_argument("--oracle", action="store_true", help="exhaustive partition enumeration")

    p = add("koerner-entropy", "Koerner graph entropy")
    p.add_argument("graph")
    p.add_argument("--oracle", action="store_true", help="grid search oracle")
    p.add_argument("--grid", type=int, help="oracle grid denominator")

    p = add("hbar", "complementary graph entropy")
    p.add_argument("graphs", nargs="+")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--product", action="store_true", help="treat inputs as AND factors")
    mode.add_argument("--union", action="store_true", help="treat inputs as union parts (needs --pa)")
    p.add_argument("--pa")
    p.add_argument("--max-n", type=int, default=2)

    for name, help_text in (("verify-theorem1", "union of a type against the normalized product"),
                            ("verify-linearization", "union linearity against product additivity")):
        p = add(name, help_text)
        p.add_argument("graphs", nargs="+")
        p.add_argument("--pa", required=True)

    p = add("eta-profile", "union entropy over a grid of weights")
    p.add_argument("graphs", nargs="+")
    p.add_argument("--grid", type=int, default=4)

    p = add("char-graph", "characteristic graph of a joint source")
    p.add_argument("source")
    p.add_argument("--out")

    p = add("simulate", "zero-error coding simulation")
    p.add_argument("source")
    p.add_argument("--setting", choices=("a", "b"), default="a")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    return parser


def parse_pa(text: str, parts: int) -> WeightVector:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise GraphValidationError(f"cannot parse weights {text!r}")
    if len(values) != parts:
        raise GraphValidationError(f"--pa has {len(values)} weights for {parts} graphs")
    return WeightVector.from_list(values)


def _round(obj: Any) -> Any:
    """12 significant digits on every float"""
    if isinstance(obj, float):
        if math.isfinite(obj):
            return float(f"{obj:.12g}")
        return obj
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _labels(values: Sequence[Any]) -> List[Any]:
    return [v if isinstance(v, (int, str)) else vertex_label(v) for v in values]


def _emit(result: Dict[str, Any], output: str) -> None:
    result = _round(result)
    if output == "json":
        print(json.dumps(result))
        return
    for key, value in result.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value)
        print(f"{key}: {value}")


def _graph_summary(g: ProbabilisticGraph) -> Dict[str, Any]:
    return {"vertices": g.n, "edges": g.edge_count(), "total_mass": math.fsum(g.weights)}


def _graph_result(g: ProbabilisticGraph, out: Optional[str]) -> Dict[str, Any]:
    if out:
        write_graph(g, out)
        return {**_graph_summary(g), "written": out}
    return graph_to_json(g)


def _dispatch(args: argparse.Namespace, limits: Limits, config: ConfigManager) -> Dict[str, Any]:
    cmd = args.subcommand
    if cmd == "info":
        g = read_graph(args.graph)
        summary = _graph_summary(g)
        summary["degrees"] = [g.degree(v) for v in g.vertices]
        summary["clique_number"] = clique_number(g, limits)
        summary["chromatic_number"] = chromatic_number(g, limits)
        return summary
    if cmd == "product":
        return _graph_result(and_product_all([read_graph(p) for p in args.graphs], limits), args.out)
    if cmd == "union":
        parts = [read_graph(p) for p in args.graphs]
        return _graph_result(disjoint_union(parts, parse_pa(args.pa, len(parts))), args.out)
    if cmd == "power":
        return _graph_result(and_power(read_graph(args.graph), args.n, limits), args.out)
    if cmd == "complement":
        return _graph_result(complement(read_graph(args.graph)), args.out)
    if cmd == "induced":
        g = read_graph(args.graph)
        by_label = {str(vertex_label(v)): v for v in g.vertices}
        wanted = [x.strip() for x in args.vertices.split(",") if x.strip()]
        unknown = [x for x in wanted if x not in by_label]
        if unknown:
            raise GraphValidationError(f"unknown vertices {unknown}")
        return _graph_result(induced_subgraph(g, [by_label[x] for x in wanted]), args.out)
    if cmd == "perfect":
        cert = is_perfect(read_graph(args.graph), limits)
        result = cert.model_dump()
        if cert.witness is not None:
            result["witness"] = _labels(cert.witness)
        return result
    if cmd == "chromatic-entropy":
        g = read_graph(args.graph)
        coloring = chromatic_entropy_oracle(g, limits) if args.oracle else chromatic_entropy(g, limits)
        return {"value_bits": coloring.entropy_bits,
                "classes": [_labels(c) for c in coloring.classes],
                "class_masses": coloring.class_masses}
    if cmd == "koerner-entropy":
        g = read_graph(args.graph)
        if args.oracle:
            return {"value_bits": koerner_entropy_oracle(g, args.grid, limits), "oracle": True}
        solution = koerner_entropy(g, limits=limits)
        return {"value_bits": solution.mutual_info_bits,
                "lower_bound_bits": solution.lower_bound_bits,
                "gap_bits": solution.gap_bits,
                "iterations": solution.iterations,
                "converged": solution.converged,
                "support": [_labels(s) for s in solution.support],
                "marginal": solution.marginal}
    if cmd == "hbar":
        graphs = [read_graph(p) for p in args.graphs]
        if args.union:
            if not args.pa:
                raise GraphValidationError("hbar --union needs --pa")
            target = GraphFamily.union(graphs, parse_pa(args.pa, len(graphs)))
        elif args.product or len(graphs) > 1:
            target = GraphFamily.product(graphs)
        else:
            target = graphs[0]
        return hbar_exact(target, limits, max_n=args.max_n).model_dump(exclude_none=True)
    if cmd == "verify-theorem1":
        graphs = [read_graph(p) for p in args.graphs]
        return verify_theorem1(graphs, parse_pa(args.pa, len(graphs)), limits=limits).model_dump()
    if cmd == "verify-linearization":
        graphs = [read_graph(p) for p in args.graphs]
        return verify_linearization(graphs, parse_pa(args.pa, len(graphs)), limits=limits).model_dump()
    if cmd == "eta-profile":
        graphs = [read_graph(p) for p in args.graphs]
        return eta_profile(graphs, args.grid, limits=limits).model_dump()
    if cmd == "char-graph":
        return _graph_result(characteristic_graph(read_source(args.source)), args.out)
    if cmd == "simulate":
        sim = config.get_section("simulation")
        report = simulate(
            read_source(args.source), setting=args.setting, n=args.n,
            trials=args.trials if args.trials is not None else sim.get("trials", 100000),
            seed=args.seed if args.seed is not None else sim.get("seed", 7),
            limits=limits, chunk_size=sim.get("chunk_size", 10000))
        return report.model_dump()
    raise UsageError(f"unknown subcommand {cmd!r}")


def _inputs(args: argparse.Namespace) -> List[str]:
    if getattr(args, "graphs", None):
        return [str(p) for p in args.graphs]
    single = getattr(args, "graph", None) or getattr(args, "source", None)
    return [str(single)] if single else []


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one subcommand; returns the process exit code"""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)

    config = ConfigManager(args.config)
    setup_logging(config, args.log_level)
    try:
        command = CommandConfig(
            subcommand=args.subcommand, tolerance=args.tol, max_vertices=args.max_vertices,
            max_power=args.max_power, max_iters=args.max_iters, k_cap=args.k_cap,
            output=args.output, seed=getattr(args, "seed", None), inputs=_inputs(args))
        limits = command.limits(config)
        result = _dispatch(args, limits, config)
    except ValidationError as e:
        print(f"error: invalid options: {e.errors()[0].get('msg')}", file=sys.stderr)
        return EXIT_VALIDATION
    except CapExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except GraphValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except ZeroErrorToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        logging.exception(f"Unexpected failure in {args.subcommand}: {e}")
        return EXIT_FAILURE

    _emit(result, command.output)
    return EXIT_OK
