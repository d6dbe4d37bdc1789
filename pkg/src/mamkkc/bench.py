"""Experiment runner: lambda grid x restarts, aggregation and report files."""
import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import adaptive_kernel, kernel_bank, manifold_graph, metrics, solver
from .discretize import kmeans_rows
from .errors import InputError

DEFAULT_LAMBDAS = tuple(round(1.0 + 0.1 * i, 10) for i in range(11))
METRICS = ("acc", "nmi", "purity")
BASELINES = ("single_kernel", "uniform_mkkm")


@dataclass
class RunConfig:
    clusters: int
    data: str | None = None
    kernel_dir: str | None = None
    labels: str | None = None
    tau: int = manifold_graph.DEFAULT_TAU
    lambdas: tuple = DEFAULT_LAMBDAS
    restarts: int = 50
    seed: int = 0
    kmeans_restarts: int = 10
    out: str | None = None
    scale_features: bool = True
    normalize_rows: bool = False
    random_init: bool = False
    baseline: str | None = None
    trace: bool = False
    max_iter: int = 20
    tol: float = 1e-6

    def validate(self):
        if self.clusters < 2:
            raise InputError(f"need at least 2 clusters, got {self.clusters}")
        if self.seed < 0:
            raise InputError(f"seed must be non-negative, got {self.seed}")
        if self.restarts < 1 or self.kmeans_restarts < 1:
            raise InputError("restart counts must be positive")
        if not self.lambdas:
            raise InputError("lambda grid is empty")
        if any(not (lam >= 0) for lam in self.lambdas):
            raise InputError(f"lambda grid must be non-negative, got {self.lambdas}")
        if self.baseline is not None and self.baseline not in BASELINES:
            raise InputError(f"unknown baseline {self.baseline!r}")


@dataclass
class Group:
    """One parameter setting: a lambda value, or a single kernel for baselines."""

    name: str
    lam: float
    records: list = field(default_factory=list)
    best_state: solver.SolverState | None = None


@dataclass
class ExperimentReport:
    groups: list
    kernel_names: list
    has_labels: bool

    @property
    def records(self):
        return [r for g in self.groups for r in g.records]

    def best_record(self, group):
        # ties on the objective (deterministic fits) fall back to k-means cost, then restart order
        return min(group.records, key=lambda r: (r["objective"], r["wcss"], r["restart"]))

    def metric_vector(self, group, metric):
        return np.array([r[metric] for r in group.records])

    def group_stats(self, group):
        best = self.best_record(group)
        row = {
            "group": group.name,
            "lambda": group.lam,
            "best_restart": best["restart"],
            "best_objective": best["objective"],
        }
        if self.has_labels:
            for m in METRICS:
                v = self.metric_vector(group, m)
                row[f"best_{m}"] = best[m]
                row[f"mean_{m}"] = float(v.mean())
                row[f"std_{m}"] = float(v.std(ddof=1)) if v.size > 1 else 0.0
        return row

    def summary(self):
        """Per-group rows plus, with labels, p-values against the best-mean group."""
        rows = [self.group_stats(g) for g in self.groups]
        if self.has_labels:
            for m in METRICS:
                top = max(range(len(rows)), key=lambda i: (rows[i][f"mean_{m}"], -i))
                ref = self.metric_vector(self.groups[top], m)
                for g, row in zip(self.groups, rows):
                    v = self.metric_vector(g, m)
                    row[f"p_{m}"] = metrics.paired_t_test(v, ref) if v.size > 1 else float("nan")
        return rows

    def headline(self):
        """Best-by-objective and best-mean results across groups, per metric."""
        if not self.has_labels:
            return {}
        rows = self.summary()
        out = {}
        for m in METRICS:
            b = max(rows, key=lambda r: r[f"best_{m}"])
            mm = max(rows, key=lambda r: r[f"mean_{m}"])
            out[m] = {
                "best_by_objective": b[f"best_{m}"],
                "best_by_objective_group": b["group"],
                "best_mean": mm[f"mean_{m}"],
                "best_mean_std": mm[f"std_{m}"],
                "best_mean_group": mm["group"],
            }
        return out


def parse_lambda_grid(text):
    """``"a:b:step"`` or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            a, b, step = (float(t) for t in text.split(":"))
            if step <= 0 or b < a:
                raise InputError(f"bad lambda range {text!r}")
            count = int(round((b - a) / step)) + 1
            return tuple(round(a + i * step, 10) for i in range(count))
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise InputError(f"cannot parse lambda grid {text!r}") from None


def load_inputs(config):
    """Return (kernel names, base kernels, labels or None)."""
    if (config.data is None) == (config.kernel_dir is None):
        raise InputError("give exactly one of a feature file or a kernel directory")
    if config.data is not None:
        X = kernel_bank.read_features(config.data)
        names, kernels = kernel_bank.build_kernel_bank(X, scale=config.scale_features)
    else:
        paths = sorted(p for p in Path(config.kernel_dir).iterdir() if p.is_file())
        if not paths:
            raise InputError(f"no kernel files in {config.kernel_dir}")
        names = [p.stem for p in paths]
        kernels = kernel_bank.load_kernels(paths)
    labels = kernel_bank.read_labels(config.labels) if config.labels else None
    if labels is not None and labels.size != kernels[0].shape[0]:
        raise InputError(f"{labels.size} labels for {kernels[0].shape[0]} samples")
    return names, kernels, labels


def _run_group(group, gi, kernels, labels, config, fixed_weights=False):
    n = kernels[0].shape[0]
    c = config.clusters
    shared = None
    if not config.random_init:
        shared = solver.fit(kernels, c, config.max_iter, config.tol, fixed_weights=fixed_weights)
    for r in range(config.restarts):
        if config.random_init:
            rng = np.random.default_rng([config.seed, gi, r, 1])
            state = solver.fit(
                kernels, c, config.max_iter, config.tol,
                init_partition=solver.random_partition(n, c, rng),
                fixed_weights=fixed_weights,
            )
        else:
            state = shared
        pred, cost = kmeans_rows(
            state.partition, c, config.kmeans_restarts,
            seed=[config.seed, gi, r], normalize_rows=config.normalize_rows,
        )
        final = state.objective_trace[-1] if state.objective_trace else state.initial_objective
        rec = {
            "group": group.name,
            "lambda": group.lam,
            "restart": r,
            "objective": final,
            "iterations": state.iterations,
            "converged": state.converged,
            "wcss": cost,
            "weights": [float(v) for v in state.weights],
            "pred": pred,
        }
        if labels is not None:
            rec.update(metrics.evaluate(pred, labels))
        group.records.append(rec)
        if group.best_state is None or rec is min(
            group.records, key=lambda x: (x["objective"], x["wcss"], x["restart"])
        ):
            group.best_state = state
    return group


def run_on_kernels(kernels, labels, config, names=None):
    """Run MAMKKC over the lambda grid on in-memory base kernels."""
    config.validate()
    if names is None:
        names = [f"k{p}" for p in range(len(kernels))]
    n = kernels[0].shape[0]
    if config.clusters > n:
        raise InputError(f"{config.clusters} clusters for {n} samples")
    laps = manifold_graph.kernel_laplacians(kernels, config.tau)
    groups = []
    for gi, lam in enumerate(config.lambdas):
        deformed = adaptive_kernel.deform_all(kernels, laps, lam)
        g = Group(name=f"lambda={lam:g}", lam=lam)
        groups.append(_run_group(g, gi, deformed, labels, config))
    return ExperimentReport(groups, list(names), labels is not None)


def run_baseline_on_kernels(kernels, labels, config, mode, names=None):
    config.validate()
    if names is None:
        names = [f"k{p}" for p in range(len(kernels))]
    if mode == "single_kernel":
        groups = [
            _run_group(Group(name=f"kernel={nm}", lam=0.0), gi, [K], labels, config)
            for gi, (nm, K) in enumerate(zip(names, kernels))
        ]
    elif mode == "uniform_mkkm":
        groups = [_run_group(Group(name="uniform", lam=0.0), 0, list(kernels), labels,
                             config, fixed_weights=True)]
    else:
        raise InputError(f"unknown baseline {mode!r}")
    return ExperimentReport(groups, list(names), labels is not None)


def run_experiment(config):
    names, kernels, labels = load_inputs(config)
    report = run_on_kernels(kernels, labels, config, names)
    if config.out:
        write_report(report, config.out, trace=config.trace)
    return report


def run_baseline(config, mode=None):
    mode = mode or config.baseline
    names, kernels, labels = load_inputs(config)
    report = run_baseline_on_kernels(kernels, labels, config, mode, names)
    if config.out:
        write_report(report, config.out, trace=config.trace)
    return report


# ---------------------------------------------------------------- writers


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_rows(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())


def write_records(report, path):
    header = ["group", "lambda", "restart", "objective", "iterations", "converged", "wcss"]
    if report.has_labels:
        header += list(METRICS)
    header.append("weights")
    rows = []
    for r in report.records:
        row = [r[k] for k in header[:-1]]
        row.append(";".join(repr(float(w)) for w in r["weights"]))
        rows.append(row)
    _write_rows(path, header, rows)


def write_summary(report, path):
    rows = report.summary()
    header = list(rows[0])
    _write_rows(path, header, [[r[k] for k in header] for r in rows])


def emit_lambda_sweep(report, path):
    """CSV ``lambda,mean_acc,std_acc,best_acc``, one row per group."""
    if not report.has_labels:
        raise InputError("the lambda sweep needs ground-truth labels")
    rows = report.summary()
    _write_rows(
        path,
        ["lambda", "mean_acc", "std_acc", "best_acc"],
        [[r["lambda"], r["mean_acc"], r["std_acc"], r["best_acc"]] for r in rows],
    )


def emit_convergence_trace(state, path):
    """CSV ``iteration,objective`` for a finished fit."""
    if not state.objective_trace:
        raise InputError("empty objective trace; nothing to write")
    _write_rows(
        path,
        ["iteration", "objective"],
        [[i + 1, float(v)] for i, v in enumerate(state.objective_trace)],
    )


def write_weights(report, path):
    m = max(len(g.best_state.weights) for g in report.groups)
    header = ["group", "lambda"] + [f"w{p + 1}" for p in range(m)]
    rows = [[g.name, g.lam] + [float(v) for v in g.best_state.weights] for g in report.groups]
    _write_rows(path, header, rows)


def write_report(report, out, trace=False):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_records(report, out / "records.csv")
    write_summary(report, out / "summary.csv")
    write_weights(report, out / "weights.csv")
    if report.has_labels:
        emit_lambda_sweep(report, out / "sweep.csv")
    if trace:
        for g in report.groups:
            if g.best_state.objective_trace:
                tag = g.name.split("=", 1)[-1]
                emit_convergence_trace(g.best_state, out / f"trace_{tag}.csv")


def format_summary(report):
    """Plain-text table for the terminal."""
    rows = report.summary()
    cols = ["group", "best_objective"]
    if report.has_labels:
        cols += ["best_acc", "mean_acc", "std_acc", "p_acc", "best_nmi", "mean_nmi", "best_purity"]
    cells = [cols] + [
        [f"{r[c]:.4f}" if isinstance(r[c], float) else str(r[c]) for c in cols] for r in rows
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
    lines = ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    head = report.headline()
    for m, h in head.items():
        lines.append(
            f"{m}: best-by-objective {h['best_by_objective']:.4f} ({h['best_by_objective_group']}), "
            f"best mean {h['best_mean']:.4f} +- {h['best_mean_std']:.4f} ({h['best_mean_group']})"
        )
    return "\n".join(lines)
