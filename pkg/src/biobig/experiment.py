"""Configured simulation runs over a model, with per-run summaries."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

from .dot import to_dot
from .models import Model, bundled, load_model, loads_model
from .project import project_mobility, project_trace
from .rewrite import Trace, parse_strategy, run
from .term import to_term


@dataclass
class RunConfig:
    model: str = "vesicle.biobig"  # bundled name or a path
    strategy: str = "first"
    steps: int = 100
    check_sorting: bool = True
    check_theorem: bool = True
    out_dir: str | None = None  # trace, DOT states and the final term go here

    def __post_init__(self):
        parse_strategy(self.strategy)
        if self.steps < 0:
            raise ValueError("steps must be non-negative")


@dataclass
class SweepConfig:
    models: tuple = ("vesicle.biobig", "phago.biobig", "shuttle.biobig")
    seeds: tuple = tuple(range(5))
    steps: int = 30
    check_theorem: bool = True


@dataclass
class RunSummary:
    model: str
    strategy: str
    steps: int
    rules: dict = field(default_factory=dict)  # rule name -> times fired
    sorting_violations: int = 0
    theorem_ok: bool | None = None
    final_mobility: str = ""

    def row(self) -> str:
        fired = ",".join(f"{k}={v}" for k, v in sorted(self.rules.items())) or "-"
        theorem = "-" if self.theorem_ok is None else str(self.theorem_ok).lower()
        return "\t".join([self.model, self.strategy, str(self.steps), fired,
                          str(self.sorting_violations), theorem, self.final_mobility])

    HEADER = "model\tstrategy\tsteps\tfired\tsorting_violations\ttheorem_ok\tfinal_mobility"


def open_model(name: str) -> Model:
    if Path(name).exists():
        return load_model(name)
    return loads_model(bundled(name))


def simulate(cfg: RunConfig) -> tuple[Trace, RunSummary]:
    model = open_model(cfg.model)
    trace = run(model.initial, model.system, cfg.strategy, cfg.steps)
    summary = RunSummary(model.name, cfg.strategy, len(trace.steps))
    for name, _ in trace.steps:
        summary.rules[name] = summary.rules.get(name, 0) + 1
    if cfg.check_sorting:
        summary.sorting_violations = sum(len(model.system.check(g)) for g in trace.states)
    if cfg.check_theorem:
        summary.theorem_ok = project_trace(trace, model.system, strict=False).ok
    summary.final_mobility = to_term(project_mobility(trace.states[-1]))
    if cfg.out_dir:
        _write(Path(cfg.out_dir), cfg, trace, summary)
    return trace, summary


def _write(out: Path, cfg: RunConfig, trace: Trace, summary: RunSummary) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "trace.tsv").write_text(trace.tsv())
    for k, g in enumerate(trace.states):
        (out / f"state_{k:03d}.dot").write_text(to_dot(g, f"state {k}"))
    (out / "final.term").write_text(to_term(trace.states[-1]) + "\n")
    (out / "config.txt").write_text("".join(f"{k}={v}\n" for k, v in asdict(cfg).items()))
    (out / "summary.tsv").write_text(RunSummary.HEADER + "\n" + summary.row() + "\n")


def sweep(cfg: SweepConfig) -> list[RunSummary]:
    out = []
    for model in cfg.models:
        for seed in cfg.seeds:
            rc = RunConfig(model, f"random:{seed}", cfg.steps, check_theorem=cfg.check_theorem)
            out.append(simulate(rc)[1])
    return out
