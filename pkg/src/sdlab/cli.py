"""``sdlab`` command line.

Exit codes: 0 success, 1 bad arguments or input, 2 search budget exceeded
(a partial report is still written), 3 internal invariant violation.
"""

from __future__ import annotations

import csv
import io
import os
import sys

import click

from . import agnostic, dimensions as dims, reproduce, simulate, zoo
from .core import ActiveSet, ConceptClass
from .errors import BudgetExceeded, ProtocolError, UnsupportedError
from .oracle import AdversaryMove

EXIT_ARGS, EXIT_BUDGET, EXIT_INVARIANT = 1, 2, 3


class CliError(Exception):
    def __init__(self, msg: str, code: int = EXIT_ARGS):
        super().__init__(msg)
        self.code = code


def load_class(ref: str, dedupe: bool = False) -> ConceptClass:
    """A ``zoo:`` URI or a path to a class JSON file."""
    try:
        if ref.startswith("zoo:"):
            return zoo.from_uri(ref)
        return ConceptClass.load(ref, dedupe=dedupe)
    except FileNotFoundError:
        raise CliError(f"no such class file: {ref}") from None
    except (ValueError, TypeError, KeyError, OSError) as e:
        raise CliError(f"cannot load class {ref!r}: {e}") from None


def _points(spec: str | None, cls: ConceptClass) -> ActiveSet | None:
    if spec is None:
        return None
    try:
        pts = [int(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"--points expects comma-separated ids, got {spec!r}") from None
    bad = [p for p in pts if not 0 <= p < cls.num_points]
    if bad:
        raise CliError(f"point ids out of range: {bad}")
    return ActiveSet.of(pts)


def _workers(flag: int | None) -> int:
    if flag is not None:
        w = flag
    else:
        try:
            w = int(os.environ.get("SDL_WORKERS") or 1)
        except ValueError:
            raise CliError("SDL_WORKERS must be an integer") from None
    if w < 1:
        raise CliError("workers must be >= 1")
    return w


def _budget(states: int | None, millis: int | None) -> dims.SearchBudget:
    try:
        return dims.SearchBudget.from_env(max_states=states, max_millis=millis)
    except ValueError as e:
        raise CliError(f"bad budget: {e}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        click.echo(text, nl=not text.endswith("\n"))
    else:
        with open(out, "w") as f:
            f.write(text)


@click.group()
def cli():
    """Exact self-directed learning laboratory."""


@cli.command("dims")
@click.argument("class_ref")
@click.option("--measures", default="all", show_default=True,
              help="Comma-separated subset of vc,ld,m_worst,m_best,m_sd,td, or 'all'.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", default=None, help="Output file (default stdout).")
@click.option("--budget-states", type=int, default=None, help="Overrides SDL_BUDGET_STATES.")
@click.option("--budget-ms", type=int, default=None, help="Overrides SDL_BUDGET_MS.")
@click.option("--workers", type=int, default=None, help="Overrides SDL_WORKERS.")
@click.option("--timings", is_flag=True, help="Include wall time and states explored.")
@click.option("--dedupe", is_flag=True, help="Drop duplicate rows when loading a class file.")
def cmd_dims(class_ref, measures, fmt, out, budget_states, budget_ms, workers, timings, dedupe):
    """Complexity measures of a class."""
    cls = load_class(class_ref, dedupe)
    names = list(dims.MEASURES) if measures == "all" else [m.strip() for m in measures.split(",")]
    unknown = [m for m in names if m not in dims.MEASURES]
    if unknown or not names:
        raise CliError(f"unknown measures {unknown}; choose from {', '.join(dims.MEASURES)}")
    if "vc" in names and not cls.is_binary and measures != "all":
        raise CliError("vc is only defined for binary classes")
    if measures == "all" and not cls.is_binary:
        names.remove("vc")
    budget = _budget(budget_states, budget_ms)
    try:
        rep = dims.full_report(cls, names, budget, _workers(workers))
    except dims.InvariantViolation as e:
        raise CliError(str(e), EXIT_INVARIANT) from None
    if fmt == "json":
        text = rep.dumps(timings) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(dims.DimReport.CSV_HEADER)
        w.writerows(rep.csv_rows(timings))
        text = buf.getvalue()
    _emit(text, out)
    if rep.errors:
        for name, err in sorted(rep.errors.items()):
            bounds = f" (bounds {err.get('lower')}..{err.get('upper')})" if err["error"] == "budget" else ""
            click.echo(f"{name}: {err.get('message', err['error'])}{bounds}", err=True)
        if any(e["error"] == "budget" for e in rep.errors.values()):
            raise CliError("search budget exceeded; partial report written", EXIT_BUDGET)


@cli.command("simulate")
@click.argument("class_ref")
@click.option("--learner", default="sd_soa", show_default=True, help="sd_soa, majority or random.")
@click.option("--adversary", default="optimal", show_default=True,
              help="optimal, random or fixed_target:<concept index>.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--points", default=None, help="Comma-separated active points (default all).")
@click.option("--format", "fmt", type=click.Choice(["jsonl", "table"]), default="jsonl", show_default=True)
@click.option("--out", default=None, help="Output file (default stdout).")
def cmd_simulate(class_ref, learner, adversary, seed, points, fmt, out):
    """Run one self-directed episode and write its transcript."""
    cls = load_class(class_ref)
    try:
        lrn = simulate.make_learner(learner, seed)
        adv = simulate.make_adversary(adversary, seed)
    except ValueError as e:
        raise CliError(str(e)) from None
    if isinstance(adv, simulate.FixedTargetAdversary) and not 0 <= adv.concept < cls.num_concepts:
        raise CliError(f"fixed_target concept {adv.concept} out of range")
    try:
        tr = simulate.run_episode(cls, lrn, adv, seed, active=_points(points, cls))
    except (ProtocolError, ValueError) as e:
        raise CliError(str(e)) from None
    _emit(tr.to_jsonl() if fmt == "jsonl" else tr.to_table(cls), out)


def _parse_assignment(text: str) -> list[tuple[int, int]]:
    pairs = []
    for tok in text.replace(",", " ").split():
        x, sep, y = tok.partition("=")
        if not sep:
            raise ValueError(f"expected point=label, got {tok!r}")
        pairs.append((int(x), int(y)))
    return pairs


def _describe(view: simulate.GameView) -> str:
    lab = ", ".join(f"{x}={y}" for x, y in sorted(view.labels.items())) or "none"
    s = f"remaining points: {view.remaining}; labelled: {lab}; realizable concepts: {view.realizable}"
    if view.designation:
        s += "; designated labels: " + ", ".join(f"{x}:{a}/{b}" for x, (a, b) in view.designation)
    return s


def _ask_learner(view):
    click.echo(_describe(view))
    text = click.prompt("your move as 'point label', aiming to end the game early (q to quit)", default="q", show_default=False)
    if text.strip().lower() in ("q", "quit"):
        return None
    parts = text.split()
    if len(parts) != 2:
        return ("?", "?")
    return parts[0], parts[1]


def _ask_adversary(view, multiclass):
    click.echo(_describe(view))
    text = click.prompt("label points as 'p=l p=l' (blank for none, q to quit)", default="",
                        show_default=False)
    if text.strip().lower() in ("q", "quit"):
        return None
    try:
        assignment = _parse_assignment(text)
    except ValueError as e:
        click.echo(f"rejected: {e}")
        return _ask_adversary(view, multiclass)
    designation = None
    left = [x for x in view.remaining if x not in dict(assignment)]
    if multiclass and left:
        des = []
        for x in left:
            raw = click.prompt(f"two labels for point {x} as 'a b'")
            try:
                a, b = (int(v) for v in raw.split())
            except ValueError:
                a, b = -1, -1
            des.append((x, (a, b)))
        designation = tuple(des)
    return AdversaryMove(tuple(assignment), designation)


@cli.command("game")
@click.argument("class_ref")
@click.option("--side", type=click.Choice(["A", "B", "machine"]), default="B", show_default=True,
              help="Your role: A labels sets, B labels single points; 'machine' plays itself.")
@click.option("--multiclass", is_flag=True, help="Multi-class variant with label designations.")
@click.option("--points", default=None, help="Comma-separated points in play (default all).")
@click.option("--record", default=None, help="Write the game record JSON here (default stdout).")
def cmd_game(class_ref, side, multiclass, points, record):
    """Play the labelling game against an optimal opponent."""
    cls = load_class(class_ref)
    active = _points(points, cls)
    human = None if side == "machine" else side
    try:
        rec = simulate.play_labelling_game(
            cls, active, human, multiclass,
            ask_adversary=lambda v: _ask_adversary(v, multiclass),
            ask_learner=_ask_learner,
            on_reject=lambda msg: click.echo(f"rejected: {msg}"))
    except ValueError as e:
        raise CliError(str(e)) from None
    if human is not None:
        if rec.quit:
            click.echo("game abandoned; partial record follows" if record is None
                       else f"game abandoned; partial record saved to {record}")
        else:
            click.echo(f"game over, payout {rec.payout} (minimax value {rec.value})")
    else:
        click.echo(f"payout {rec.payout}")
    _emit(rec.dumps() + "\n", record)


@cli.command("agnostic")
@click.argument("class_ref")
@click.option("--sample", default="all", show_default=True,
              help="all, repeat:<k>, lowerbound:<k> or points:<i>,<j>,...")
@click.option("--labels", "label_source", type=click.Choice(agnostic.LABEL_SOURCES + tuple(agnostic.ALIASES)),
              default="bernoulli", show_default=True)
@click.option("--labels-file", type=click.Path(dir_okay=False), default=None,
              help="0/1 per line; implies --labels fixed.")
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--eta", type=float, default=None, help="Learning rate (default sqrt(8 ln N / T)).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", default=None, help="Output file (default stdout).")
@click.option("--workers", type=int, default=None, help="Overrides SDL_WORKERS.")
def cmd_agnostic(class_ref, sample, label_source, labels_file, trials, seed, eta, fmt, out, workers):
    """Multiplicative weights over projected experts; regret against both bounds."""
    cls = load_class(class_ref)
    fixed = None
    if labels_file is not None:
        try:
            with open(labels_file) as f:
                fixed = [int(line) for line in f if line.strip()]
        except (OSError, ValueError) as e:
            raise CliError(f"cannot read labels file: {e}") from None
        label_source = "fixed"
    elif label_source == "fixed":
        raise CliError("--labels fixed needs --labels-file")
    if trials < 1:
        raise CliError("--trials must be >= 1")
    try:
        smp = agnostic.parse_sample(sample, cls)
        rep = agnostic.run_agnostic(cls, smp, label_source, trials, seed, eta, fixed,
                                    workers=_workers(workers))
    except (ValueError, UnsupportedError) as e:
        raise CliError(str(e)) from None
    _emit(rep.dumps() + "\n" if fmt == "json" else rep.to_csv(), out)


@cli.group("zoo")
def cmd_zoo():
    """Built-in concept classes."""


@cmd_zoo.command("export")
@click.argument("uri")
@click.option("--out", default=None, help="Output file (default stdout).")
def cmd_zoo_export(uri, out):
    """Write a zoo class in the JSON class format."""
    if not uri.startswith("zoo:"):
        uri = "zoo:" + uri
    _emit(load_class(uri).dumps() + "\n", out)


@cmd_zoo.command("list")
def cmd_zoo_list():
    """Known generator names and their parameter counts."""
    for name, (k, _) in sorted(zoo.GENERATORS.items()):
        click.echo(f"zoo:{name}" + "".join(f":<p{i + 1}>" for i in range(k)))
    click.echo("zoo:octagon\nzoo:regular_octagon\nzoo:embed:<copies>")


@cli.command("reproduce")
@click.argument("suite")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table", show_default=True)
def cmd_reproduce(suite, fmt):
    """Recompute published values: suite core, long or all."""
    if suite not in reproduce.SUITES:
        raise CliError(f"unknown suite {suite!r}; known suites: {', '.join(reproduce.SUITES)}")
    rows = reproduce.run_suite(suite, echo=click.echo if fmt == "table" else None)
    if fmt == "json":
        click.echo(reproduce.rows_json(rows))
    failed = sum(not r.ok for r in rows)
    click.echo(f"{len(rows) - failed}/{len(rows)} checks passed", err=fmt == "json")
    if failed:
        raise CliError(f"{failed} check(s) failed", EXIT_INVARIANT)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="sdlab", standalone_mode=False)
    except CliError as e:
        click.echo(f"error: {e}", err=True)
        return e.code
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_ARGS
    except click.ClickException as e:
        e.show()
        return EXIT_ARGS
    except BudgetExceeded as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_BUDGET
    except dims.InvariantViolation as e:
        click.echo(f"invariant violated: {e}", err=True)
        return EXIT_INVARIANT
    return 0


if __name__ == "__main__":
    sys.exit(main())
