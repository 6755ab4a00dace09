"""Command-line front end."""

from __future__ import annotations

import csv
import json
import logging
import os
import sys
from collections import Counter
from pathlib import Path

import click

from .geom import GeometryError
from .instances import (
    Family,
    GenerationFailed,
    TooLarge,
    enumerate_polygonizations,
    gen_pinwheel,
    gen_pocket_chain,
    gen_pow2k,
    gen_quadratic_cascade,
    random_points,
)
from .moves import CascadePolicy, CheckLevel, MoveEngine, MoveError
from .transforms import MoveBudget, orient_lid, pocket_reduction, reduce_to_canonical, transform
from .trace import TraceError, read_trace, write_trace
from .walk import random_walk
from .wrap import Wrap, WrapError, dump_points, is_simple, load_order, load_points

EXIT_PARSE = 2
EXIT_NOT_SIMPLE = 3
EXIT_INVARIANT = 4

log = logging.getLogger("polywrap")


class CliFailure(click.ClickException):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.exit_code = code


def _check_level(option: str | None, fallback: CheckLevel) -> CheckLevel:
    env = os.environ.get("POLYWRAP_CHECK_LEVEL")
    value = env or option
    try:
        return CheckLevel.parse(value) if value else fallback
    except KeyError:
        raise CliFailure(f"unknown check level {value!r}", EXIT_PARSE) from None


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliFailure(f"cannot read {path}: {exc}", EXIT_PARSE) from exc


def _points(path):
    try:
        return load_points(_read_json(path))
    except GeometryError as exc:
        raise CliFailure(f"{path}: {exc}", EXIT_PARSE) from exc


def _polygon(ps, path, what: str) -> Wrap:
    try:
        order = load_order(_read_json(path))
    except WrapError as exc:
        raise CliFailure(f"{path}: {exc}", EXIT_PARSE) from exc
    if sorted(order) != list(range(ps.n)):
        raise CliFailure(f"{what} polygon must visit each of the {ps.n} points once", EXIT_PARSE)
    if not is_simple(order, ps):
        raise CliFailure(f"{what} polygon is not simple", EXIT_NOT_SIMPLE)
    return Wrap(ps, order)


def _dump(obj, path=None) -> None:
    text = json.dumps(obj, indent=2)
    if path:
        Path(path).write_text(text + "\n")
    else:
        click.echo(text)


def _policy(name: str, seed: int) -> CascadePolicy:
    return CascadePolicy(name, seed)


@click.group()
@click.option("-v", "--verbose", count=True, help="More logging (repeatable).")
def main(verbose: int) -> None:
    """Move between polygonizations of a point set with stretches and twangs."""
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2), format="%(levelname)s %(name)s: %(message)s")


policy_opt = click.option("--policy", type=click.Choice(["fifo", "random"]), default="fifo", show_default=True)
check_opt = click.option(
    "--check-level",
    type=click.Choice(["off", "boundaries", "every-atomic"]),
    default=None,
    help="Invariant checks; POLYWRAP_CHECK_LEVEL takes precedence.",
)


@main.command("transform")
@click.option("--points", "points_path", required=True, type=click.Path(dir_okay=False))
@click.option("--from", "from_path", required=True, type=click.Path(dir_okay=False))
@click.option("--to", "to_path", required=True, type=click.Path(dir_okay=False))
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False))
@click.option("--summary", "summary_path", type=click.Path(dir_okay=False))
@click.option("--lid", default=None, help="Hull edge a,b that stays the target pocket.")
@policy_opt
@click.option("--seed", default=0, show_default=True)
@check_opt
def cmd_transform(points_path, from_path, to_path, trace_path, summary_path, lid, policy, seed, check_level):
    """Carry one polygonization to another and record every atomic move."""
    ps = _points(points_path)
    p1 = _polygon(ps, from_path, "--from")
    p2 = _polygon(ps, to_path, "--to")
    lid_pair = _parse_lid(lid, ps) if lid else None
    level = _check_level(check_level, CheckLevel.EVERY_ATOMIC)
    try:
        res = transform(p1, p2, _policy(policy, seed), level, lid=lid_pair)
    except MoveError as exc:
        raise CliFailure(f"invariant failure: {exc}", EXIT_INVARIANT) from exc
    if trace_path:
        write_trace(trace_path, ps, p1.sigma, res.journal, res.final.sigma, {"command": "transform", "target": list(p2.sigma)})
    summary = {
        "moves": res.moves,
        "forward_moves": res.forward_moves,
        "reverse_moves": res.reverse_moves,
        "atomic_moves": res.atomic_moves,
        "ok": res.ok,
        "lid": list(res.lid),
        "final": list(res.final.sigma),
    }
    _dump(summary, summary_path)
    if not res.ok:
        raise CliFailure("transform did not reach the target", EXIT_INVARIANT)


def _parse_lid(text: str, ps) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise CliFailure(f"--lid expects two indices a,b, got {text!r}", EXIT_PARSE) from None
    try:
        return orient_lid(ps, (a, b))
    except (ValueError, MoveError) as exc:
        raise CliFailure(f"--lid {text}: {exc}", EXIT_PARSE) from exc


@main.command("canonical")
@click.option("--points", "points_path", required=True, type=click.Path(dir_okay=False))
@click.option("--poly", "poly_path", required=True, type=click.Path(dir_okay=False))
@click.option("--lid", required=True, help="Hull edge a,b.")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
@check_opt
def cmd_canonical(points_path, poly_path, lid, trace_path, out_path, check_level):
    """Reduce a polygonization to the canonical one-pocket form for a lid."""
    ps = _points(points_path)
    p = _polygon(ps, poly_path, "--poly")
    lid_pair = _parse_lid(lid, ps)
    eng = MoveEngine(p.copy(), check_level=_check_level(check_level, CheckLevel.EVERY_ATOMIC))
    budget = MoveBudget()
    try:
        form = reduce_to_canonical(eng, lid_pair, budget)
    except MoveError as exc:
        raise CliFailure(f"invariant failure: {exc}", EXIT_INVARIANT) from exc
    if trace_path:
        write_trace(trace_path, ps, p.sigma, eng.journal, eng.wrap.sigma, {"command": "canonical", "lid": list(lid_pair)})
    _dump(
        {
            "order": list(form.polygon.sigma),
            "lid": list(lid_pair),
            "moves": len(eng.journal),
            "pocket_moves": budget.reduction_moves,
            "canonical_moves": budget.canonical,
            "prefix_ok": form.prefix_ok,
        },
        out_path,
    )


@main.command("random-walk")
@click.option("--n", "n", required=True, type=click.IntRange(3))
@click.option("--steps", required=True, type=click.IntRange(1))
@click.option("--seed", default=0, show_default=True)
@click.option("--scale", default=10000, show_default=True, help="Coordinate grid size.")
@click.option("--inject-stretches", is_flag=True, help="Allow one random stretch inside each cascade.")
@click.option("--inject-prob", default=0.2, show_default=True)
@policy_opt
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
@check_opt
def cmd_random_walk(n, steps, seed, scale, inject_stretches, inject_prob, policy, trace_path, out_path, check_level):
    """Random forward moves from a random point set; reports cascade statistics."""
    try:
        res = random_walk(
            n,
            steps,
            seed,
            scale=scale,
            inject_stretches=inject_stretches,
            inject_prob=inject_prob,
            check_level=_check_level(check_level, CheckLevel.BOUNDARIES),
            policy=_policy(policy, seed),
        )
    except MoveError as exc:
        raise CliFailure(f"invariant failure: {exc}", EXIT_INVARIANT) from exc
    except (GenerationFailed, ValueError) as exc:
        raise CliFailure(str(exc), EXIT_PARSE) from exc
    eng = res.engine
    if trace_path:
        first = eng.journal[0].pre if eng.journal else eng.wrap.sigma
        write_trace(trace_path, eng.wrap.ps, first, eng.journal, eng.wrap.sigma, {"command": "random-walk", "seed": seed})
    out = res.summary()
    out["histogram"] = {str(k): v for k, v in sorted(Counter(res.cascades).items())}
    out["cascades"] = res.cascades
    _dump(out, out_path)


def _generate(family: Family, k, n, seed, scale, r):
    """(point set, optional polygon, params, extra metadata) for one family member."""
    if family is Family.POW2K:
        if k is None:
            raise CliFailure("pow2k needs --k", EXIT_PARSE)
        return gen_pow2k(k), None, {"k": k}, {}
    if family is Family.RANDOM:
        if n is None:
            raise CliFailure("random needs --n", EXIT_PARSE)
        return random_points(n, seed, scale), None, {"n": n, "scale": scale}, {}
    if family is Family.POCKETCHAIN:
        if k is None:
            raise CliFailure("pocketchain needs --k (number of pockets)", EXIT_PARSE)
        ps, w, lids = gen_pocket_chain(k, r, scale=scale)
        return ps, w, {"m": k, "r": r, "scale": scale}, {"lids": [list(l) for l in lids]}
    if family is Family.PINWHEEL:
        if k is None:
            raise CliFailure("pinwheel needs --k (number of strings)", EXIT_PARSE)
        ps, w = gen_pinwheel(k, scale=scale)
        return ps, w, {"k": k, "scale": scale}, {}
    if n is None:
        raise CliFailure("quadcascade needs --n", EXIT_PARSE)
    ps, w, e_pos, v = gen_quadratic_cascade(n, scale=scale)
    return ps, w, {"n": n, "scale": scale}, {"stretch_edge": e_pos, "v": v}


@main.command("gen")
@click.option("--family", required=True, type=click.Choice([f.value for f in Family]))
@click.option("--k", "k", type=int, default=None, help="Size parameter for pow2k, pocketchain and pinwheel.")
@click.option("--n", "n", type=int, default=None, help="Point count for random and quadcascade.")
@click.option("--r", "r", type=int, default=3, show_default=True, help="Vertices per pocket (pocketchain).")
@click.option("--seed", default=0, show_default=True)
@click.option("--scale", default=None, type=int, help="Coordinate scale (family default if omitted).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
def cmd_gen(family, k, n, r, seed, scale, out_path):
    """Generate a point set from one of the instance families."""
    fam = Family(family)
    if scale is None:
        scale = {Family.RANDOM: 1000, Family.POCKETCHAIN: 10000}.get(fam, 20000)
    try:
        ps, w, params, extra = _generate(fam, k, n, seed, scale, r)
    except (ValueError, GenerationFailed) as exc:
        if isinstance(exc, CliFailure):
            raise
        raise CliFailure(str(exc), EXIT_PARSE) from exc
    doc = dump_points(ps, {"family": fam.value, "params": params, "seed": seed, **extra})
    if w is not None:
        doc["order"] = list(w.sigma)
    _dump(doc, out_path)


@main.command("enumerate")
@click.option("--points", "points_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
def cmd_enumerate(points_path, out_path):
    """List every simple polygonization of a small point set."""
    ps = _points(points_path)
    try:
        found = enumerate_polygonizations(ps)
    except TooLarge as exc:
        raise CliFailure(str(exc), EXIT_PARSE) from exc
    _dump({"n": ps.n, "count": len(found), "polygonizations": [list(w.sigma) for w in found]}, out_path)


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def family_counts(family: Family, size: int, check_level) -> tuple[int, int]:
    """(twang count, forward move count) for one sweep point."""
    if family is Family.QUADCASCADE:
        ps, w, e_pos, v = gen_quadratic_cascade(size)
        eng = MoveEngine(w, check_level=check_level)
        rec = eng.forward_move(e_pos, v)
        return rec.twangs, 1
    if family is Family.POCKETCHAIN:
        # size is a point count; m pockets of three vertices use 5m + 2 points
        ps, w, lids = gen_pocket_chain(max((size - 2) // 5, 2), 3)
        eng = MoveEngine(w, check_level=check_level)
        pocket_reduction(eng, lids[0])
        return eng.stats.twangs, eng.stats.forward_moves
    raise ValueError(f"no sweep defined for family {family.value}")


def loglog_slope(sizes, values) -> float | None:
    import numpy as np

    pairs = [(s, v) for s, v in zip(sizes, values) if s > 0 and v > 0]
    if len({s for s, _ in pairs}) < 2:
        return None
    x = np.log([s for s, _ in pairs])
    y = np.log([v for _, v in pairs])
    return float(np.polyfit(x, y, 1)[0])


def _plot(rows, slopes, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    for fam in sorted({r[0] for r in rows}):
        pts = sorted((r[1], r[2]) for r in rows if r[0] == fam)
        s = slopes.get(fam, {}).get("twangs")
        label = fam if s is None else f"{fam} (slope {s:.2f})"
        ax.loglog([p[0] for p in pts], [max(p[1], 1) for p in pts], "o-", label=label)
    ax.set_xlabel("size")
    ax.set_ylabel("twangs")
    if rows:
        ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


@main.command("stats")
@click.option("--families", default="quadcascade,pocketchain", show_default=True)
@click.option("--sizes", default="16,24,32,48,64", show_default=True, help="Point counts per run.")
@click.option("--out", "out_path", default="stats.csv", show_default=True, type=click.Path(dir_okay=False))
@check_opt
def cmd_stats(families, sizes, out_path, check_level):
    """Sweep family sizes; write a CSV, the log-log slopes and a plot beside it."""
    try:
        fams = [Family(f) for f in _split(families)]
        size_list = [int(s) for s in _split(sizes)]
    except ValueError as exc:
        raise CliFailure(f"bad sweep specification: {exc}", EXIT_PARSE) from exc
    level = _check_level(check_level, CheckLevel.BOUNDARIES)
    rows = []
    for fam in fams:
        for size in size_list:
            try:
                twangs, moves = family_counts(fam, size, level)
            except MoveError as exc:
                raise CliFailure(f"invariant failure at {fam.value} {size}: {exc}", EXIT_INVARIANT) from exc
            except (ValueError, GenerationFailed) as exc:
                raise CliFailure(f"{fam.value} {size}: {exc}", EXIT_PARSE) from exc
            rows.append((fam.value, size, twangs, moves))
    out = Path(out_path)
    with open(out, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["family", "size", "twangs", "moves"])
        wr.writerows(rows)
    slopes = {}
    for fam in {r[0] for r in rows}:
        sub = [r for r in rows if r[0] == fam]
        slopes[fam] = {
            "twangs": loglog_slope([r[1] for r in sub], [r[2] for r in sub]),
            "moves": loglog_slope([r[1] for r in sub], [r[3] for r in sub]),
        }
    out.with_suffix(".slopes.json").write_text(json.dumps(slopes, indent=2, sort_keys=True) + "\n")
    _plot(rows, slopes, out.with_suffix(".png"))
    click.echo(json.dumps({"csv": str(out), "rows": len(rows), "slopes": slopes}, sort_keys=True))


@main.command("render")
@click.option("--in", "in_path", required=True, type=click.Path(dir_okay=False))
@click.option("--svg-out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--stride", default=1, show_default=True, type=click.IntRange(1))
@click.option("--size", default=600, show_default=True, type=click.IntRange(100))
def cmd_render(in_path, out_dir, stride, size):
    """Draw a polygon/wrap JSON file or every stride-th twang of a trace as SVG frames."""
    from .render import render_frames, wrap_svg, write_svg

    path = Path(in_path)
    if path.suffix == ".jsonl":
        try:
            tr = read_trace(path)
        except TraceError as exc:
            raise CliFailure(f"{path}: {exc}", EXIT_PARSE) from exc
        try:
            files = render_frames(tr.initial_wrap, [ev for _, _, ev in tr.events], out_dir, stride, size)
        except MoveError as exc:
            raise CliFailure(f"trace does not replay: {exc}", EXIT_PARSE) from exc
    else:
        doc = _read_json(path)
        try:
            ps = load_points(doc)
            w = Wrap(ps, load_order(doc))
        except (GeometryError, WrapError) as exc:
            raise CliFailure(f"{path}: {exc}", EXIT_PARSE) from exc
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        target = Path(out_dir) / "frame_0000.svg"
        write_svg(wrap_svg(w, size=size), target)
        files = [target]
    click.echo(json.dumps({"frames": len(files), "dir": str(out_dir)}))


@main.command("replay")
@click.option("--trace", "trace_path", required=True, type=click.Path(dir_okay=False))
@check_opt
def cmd_replay(trace_path, check_level):
    """Re-run a trace from its header and confirm it ends where it says."""
    try:
        tr = read_trace(trace_path)
        end = tr.replay(_check_level(check_level, CheckLevel.OFF))
    except TraceError as exc:
        raise CliFailure(f"{trace_path}: {exc}", EXIT_PARSE) from exc
    except MoveError as exc:
        raise CliFailure(f"replay failed: {exc}", EXIT_INVARIANT) from exc
    click.echo(json.dumps({"events": len(tr.events), "final": end.sigma, "ok": True}))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
