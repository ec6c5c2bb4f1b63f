"""Command-line front end.

Exit codes: 0 pass / CI, 1 I/O or parse error, 2 hypothesis failure,
3 non-CI witness found, 4 infeasible under the configured caps.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import io as fmt
from .cayley import bipartite_double_cover, build_digraph
from .citest import (
    AGREEMENT_GROUPS,
    babai_agreement,
    default_workers,
    is_ci_via_babai,
    is_dci_digraph_definitional,
    is_ci_graph_definitional,
)
from .cliques import maximal_cliques
from .groups import ConnectionSet, InfeasibleError, make_group
from .hat import (
    DEFAULT_ISO_VERTEX_CAP,
    build_hat,
    build_non_ci_witness,
    check_hypotheses,
    spiga_connection_set,
    spiga_pieces,
)
from .isocanon import DEFAULT_VERTEX_CAP
from .lemmas import (
    classify_clique,
    verify_clique_lemma,
    verify_outneighbour_lemma,
    verify_phi_lemma,
)
from .perm import DEFAULT_SUBGROUP_SEARCH_CAP

EXIT_OK, EXIT_IO, EXIT_HYPOTHESIS, EXIT_NON_CI, EXIT_INFEASIBLE = 0, 1, 2, 3, 4


class Infeasible(click.ClickException):
    exit_code = EXIT_INFEASIBLE


def _emit(kind: str, records, out: str | None) -> None:
    text = fmt.dumps_report(kind, records)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _load_set(set_path: str | None, moduli: str | None, elements: str | None) -> ConnectionSet:
    if set_path:
        try:
            return fmt.read_connection_set(set_path)
        except OSError as exc:
            raise click.FileError(set_path, str(exc)) from exc
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="SET") from exc
    if moduli is None:
        raise click.UsageError("give a connection-set file or --moduli/--elements")
    try:
        group = make_group(int(m) for m in moduli.split(",") if m.strip())
        idx = [int(e) for e in (elements or "").split(",") if e.strip()]
        if any(not 0 <= i < group.order for i in idx):
            raise ValueError("element index out of range")
        return ConnectionSet(group, frozenset(idx))
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--moduli/--elements") from exc


def _load_graph(path: str, form: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise click.FileError(path, str(exc)) from exc
    try:
        if form == "graph6":
            return fmt.decode_graph6(text)
        return fmt.loads_edge_list(text)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="GRAPH") from exc


set_options = [
    click.argument("set_path", required=False, type=click.Path(dir_okay=False)),
    click.option("--moduli", help="Cyclic factor orders, e.g. '5' or '2,4' (instead of a set file)."),
    click.option("--elements", help="Element indices (lexicographic rank), e.g. '0,1,3'."),
]


def with_set(f):
    for deco in reversed(set_options):
        f = deco(f)
    return f


workers_option = click.option(
    "--workers", type=int, default=None, envvar="CAYLEYCI_WORKERS", show_default="machine parallelism",
    help="Worker processes; results are identical for any value.",
)
iso_cap_option = click.option(
    "--iso-cap", type=int, default=DEFAULT_ISO_VERTEX_CAP, envvar="CAYLEYCI_ISO_CAP", show_default=True,
    help="Vertex cap for isomorphism tests.",
)
vertex_cap_option = click.option(
    "--vertex-cap", type=int, default=DEFAULT_VERTEX_CAP, envvar="CAYLEYCI_VERTEX_CAP", show_default=True,
    help="Vertex cap for automorphism-group and canonical-form computations.",
)
budget_option = click.option(
    "--budget", type=int, default=10**7, envvar="CAYLEYCI_BUDGET", show_default=True,
    help="Recursion-node budget for clique enumeration.",
)
out_option = click.option("--out", "-o", type=click.Path(dir_okay=False), help="Write to this file instead of stdout.")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli() -> None:
    """Build and verify Cayley graphs of small abelian groups and the hat construction."""


@cli.command()
@click.option("--out", "-o", type=click.Path(dir_okay=False), default="spiga.json", show_default=True)
def spiga(out: str) -> None:
    """Write the 760-element connection set in (Z_3)^8 and print its census."""
    pieces = spiga_pieces()
    s = spiga_connection_set()
    try:
        fmt.write_connection_set(s, out)
    except OSError as exc:
        raise click.FileError(out, str(exc)) from exc
    for (i, j, k), piece in sorted(pieces.items()):
        click.echo(f"S_{{{i},{j},{k}}}\t{len(piece)}")
    sizes = sorted(len(p) for p in pieces.values())
    big = [z for z in sizes if z == 81]
    click.echo(f"{sizes[0]} + {sizes[1]} + 81·{len(big)} = {len(s)}")


@cli.command()
@with_set
@click.option("--n", "n", type=int, required=True, help="Order of the cyclic groups A and B.")
@iso_cap_option
@click.option("--edges", type=click.Path(dir_okay=False), help="Also export the hat graph as an edge list.")
@click.option("--graph6", "graph6_path", type=click.Path(dir_okay=False), help="Also export the hat graph as graph6.")
@out_option
def hat(set_path, moduli, elements, n, iso_cap, edges, graph6_path, out) -> None:
    """Check the construction's hypotheses for (G, S, n) and build the hat graph."""
    s = _load_set(set_path, moduli, elements)
    report = check_hypotheses(s.group, s, n, iso_cap=iso_cap)
    records = [{"record": "hypothesis", **r} for r in report.to_records()]
    if n >= 3 and not s.is_symmetric:
        h = build_hat(s.group, s, n)
        records.insert(0, {"record": "metadata", **h.metadata()})
        _export(h.hat_graph, edges, graph6_path)
    _emit("hat", records, out)
    if not report.passed:
        sys.exit(EXIT_HYPOTHESIS)


def _export(graph, edges: str | None, graph6_path: str | None) -> None:
    try:
        if edges:
            Path(edges).write_text(fmt.dumps_edge_list(graph), encoding="utf-8")
        if graph6_path:
            Path(graph6_path).write_text(fmt.encode_graph6(graph) + "\n", encoding="ascii")
    except OSError as exc:
        raise click.FileError(edges or graph6_path, str(exc)) from exc
    except InfeasibleError as exc:
        raise Infeasible(str(exc)) from exc


@cli.command()
@with_set
@click.option("--mode", type=click.Choice(["r+2", "r+3"]), default="r+2", show_default=True)
@iso_cap_option
@out_option
def witness(set_path, moduli, elements, mode, iso_cap, out) -> None:
    """Build the non-CI witness for (Z_p)^(r+2) or (Z_p)^(r+3) from S in (Z_p)^r."""
    s = _load_set(set_path, moduli, elements)
    ms = set(s.group.moduli)
    if len(ms) != 1:
        raise click.BadParameter("S must live in an elementary abelian group (Z_p)^r", param_hint="SET")
    p, r = ms.pop(), s.group.rank
    res = build_non_ci_witness(p, r, s, mode=mode, iso_cap=iso_cap)
    records = [{"record": "witness", "mode": mode, "p": p, "r": r, "tricks": list(res.tricks), "rejection": res.rejection}]
    if res.hat is not None:
        records.append({"record": "metadata", **res.hat.metadata()})
    if res.report is not None:
        records += [{"record": "hypothesis", **r} for r in res.report.to_records()]
    _emit("witness", records, out)
    if not res.ok:
        sys.exit(EXIT_HYPOTHESIS)


def _ci(set_path, moduli, elements, directed, method, vertex_cap, subgroup_cap, out) -> None:
    s = _load_set(set_path, moduli, elements)
    try:
        if method == "babai":
            verdict = is_ci_via_babai(s.group, s, directed, cap=vertex_cap, subgroup_cap=subgroup_cap)
        elif directed:
            verdict = is_dci_digraph_definitional(s.group, s, cap=vertex_cap)
        else:
            verdict = is_ci_graph_definitional(s.group, s, cap=vertex_cap)
    except InfeasibleError as exc:
        _emit("ci-test", [{"record": "verdict", "verdict": "infeasible", "reason": str(exc)}], out)
        sys.exit(EXIT_INFEASIBLE)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="SET") from exc
    _emit("ci-test", [{"record": "verdict", **verdict.to_record()}], out)
    if not verdict.is_ci:
        sys.exit(EXIT_NON_CI)


method_option = click.option(
    "--method", type=click.Choice(["definitional", "babai"]), default="definitional", show_default=True
)
subgroup_cap_option = click.option(
    "--subgroup-cap", type=int, default=DEFAULT_SUBGROUP_SEARCH_CAP, envvar="CAYLEYCI_SUBGROUP_CAP",
    show_default=True, help="Largest automorphism group searched for regular subgroups.",
)


@cli.command("ci-test")
@with_set
@click.option("--directed/--undirected", default=False, show_default=True)
@method_option
@vertex_cap_option
@subgroup_cap_option
@out_option
def ci_test(set_path, moduli, elements, directed, method, vertex_cap, subgroup_cap, out) -> None:
    """Decide whether Cay(G; S) is CI (or DCI with --directed)."""
    _ci(set_path, moduli, elements, directed, method, vertex_cap, subgroup_cap, out)


@cli.command("dci-test")
@with_set
@method_option
@vertex_cap_option
@subgroup_cap_option
@out_option
def dci_test(set_path, moduli, elements, method, vertex_cap, subgroup_cap, out) -> None:
    """Decide whether the Cayley digraph Cay(G; S) is DCI."""
    _ci(set_path, moduli, elements, True, method, vertex_cap, subgroup_cap, out)


@cli.command()
@click.argument("graph_path", required=False, type=click.Path(dir_okay=False))
@click.option("--format", "form", type=click.Choice(["edges", "graph6"]), default="edges", show_default=True)
@click.option("--set", "set_path", type=click.Path(dir_okay=False), help="Use the hat graph of this set instead.")
@click.option("--moduli")
@click.option("--elements")
@click.option("--n", "n", type=int, help="Hat parameter when --set/--moduli is given.")
@budget_option
@out_option
def cliques(graph_path, form, set_path, moduli, elements, n, budget, out) -> None:
    """List the maximal cliques of an undirected graph, classified when it is a hat graph."""
    hat_obj = None
    if graph_path:
        graph = _load_graph(graph_path, form)
    else:
        if n is None:
            raise click.UsageError("--n is required with --set/--moduli")
        s = _load_set(set_path, moduli, elements)
        try:
            hat_obj = build_hat(s.group, s, n)
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="SET") from exc
        graph = hat_obj.hat_graph
    try:
        found = maximal_cliques(graph, budget=budget)
    except InfeasibleError as exc:
        raise Infeasible(str(exc)) from exc
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="GRAPH") from exc
    records = []
    for c in found:
        rec = {"record": "clique", "size": len(c), "vertices": c}
        if hat_obj is not None:
            rec["kind"] = classify_clique(c, hat_obj, check=False).kind.value
        records.append(rec)
    _emit("cliques", records, out)


@cli.command()
@click.option("--suite", type=click.Choice(["cliques", "outneighbour", "phi", "babai-agreement"]), required=True)
@click.option("--set", "set_path", type=click.Path(dir_okay=False), help="Connection-set file.")
@click.option("--moduli", help="Group moduli, e.g. '5' or '2,2,2'.")
@click.option("--elements", help="Element indices of S; omit for the exhaustive outneighbour scan.")
@click.option("--n", "n", type=int, help="Hat parameter for the cliques and phi suites.")
@click.option("--mode", type=click.Choice(["full", "spot"]), default="full", show_default=True)
@click.option("--groups", help="Semicolon-separated moduli lists for babai-agreement, e.g. '4;2,2;8'.")
@budget_option
@vertex_cap_option
@workers_option
@out_option
def verify(suite, set_path, moduli, elements, n, mode, groups, budget, vertex_cap, workers, out) -> None:
    """Run one of the structural verification suites."""
    workers = workers or default_workers()
    try:
        if suite == "babai-agreement":
            gs = AGREEMENT_GROUPS
            if groups:
                gs = [tuple(int(m) for m in g.split(",") if m.strip()) for g in groups.split(";")]
            rep = babai_agreement(gs, workers=workers)
            records = [{"record": "summary", "passed": rep.passed, "checked": rep.checked, "non_ci": rep.non_ci}]
            records += [{"record": "group", "group": k, "all_ci": v} for k, v in rep.group_verdicts.items()]
            records += [{"record": "disagreement", **d} for d in rep.disagreements]
            passed = rep.passed
        elif suite == "outneighbour":
            if set_path or elements is not None:
                s = _load_set(set_path, moduli, elements)
                rep = verify_outneighbour_lemma(s.group, s)
            else:
                if moduli is None:
                    raise click.UsageError("--moduli is required")
                rep = verify_outneighbour_lemma(make_group(int(m) for m in moduli.split(",")))
            records = [{"record": "summary", "passed": rep.passed, "group": list(rep.group_moduli), "sets_checked": rep.sets_checked}]
            records += [{"record": "counterexample", **c} for c in rep.counterexamples]
            passed = rep.passed
        else:
            if n is None:
                raise click.UsageError("--n is required for this suite")
            s = _load_set(set_path, moduli, elements)
            try:
                h = build_hat(s.group, s, n)
            except ValueError as exc:
                raise click.BadParameter(str(exc), param_hint="SET") from exc
            if suite == "cliques":
                rep = verify_clique_lemma(h, mode=mode, budget=budget)
                records = [
                    {
                        "record": "summary",
                        "passed": rep.passed,
                        "mode": rep.mode,
                        "vertices": rep.vertices,
                        "type_a": [rep.type_a_maximal, rep.type_a_checked],
                        "type_b": [rep.type_b_maximal, rep.type_b_checked],
                        "size_checks": rep.size_checks,
                        "degree": rep.degree,
                        "degree_direct": rep.degree_direct,
                    }
                ]
                records += [
                    {"record": "census", "kind": k, "count": c, "example": rep.examples.get(k)}
                    for k, c in rep.census.items()
                ]
                records += [{"record": "unclassified", "vertices": u} for u in rep.unclassified]
            else:
                rep = verify_phi_lemma(h, cap=vertex_cap)
                records = [
                    {
                        "record": "summary",
                        "passed": rep.passed,
                        "vertices": rep.vertices,
                        "hypotheses": rep.hypotheses,
                        "aut_order": rep.aut_order,
                        "stabilizer_order": rep.stabilizer_order,
                        "checked": rep.checked,
                        "orientations": rep.orientation_counts,
                        "lifts_checked": rep.lifts_checked,
                    }
                ]
                records += [{"record": "failure", **f} for f in rep.failures + rep.lift_failures]
            passed = rep.passed
    except InfeasibleError as exc:
        raise Infeasible(str(exc)) from exc
    _emit(f"verify-{suite}", records, out)
    if not passed:
        sys.exit(EXIT_HYPOTHESIS)


@cli.command()
@with_set
@click.option("--n", "n", type=int, help="Export the hat graph for this n instead of Cay(G; S).")
@click.option("--format", "form", type=click.Choice(["edges", "graph6", "meta", "set"]), default="edges", show_default=True)
@out_option
def export(set_path, moduli, elements, n, form, out) -> None:
    """Export Cay(G; S) or its hat graph."""
    s = _load_set(set_path, moduli, elements)
    try:
        if n is not None:
            h = build_hat(s.group, s, n)
            graph, meta, sset = h.hat_graph, h.metadata(), h.symmetric_set
        else:
            graph, meta, sset = build_digraph(s.group, s), {"moduli": list(s.group.moduli), "set_size": len(s)}, s
        if form == "edges":
            text = fmt.dumps_edge_list(graph)
        elif form == "graph6":
            text = fmt.encode_graph6(graph) + "\n"
        elif form == "set":
            text = fmt.dumps_connection_set(sset)
        else:
            text = fmt.dumps_report("metadata", [meta])
    except InfeasibleError as exc:
        raise Infeasible(str(exc)) from exc
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@cli.command("double-cover")
@click.argument("graph_path", type=click.Path(dir_okay=False))
@click.option("--format", "form", type=click.Choice(["edges", "graph6"]), default="edges", show_default=True)
@click.option("--to", "to_form", type=click.Choice(["edges", "graph6"]), default="graph6", show_default=True)
@out_option
def double_cover(graph_path, form, to_form, out) -> None:
    """Bipartite double cover: (x,0) ~ (y,1) iff x -> y; vertex (v,i) is v + i|V|."""
    cover = bipartite_double_cover(_load_graph(graph_path, form))
    text = fmt.encode_graph6(cover) + "\n" if to_form == "graph6" else fmt.dumps_edge_list(cover)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def main(argv=None) -> int:
    """Entry point mapping usage and parse errors to exit code 1."""
    try:
        cli.main(args=argv, prog_name="cayleyci", standalone_mode=False)
    except Infeasible as exc:
        exc.show()
        return EXIT_INFEASIBLE
    except click.ClickException as exc:
        exc.show()
        return EXIT_IO
    except click.Abort:
        return EXIT_IO
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
