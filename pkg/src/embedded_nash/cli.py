"""Command-line front end.

Reads a branch document ``{"nu": 2, "char_exponents": [3]}`` or a generic
graph document from stdin (or ``--input``) and writes structured output to
stdout.  Diagnostics go to stderr.  Exit status: 0 success, 1 usage error,
2 validation failure, 3 precision exhaustion.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence, TextIO

from .branch import PlaneBranch, derive_invariants, validate_branch
from .contact import (
    Location,
    classify,
    contact_components,
    fim_formula,
    fim_monotonicity_check,
    verify_inclusions,
)
from .errors import (
    GenericGraphUnsupported,
    MalformedDocument,
    MissingM,
    NashError,
    UnknownCommand,
    UnknownVertex,
    UsageError,
)
from .graph import (
    DualGraph,
    GraphVertex,
    build_minimal_graph,
    contact_codim,
    divisor_label,
    dlt_set,
    essential_set,
    export_dot,
    graph_document,
    lct_m,
    load_generic_graph,
    refine_m_separating,
    separating_graph,
    top_contact_set,
    vertex_id,
)
from .oracle import cross_validate

COMMANDS = ("resolve", "separate", "valuations", "components", "fim", "lct", "check", "export")
NEEDS_M = {"separate", "valuations", "components", "fim", "lct", "check"}
KINDS = ("essential", "dlt", "contact", "top")
FORMATS = ("structured", "table", "dot")


@dataclass
class Request:
    command: str
    document: Any
    m: Optional[int] = None
    kind: str = "essential"
    vertex: Optional[str] = None
    trials: int = 2
    seed: int = 0
    literal_kappa: bool = False
    format: str = "structured"

    def echo(self) -> dict[str, Any]:
        out: dict[str, Any] = {"command": self.command}
        if self.m is not None:
            out["m"] = self.m
        if self.command == "valuations":
            out["kind"] = self.kind
        if self.command == "fim":
            out["vertex"] = self.vertex
            out["literal_kappa"] = self.literal_kappa
        if self.command == "check":
            out["trials"] = self.trials
            out["seed"] = self.seed
        return out


@dataclass
class Response:
    request: Request
    payload: Any
    diagnostics: list[str] = field(default_factory=list)
    text: Optional[str] = None  # preformatted output (DOT)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        if "invalid choice" in message and "command" in message:
            raise UnknownCommand(message)
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="embedded-nash", description="Contact loci and m-valuations of plane branches.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--m", type=int)
    p.add_argument("--kind", choices=KINDS, default="essential")
    p.add_argument("--vertex")
    p.add_argument("--trials", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--literal-kappa", action="store_true")
    p.add_argument("--format", choices=FORMATS + ("json",))
    p.add_argument("--input")
    return p


def parse_request(argv: Sequence[str], stdin: Optional[str] = None) -> Request:
    args = _build_parser().parse_args(list(argv))
    if args.command in NEEDS_M and args.m is None:
        raise MissingM(f"command {args.command!r} requires --m")
    if args.m is not None and args.m < 1:
        raise UsageError("--m must be a positive integer")
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if args.command == "fim" and not args.vertex:
        raise UsageError("command 'fim' requires --vertex")
    if args.input:
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc}") from None
    else:
        text = stdin if stdin is not None else sys.stdin.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"input is not a valid document: {exc}") from None
    fmt = args.format or ("dot" if args.command == "export" else "structured")
    if fmt == "json":
        fmt = "structured"
    return Request(args.command, doc, args.m, args.kind, args.vertex, args.trials, args.seed, args.literal_kappa, fmt)


def _load(doc: Any) -> tuple[Optional[PlaneBranch], DualGraph]:
    if isinstance(doc, dict) and "nu" in doc:
        exps = doc.get("char_exponents", [])
        nu = doc["nu"]
        if isinstance(nu, bool) or not isinstance(nu, int) or not isinstance(exps, list) or not all(
            isinstance(k, int) and not isinstance(k, bool) for k in exps
        ):
            raise MalformedDocument("branch document needs integer 'nu' and integer array 'char_exponents'")
        br = validate_branch(nu, exps)
        return br, build_minimal_graph(br)
    if isinstance(doc, dict) and isinstance(doc.get("payload"), dict) and "graph" in doc["payload"]:
        doc = doc["payload"]["graph"]
    if isinstance(doc, dict) and "vertices" in doc:
        return None, load_generic_graph(doc)
    raise MalformedDocument("document is neither a branch nor a graph description")


def _q(x: Fraction) -> str:
    return str(Fraction(x))


def _fim_json(entries) -> list[dict[str, Any]]:
    return [{"value": _q(v), "mult": k} for v, k in entries]


def _vertex_rows(graph: DualGraph, ids) -> list[dict[str, Any]]:
    rows = []
    for vid in graph.sorted_ids(ids):
        v = graph.vertices[vid]
        row: dict[str, Any] = {"id": vid, "N": v.N, "nu": v.nu}
        if v.aliases:
            row["aliases"] = list(v.aliases)
        rows.append(row)
    return rows


_VERTEX_RE = re.compile(r"^L?(\d+):(\d+)/(\d+)$")


def _location(branch: PlaneBranch, graph: DualGraph, sel: str) -> tuple[str, Location]:
    inv = derive_invariants(branch)
    mt = _VERTEX_RE.match(sel)
    if mt:
        level, r, s = (int(x) for x in mt.groups())
        big_n, nu = divisor_label(inv, level, r, s)
        vid = vertex_id(level, r, s)
        return vid, classify(inv, GraphVertex(vid, "exceptional", big_n, nu, level, (r, s)))
    try:
        vid = graph.resolve_id(sel)
    except UnknownVertex:
        raise UnknownVertex(f"cannot parse vertex selector {sel!r}; use L<level>:<r>/<s> or R<j>") from None
    v = graph.vertices[vid]
    if not v.is_exceptional:
        raise UnknownVertex(f"{sel!r} is not an exceptional divisor")
    return vid, classify(inv, v)


def execute(req: Request) -> Response:
    branch, base = _load(req.document)
    m = req.m
    diag: list[str] = []
    cmd = req.command
    if cmd == "resolve":
        return Response(req, {"graph": graph_document(base)}, diag)
    if cmd == "export":
        graph = base if m is None else (separating_graph(branch, m) if branch else refine_m_separating(base, m))
        hl = essential_set(graph, m) if m is not None else set()
        return Response(req, {"graph": graph_document(graph)}, diag, export_dot(graph, hl))
    assert m is not None
    graph = separating_graph(branch, m) if branch else refine_m_separating(base, m)
    if cmd == "separate":
        return Response(req, {"graph": graph_document(graph)}, diag)
    if cmd == "lct":
        lct = lct_m(graph, m)
        if lct is None:
            diag.append("S_m empty")
            return Response(req, None, diag)
        return Response(req, {"lct": _q(lct), "codim": contact_codim(graph, m), "top": graph.sorted_ids(top_contact_set(graph, m))}, diag)
    if cmd == "valuations":
        if req.kind == "essential":
            ids = essential_set(graph, m)
        elif req.kind == "dlt":
            ids = dlt_set(graph, m)
        elif req.kind == "top":
            ids = top_contact_set(graph, m)
        else:
            if branch is None:
                raise GenericGraphUnsupported("contact valuations need a branch document")
            ids = {c.representative for c in contact_components(branch, m)}
        return Response(req, {"kind": req.kind, "vertices": _vertex_rows(graph, ids)}, diag)
    if branch is None:
        raise GenericGraphUnsupported(f"command {cmd!r} needs a branch document")
    if cmd == "components":
        comps = contact_components(branch, m)
        if not comps:
            diag.append("contact locus is empty")
        recs = []
        for c in comps:
            rec: dict[str, Any] = {"kind": c.kind}
            if c.group is not None:
                rec["group"] = c.group
            rec.update(
                representative=c.representative,
                codim=c.codim,
                fim=_fim_json(c.fim.entries),
                members=list(c.members),
            )
            recs.append(rec)
        return Response(req, {"components": recs}, diag)
    if cmd == "fim":
        vid, loc = _location(branch, graph, req.vertex or "")
        fim = fim_formula(derive_invariants(branch), loc, m, req.literal_kappa)
        if req.literal_kappa:
            diag.append("literal kappa_{g+1} = 1 evaluation; non-authoritative")
        return Response(
            req,
            {
                "vertex": vid,
                "location": {"level": loc.level, "coords": list(loc.coords), "region": loc.region},
                "rho": _q(fim.rho),
                "entries": _fim_json(fim.entries),
                "sum": _q(fim.total),
                "authoritative": not req.literal_kappa,
            },
            diag,
        )
    if cmd == "check":
        cv = cross_validate(branch, m, req.trials, req.seed)
        inc = verify_inclusions(branch, m)
        mono = fim_monotonicity_check(branch, m)
        vertices = []
        for rec in cv["vertices"]:
            vertices.append(
                {
                    "vertex": rec["vertex"],
                    "expected": _fim_json(rec["expected"].entries),
                    "trials": [
                        {"alpha": _q(t["alpha"]), "beta": _q(t["beta"]), "order": _q(t["order"]), "pass": t["pass"]}
                        for t in rec["trials"]
                    ],
                    "pass": rec["pass"],
                }
            )
        return Response(
            req,
            {
                "oracle": {"vertices": vertices, "pass": cv["pass"]},
                "inclusions": inc,
                "monotonicity": mono,
                "pass": True,
            },
            diag,
        )
    raise UnknownCommand(cmd)


def _table(resp: Response) -> str:
    p = resp.payload
    cmd = resp.request.command
    if cmd == "lct":
        if p is None:
            return "lct: none (S_m empty)\n"
        return f"lct:   {p['lct']}\ncodim: {p['codim']}\ntop:   {', '.join(p['top'])}\n"
    if cmd == "components":
        if not p["components"]:
            return "contact locus is empty\n"
        rows = [("kind", "representative", "codim", "fim", "members")]
        for c in p["components"]:
            kind = c["kind"] + (f"({c['group']})" if "group" in c else "")
            fim = " ".join(f"{e['value']}x{e['mult']}" for e in c["fim"])
            rows.append((kind, c["representative"], str(c["codim"]), fim, " ".join(c["members"])))
        return _align(rows)
    if cmd in ("resolve", "separate", "export"):
        rows = [("id", "kind", "N", "nu")]
        for v in p["graph"]["vertices"]:
            rows.append((v["id"], v["kind"], str(v["N"]), str(v["nu"])))
        edges = "\n".join(f"{a} -- {b}" for a, b in p["graph"]["edges"])
        return _align(rows) + edges + ("\n" if edges else "")
    if cmd == "valuations":
        rows = [("id", "N", "nu")] + [(v["id"], str(v["N"]), str(v["nu"])) for v in p["vertices"]]
        return f"{p['kind']} valuations\n" + _align(rows)
    if cmd == "fim":
        fim = " ".join(f"{e['value']}x{e['mult']}" for e in p["entries"])
        return f"vertex: {p['vertex']}\nregion: {p['location']['region']}\nrho:    {p['rho']}\nfim:    {fim}\n"
    if cmd == "check":
        rows = [("vertex", "trials", "pass")]
        for v in p["oracle"]["vertices"]:
            rows.append((v["vertex"], str(len(v["trials"])), "yes" if v["pass"] else "no"))
        inc = p["inclusions"]
        return _align(rows) + f"dlt: {inc['dlt']}\ncontact: {inc['contact']}\nessential: {inc['essential']}\n"
    return json.dumps(p, indent=2, ensure_ascii=False) + "\n"


def _align(rows: list[tuple[str, ...]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in rows)


def render(resp: Response, fmt: str) -> str:
    if fmt == "dot":
        if resp.text is None:
            raise UsageError("dot output is only available for the export command")
        return resp.text
    if fmt == "table":
        return _table(resp)
    doc = {"request": resp.request.echo(), "payload": resp.payload, "diagnostics": resp.diagnostics}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def main(argv: Optional[Sequence[str]] = None, stdin: Optional[str] = None, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        req = parse_request(sys.argv[1:] if argv is None else argv, stdin)
        resp = execute(req)
        text = render(resp, req.format)
    except NashError as exc:
        err.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return exc.exit_status
    for d in resp.diagnostics:
        err.write(f"warning: {d}\n")
    out.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
