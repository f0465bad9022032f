"""Command-line front end.

Inputs are JSON descriptors.  A module descriptor is one of

    {"catalog": "M3", "shift": -1}
    {"sum": [desc, desc, ...], "assoc": "left" | "explicit"}
    {"direct_sum": [desc, desc, ...]}
    {"dual": desc}
    {"presentation": {"generators": [...], "relations": [[...]], "names": [...]}}
    {"diagram": <output of DiagramModule.to_json>}

and any of them may carry "shift".  Errors print a JSON report on stderr
and exit with 2 (parse), 3 (missing oracle data), 4 (window) or 5
(internal invariant).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from importlib import resources
from typing import List, Optional, Sequence

from . import chain
from .em_spectral import ConnectedSumResult, connected_sum, multi_sum
from .errors import ParseError, PinsumError, WindowExceeded
from .gysin import (correction_terms, equivariant_reconstruct, gysin_from_json, gysin_from_model, lemma_q2_check,
                    phi1, phi2, phi3, phi4, verify_exactness)
from .modules import (CatalogId, DiagramModule, ModulePresentation, catalog_diagram, diagram_from_json,
                      diagram_from_model, dualize, present_to_diagram, render_ascii, shift)
from .resolution import matrix_factorization, resolve
from .tor_engine import UModule, hm_connected_sum, tor_bar_oracle, tor_minimal

WINDOW_ENV = "PINSUM_WINDOW"
_CAT = re.compile(r"^\s*(-?)\s*([A-Za-z_]+?)\s*(\d*)\s*$")


# ---------------------------------------------------------------------------
# descriptors

def parse_catalog(text: str, sh=0) -> CatalogId:
    try:
        return CatalogId(str(text).strip(), 0, Fraction(sh))
    except PinsumError:
        pass
    m = _CAT.match(str(text))
    if not m:
        raise ParseError(f"bad catalog name {text!r}")
    sign, fam, num = m.groups()
    if sign:
        fam = "Minus" + fam
    return CatalogId(fam, int(num) if num else 0, Fraction(sh))


def load_module(desc, window=None) -> DiagramModule:
    """Evaluate a module descriptor to a diagram (with chain model when available)."""
    if isinstance(desc, str):
        desc = {"catalog": desc}
    if not isinstance(desc, dict):
        raise ParseError("module descriptor must be an object or a catalog name")
    sh = desc.get("shift", 0)
    try:
        sh = Fraction(sh)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad shift {sh!r}") from exc
    keys = {"catalog", "sum", "direct_sum", "dual", "presentation", "diagram"} & set(desc)
    if len(keys) != 1:
        raise ParseError("module descriptor needs exactly one of catalog/sum/direct_sum/dual/presentation/diagram")
    kind = keys.pop()
    if kind == "catalog":
        return catalog_diagram(parse_catalog(desc["catalog"], sh))
    if kind == "sum":
        items = _sum_items(desc["sum"])
        res = multi_sum(items, window, desc.get("assoc", "left"))
        out = res.module
    elif kind == "direct_sum":
        parts = [load_module(x) for x in desc["direct_sum"]]
        if not parts:
            raise ParseError("empty direct sum")
        if any(p.model is None for p in parts):
            raise ParseError("direct sums need chain models for every summand")
        model = parts[0].model
        for p in parts[1:]:
            model = chain.direct_sum(model, p.model)
        out = diagram_from_model(model)
    elif kind == "dual":
        out = dualize(load_module(desc["dual"]))
    elif kind == "presentation":
        p = desc["presentation"]
        try:
            pres = ModulePresentation.make(p["generators"], p.get("relations", []), names=tuple(p.get("names", ())))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad presentation: {exc}") from exc
        out = present_to_diagram(pres)
    else:
        out = diagram_from_json(desc["diagram"])
    return shift(out, sh) if sh else out


def _sum_items(items):
    if not isinstance(items, list) or not items:
        raise ParseError("sum needs a non-empty list")
    return [_sum_items(x) if isinstance(x, list) else load_module(x) for x in items]


def read_json(path: str):
    try:
        if path.startswith("data:"):
            text = resources.files("pinsum").joinpath("data", path[5:]).read_text()
        else:
            with open(path) as fh:
                text = fh.read()
        return json.loads(text)
    except FileNotFoundError as exc:
        raise ParseError(f"no such input file {path!r}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _window(arg: Optional[Sequence[int]]):
    if arg is None:
        env = os.environ.get(WINDOW_ENV)
        if not env:
            return None
        try:
            arg = [int(x) for x in env.replace(",", " ").split()]
        except ValueError as exc:
            raise ParseError(f"{WINDOW_ENV} must hold two integers") from exc
    if len(arg) != 2:
        raise ParseError("window needs two integers")
    lo, hi = arg
    if lo >= hi:
        raise WindowExceeded("window must satisfy lo < hi", window=[lo, hi])
    return lo, hi


# ---------------------------------------------------------------------------
# commands

def _emit(fmt: str, obj, text: str) -> str:
    js = json.dumps(obj, indent=2, sort_keys=True)
    if fmt == "json":
        return js
    if fmt == "ascii":
        return text
    return text + "\n" + js


def cmd_resolve(a) -> str:
    if a.steps < 1:
        raise ParseError("--steps must be positive", steps=a.steps)
    m = load_module(read_json(a.module))
    res = resolve(m, a.steps)
    lines = [f"F_{i}: {res.betti(i)}" for i in range(res.length + 1)]
    lines += [f"d_{i + 1} = {s.str_rows()}" for i, s in enumerate(res.steps)]
    out = res.to_json()
    if res.period_pair is not None:
        A, B = matrix_factorization(res)
        lines.append(f"periodic from {res.periodic_from}: A = {A.str_rows()}, B = {B.str_rows()}")
    return _emit(a.format, out, "\n".join(lines))


def cmd_tor(a) -> str:
    if a.max_i < 0:
        raise ParseError("--max-i must be non-negative", max_i=a.max_i)
    A, B = load_module(read_json(a.left)), load_module(read_json(a.right))
    win = _window(a.window) or (-25, 0)
    fn = tor_bar_oracle if a.method == "bar" else tor_minimal
    t = fn(A, B, a.max_i, win)
    return _emit(a.format, t.to_json(), t.ascii())


def _summary(res: ConnectedSumResult) -> str:
    try:
        ct = str(correction_terms(res.module))
    except PinsumError as exc:
        ct = f"correction terms unavailable: {exc}"
    return ct


def cmd_consum(a) -> str:
    items = [load_module(read_json(p)) for p in a.modules]
    win = _window(a.window)
    if len(items) == 2:
        res = connected_sum(items[0], items[1], win, levels=a.levels)
    else:
        res = multi_sum(items, win, a.assoc)
    out = res.to_json()
    out["summary"] = _summary(res)
    text = render_ascii(res.module) + "\n" + out["summary"]
    return _emit(a.format, out, text)


def cmd_corr(a) -> str:
    m = load_module(read_json(a.module))
    g = gysin_from_json(read_json(a.gysin)) if a.gysin else None
    ct = correction_terms(m, g)
    return _emit(a.format, ct.to_json(), str(ct))


def _gysin(path: str):
    obj = read_json(path)
    if isinstance(obj, dict) and "hs" not in obj:
        m = load_module(obj.get("module", obj))
        if m.model is None:
            raise ParseError("Gysin data from a module needs a chain model")
        return gysin_from_model(m.model, m.lo, m.hi)
    return gysin_from_json(obj)


def cmd_gysin_verify(a) -> str:
    g = _gysin(a.gysin)
    rep = verify_exactness(g, _window(a.window))
    rep["lemma_q2"] = lemma_q2_check(g)
    bad = [r["degree"] for r in rep["degrees"] if not r["ok"]]
    text = "exact" if rep["ok"] else f"not exact in degrees {bad}"
    return _emit(a.format, rep, text + f"; Q^2 lemma {'holds' if rep['lemma_q2'] else 'fails'}")


def cmd_gysin_massey(a) -> str:
    g = _gysin(a.gysin)
    ops = {"phi1": phi1, "phi2": phi2, "phi3": phi3, "phi4": phi4}
    kw = {"pivot": a.pivot}
    if a.op == "phi1":
        kw["power"] = a.power
    c = ops[a.op](g, a.cls, **kw)
    obj = {"op": a.op, "class": a.cls, "degree": c.degree, "value": str(c),
           "indeterminacy_dim": len(c.indeterminacy)}
    return _emit(a.format, obj, f"{a.op}({a.cls}) = {c} in degree {c.degree}")


def cmd_reconstruct(a) -> str:
    obj = read_json(a.hm)
    try:
        tower = int(obj["tower"])
        pairs = [(int(k), int(d)) for k, d in obj.get("pairs", [])]
        diff = [(int(n), int(s)) for n, s in obj.get("differential", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad HM descriptor: {exc}") from exc
    hs, g = equivariant_reconstruct(tower, pairs, diff, _window(a.window))
    out = {"hs": hs.to_json(), "gysin": g.to_json(), "hm": g.hm.to_umodule().to_json()}
    return _emit(a.format, out, render_ascii(hs) + "\nHM = " + str(g.hm.to_umodule()))


def cmd_dualize(a) -> str:
    d = dualize(load_module(read_json(a.module)))
    return _emit(a.format, d.to_json(), render_ascii(d))


def cmd_hm_consum(a) -> str:
    A, B = UModule.from_json(read_json(a.left)), UModule.from_json(read_json(a.right))
    out = hm_connected_sum(A, B, 0 if a.normalized else 1)
    return _emit(a.format, out.to_json(), str(out))


def cmd_repro(a) -> str:
    from .repro import run_all
    rows = run_all()
    ok = all(r["ok"] for r in rows)
    text = "\n".join(f"[{'PASS' if r['ok'] else 'FAIL'}] {r['id']:>2} {r['title']}" for r in rows)
    out = _emit(a.format, {"ok": ok, "rows": rows}, text)
    if not ok:
        raise _ReproFailed(out)
    return out


class _ReproFailed(Exception):
    pass


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "ascii", "both"), default=argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="pinsum", description="Connected sums in Pin(2)-monopole Floer homology",
                                parents=[fmt])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        s = sub.add_parser(name, parents=[fmt], **kw)
        s.set_defaults(fn=fn)
        return s

    s = add("resolve", cmd_resolve, help="minimal free resolution")
    s.add_argument("module")
    s.add_argument("--steps", type=int, default=5)
    s = add("tor", cmd_tor, help="bigraded Tor table")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--max-i", type=int, default=4, dest="max_i")
    s.add_argument("--window", type=int, nargs=2)
    s.add_argument("--method", choices=("minimal", "bar"), default="minimal")
    s = add("consum", cmd_consum, help="connected sum")
    s.add_argument("modules", nargs="+")
    s.add_argument("--assoc", choices=("left", "explicit"), default="left")
    s.add_argument("--window", type=int, nargs=2)
    s.add_argument("--levels", type=int, default=12)
    s = add("corr", cmd_corr, help="correction terms")
    s.add_argument("module")
    s.add_argument("--gysin")
    g = add("gysin", None, help="Gysin triangle tools")
    gsub = g.add_subparsers(dest="gysin_command", required=True)
    s = gsub.add_parser("verify", parents=[fmt])
    s.set_defaults(fn=cmd_gysin_verify)
    s.add_argument("gysin")
    s.add_argument("--window", type=int, nargs=2)
    s = gsub.add_parser("massey", parents=[fmt])
    s.set_defaults(fn=cmd_gysin_massey)
    s.add_argument("gysin")
    s.add_argument("--op", choices=("phi1", "phi2", "phi3", "phi4"), required=True)
    s.add_argument("--class", dest="cls", required=True)
    s.add_argument("--power", type=int, default=1)
    s.add_argument("--pivot", choices=("forward", "reverse"), default="forward")
    s = add("reconstruct", cmd_reconstruct, help="HS-hat from HM data")
    s.add_argument("hm")
    s.add_argument("--window", type=int, nargs=2)
    s = add("dualize", cmd_dualize, help="orientation reversal")
    s.add_argument("module")
    s = add("hm-consum", cmd_hm_consum, help="HM of a connected sum over F[U]")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--normalized", action="store_true", help="inputs and output with S^3 in degree 0")
    add("repro", cmd_repro, help="run the acceptance matrix")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if not hasattr(args, "format"):
        args.format = "ascii"
    try:
        out = args.fn(args)
    except _ReproFailed as exc:
        print(exc.args[0])
        return 5
    except PinsumError as exc:
        print(json.dumps(exc.report, sort_keys=True, default=str), file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # anything unforeseen is an internal error, still reported as JSON
        print(json.dumps({"error": "InternalError", "type": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 5
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
