"""Command line interface: ``ajt jones | apoly | fit | verify``.

Exit codes: 0 verified, 1 mathematical failure, 2 invalid or inadmissible
input, 3 resource bound exceeded or inconclusive.
"""

import ast
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

import click

from . import cache
from .conjecture import (
    DEFAULT_T0,
    a_polynomial_cable,
    a_polynomial_factors,
    case_of,
    strong_aj_verify,
    symmetry_exponents,
)
from .expfit import INCONCLUSIVE, MEMBER, fit
from .jones import CableParams, InvalidKnot, InvalidParams, colored_jones, jones_sequence, parse_knot
from .qtorus import ColorSequence, TorusElement, apply_to_sequence
from .ring import LaurentScalar

EXIT_OK, EXIT_MATH, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(click.ClickException):
    exit_code = EXIT_INPUT


@dataclass
class RunConfig:
    params: CableParams
    n_range: tuple = None
    mode: str = "auto"
    t0_list: tuple = DEFAULT_T0
    K0: int = 8
    K_max: int = 256
    extra_checks: int = 5
    parallelism: int = 1
    output: str = "text"
    out_path: str = None

    def __post_init__(self):
        if self.n_range is not None and self.n_range[0] > self.n_range[1]:
            raise UsageError(f"empty color range {self.n_range}")
        if not 1 <= self.K0 <= self.K_max:
            raise UsageError("need 1 <= K0 <= K_max")
        if self.extra_checks < 1:
            raise UsageError("need at least one extra check")
        if any(t == 0 for t in self.t0_list):
            raise UsageError("t0 values must be nonzero")
        if len(set(self.t0_list)) != len(self.t0_list):
            raise UsageError("t0 values must be pairwise distinct")
        if self.parallelism < 1:
            raise UsageError("parallelism must be >= 1")
        if self.mode not in ("auto", "symbolic", "specialized"):
            raise UsageError(f"unknown mode {self.mode!r}")


# ------------------------------------------------------------------ parsing

def parse_range(text):
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?", text)
    if not m:
        raise UsageError(f"bad range {text!r}; expected LO..HI")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) is not None else lo
    return lo, hi


def parse_t0_list(text):
    try:
        return tuple(Fraction(x.strip()) for x in text.split(",") if x.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad t0 list {text!r}") from None


_ALLOWED = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Add, ast.Sub, ast.Mult, ast.USub, ast.UAdd,
            ast.Constant, ast.Name, ast.Load)


def _int_expr(expr, n):
    src = re.sub(r"(\d)\s*n", r"\1*n", expr)
    tree = ast.parse(src, mode="eval")
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED) or (isinstance(node, ast.Name) and node.id != "n"):
            raise UsageError(f"unsupported exponent expression {expr!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, int):
            raise UsageError(f"unsupported exponent expression {expr!r}")
    return int(eval(compile(tree, "<expr>", "eval"), {"__builtins__": {}}, {"n": n}))


def seq_from_expr(text):
    """Sequence n -> scalar from text like ``t^{2n}+t^{-2n}``."""

    def value(n):
        body = re.sub(r"\{([^}]*)\}", lambda m: str(_int_expr(m.group(1), n)), text)
        return LaurentScalar.parse(body)

    value(1)
    return ColorSequence(value, name=text)


def _knot(text):
    try:
        k = parse_knot(text)
    except (InvalidKnot, InvalidParams) as exc:
        raise UsageError(str(exc)) from None
    return k.knot if isinstance(k, CableParams) else k


def _params(p, q, r, s):
    try:
        return CableParams(p, q, r, s)
    except InvalidParams as exc:
        raise UsageError(str(exc)) from None


def _emit(text, out_path=None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


# ----------------------------------------------------------------- commands

@click.group()
@click.option("--no-cache", is_flag=True, help="Ignore AJT_CACHE_DIR.")
@click.pass_context
def main(ctx, no_cache):
    """Colored Jones polynomials of cable knots and AJ-conjecture witnesses."""
    ctx.obj = {"cache": not no_cache}
    if not no_cache:
        cache.load_cache()


def _save(ctx):
    if ctx.obj.get("cache"):
        cache.save_cache()


@main.command("jones")
@click.argument("knot")
@click.argument("n", type=int)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def cmd_jones(ctx, knot, n, as_json):
    """Print J_K(n) for KNOT in U, T(p,q), C(p,q;r,s) notation."""
    K = _knot(knot)
    v = colored_jones(K, n)
    if as_json:
        _emit(json.dumps({"knot": str(K), "n": n, "value": str(v), "epsilon": v.epsilon()}))
    else:
        _emit(str(v))
        _emit(f"epsilon = {v.epsilon()}")
    _save(ctx)


def _factor_text(f):
    """Render a factor with descending L-degree, e.g. (L^2-M^-114)."""
    parts = []
    for (a, b), c in sorted(f.terms.items(), key=lambda kv: (-kv[0][1], -kv[0][0])):
        mono = "".join(x for x in (
            "" if not b else "L" if b == 1 else f"L^{b}",
            "" if not a else "M" if a == 1 else f"M^{a}") if x)
        body = mono if abs(c) == 1 and mono else f"{abs(c)}{mono}"
        parts.append(("-" if c < 0 else "+" if parts else "") + body)
    return "(" + "".join(parts) + ")"


@main.command("apoly")
@click.argument("p", type=int)
@click.argument("q", type=int)
@click.argument("r", type=int)
@click.argument("s", type=int)
@click.option("--json", "as_json", is_flag=True)
def cmd_apoly(p, q, r, s, as_json):
    """Print the A-polynomial of the (r,s)-cable of T(p,q)."""
    prm = _params(p, q, r, s)
    A = a_polynomial_cable(prm, strict=False)
    factors = "".join(_factor_text(f) for f in a_polynomial_factors(prm))
    eta, a, b = symmetry_exponents(A)
    flag = "admissible" if prm.admissible else f"inadmissible: r in (0, pqs), pqs = {prm.pqs}"
    if as_json:
        _emit(json.dumps({"params": [p, q, r, s], "case": case_of(prm).name, "admissible": prm.admissible,
                          "factors": factors, "expanded": str(A), "terms": A.to_json(),
                          "symmetry": {"eta": eta, "a": a, "b": b}}))
    else:
        _emit(f"case: {case_of(prm).name}")
        _emit(f"{flag}")
        _emit(f"factors: {factors}")
        _emit(f"expanded: {A}")
        _emit(f"symmetry: eta = {eta}, a = {a}, b = {b}")


@main.command("fit")
@click.option("--op", "op_text", default="1", show_default=True, help="Operator, e.g. 'L^2 - t^-24 M^-12'.")
@click.option("--seq", "seq_text", default=None, help="Knot whose colored Jones sequence is used.")
@click.option("--seq-expr", default=None, help="Explicit sequence such as 't^{2n}+t^{-2n}'.")
@click.option("--K", "K0", default=8, show_default=True, type=int)
@click.option("--K-max", "K_max", default=256, show_default=True, type=int)
@click.option("--extra", default=5, show_default=True, type=int)
@click.option("--window-start", default=1, show_default=True, type=int)
@click.option("--method", type=click.Choice(["probe", "dense"]), default="probe", show_default=True)
@click.option("--out", "out_path", default=None)
@click.pass_context
def cmd_fit(ctx, op_text, seq_text, seq_expr, K0, K_max, extra, window_start, method, out_path):
    """Fit (OP f)(n) as an exponential polynomial in t^(2n) and print the report."""
    if (seq_text is None) == (seq_expr is None):
        raise UsageError("give exactly one of --seq and --seq-expr")
    if not 1 <= K0 <= K_max or extra < 1:
        raise UsageError("need 1 <= K <= K_max and extra >= 1")
    try:
        op = TorusElement.parse(op_text)
    except ValueError as exc:
        raise UsageError(f"cannot parse operator: {exc}") from None
    if seq_text is not None:
        K = _knot(seq_text)
        f = jones_sequence(K)

        def specialize(dom):
            opd, g = op.specialize(dom), jones_sequence(K, dom)
            return lambda n: apply_to_sequence(opd, g, n)
    else:
        specialize = None
        try:
            f = seq_from_expr(seq_expr)
        except ValueError as exc:
            raise UsageError(f"cannot parse sequence: {exc}") from None
    try:
        rep = fit(lambda n: apply_to_sequence(op, f, n), window_start, K0, extra, K_max=K_max,
                  method=method, specialize=specialize)
    except MemoryError:
        click.echo("memory bound exceeded", err=True)
        sys.exit(EXIT_RESOURCE)
    _emit(json.dumps(rep.to_json(), indent=2), out_path)
    _save(ctx)
    sys.exit(EXIT_OK if rep.status == MEMBER else EXIT_RESOURCE if rep.status == INCONCLUSIVE else EXIT_MATH)


@main.command("verify")
@click.option("--p", type=int, required=True)
@click.option("--q", type=int, required=True)
@click.option("--r", type=int, required=True)
@click.option("--s", type=int, required=True)
@click.option("--n", "n_text", default=None, help="Color range LO..HI for the annihilation check.")
@click.option("--mode", type=click.Choice(["auto", "symbolic", "specialized"]), default="auto", show_default=True)
@click.option("--t0", "t0_text", default="2,3/2,5/3", show_default=True)
@click.option("--K0", "K0", default=8, show_default=True, type=int)
@click.option("--K-max", "K_max", default=256, show_default=True, type=int)
@click.option("--extra", default=5, show_default=True, type=int)
@click.option("--parallelism", default=1, show_default=True, type=int)
@click.option("--json", "as_json", is_flag=True)
@click.option("--out", "out_path", default=None)
@click.pass_context
def cmd_verify(ctx, p, q, r, s, n_text, mode, t0_text, K0, K_max, extra, parallelism, as_json, out_path):
    """Run the full strong AJ pipeline for the (r,s)-cable of T(p,q)."""
    prm = _params(p, q, r, s)
    cfg = RunConfig(prm, parse_range(n_text) if n_text else None, mode, parse_t0_list(t0_text), K0, K_max,
                    extra, parallelism, "json" if as_json else "text", out_path)
    if not prm.admissible:
        click.echo(f"inadmissible parameters: r = {r} lies between 0 and pqs = {prm.pqs}", err=True)
        sys.exit(EXIT_INPUT)
    n_range = range(cfg.n_range[0], cfg.n_range[1] + 1) if cfg.n_range else None
    try:
        rep = strong_aj_verify(prm, n_range, cfg.mode, cfg.t0_list, cfg.K0, cfg.K_max, cfg.extra_checks,
                               workers=cfg.parallelism)
    except MemoryError:
        click.echo("memory bound exceeded", err=True)
        sys.exit(EXIT_RESOURCE)
    if cfg.output == "json":
        _emit(json.dumps(rep.to_json(), indent=2, default=str), out_path)
    else:
        lines = [f"params {prm} case {rep.case} mode {rep.mode}"]
        for st in rep.stages:
            lines.append(f"  {st['name']:<18} {st['status']:<5} {st['elapsed_ms']:>10.1f} ms")
        if rep.monomial:
            mono = rep.monomial
            lines.append(f"  m = {rep.m}, k = {rep.k}, eps(SR) = {mono['eta']} M^{mono['a_exp']} L^{mono['b_exp']}"
                         f" A_C^{rep.power}")
        lines.append("verified" if rep.ok else "NOT verified")
        _emit("\n".join(lines), out_path)
    _save(ctx)
    if rep.ok:
        sys.exit(EXIT_OK)
    if any(f.status == INCONCLUSIVE for f in rep.fits):
        sys.exit(EXIT_RESOURCE)
    sys.exit(EXIT_MATH)


if __name__ == "__main__":
    main()
