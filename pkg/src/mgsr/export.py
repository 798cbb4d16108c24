"""Model export: infix text, LaTeX, a portable C snippet, and JSON.

Human-readable formats (infix, LaTeX) print the simplified model with
3-significant-digit coefficients. The C snippet and the JSON document are
full-precision (17 significant digits) renderings of the raw weighted
genes, so they reproduce the archive predictions exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ExportError
from .regress import FittedModel, gene_response_matrix
from .simplify import (
    CCall,
    CConst,
    CExpr,
    CPow,
    CProd,
    CSum,
    CVar,
    simplify_model,
)
from . import tree as T

HUMAN_SIG = 3
FULL_SIG = 17

EXPORT_FORMATS = ("infix", "latex", "c", "json")


def fmt_num(value: float, sig: int = HUMAN_SIG) -> str:
    s = format(float(value), f".{sig}g")
    return s[1:] if s.startswith("+") else s


# ---------------------------------------------------------------------------
# infix

def to_infix(e: CExpr, sig: int = HUMAN_SIG) -> str:
    if isinstance(e, CConst):
        return fmt_num(e.value, sig)
    if isinstance(e, CVar):
        return f"x{e.index}"
    if isinstance(e, CCall):
        return f"{e.name}({', '.join(to_infix(a, sig) for a in e.args)})"
    if isinstance(e, CPow):
        base = to_infix(e.base, sig)
        if isinstance(e.base, (CSum, CProd, CPow)):
            base = f"({base})"
        return f"{base}^{e.power}" if e.power >= 0 else f"{base}^({e.power})"
    if isinstance(e, CProd):
        parts = []
        for f in e.factors:
            s = to_infix(f, sig)
            parts.append(f"({s})" if isinstance(f, CSum) else s)
        return "*".join(parts)
    out = ""
    for coeff, mono in e.terms:
        ms = to_infix(mono, sig)
        if isinstance(mono, CSum):
            ms = f"({ms})"
        mag = abs(coeff)
        piece = ms if mag == 1.0 else f"{fmt_num(mag, sig)}*{ms}"
        if not out:
            out = piece if coeff > 0 else f"-{piece}"
        else:
            out += f" + {piece}" if coeff > 0 else f" - {piece}"
    if e.const != 0.0 or not out:
        cs = fmt_num(abs(e.const), sig)
        if not out:
            out = fmt_num(e.const, sig)
        else:
            out += f" + {cs}" if e.const > 0 else f" - {cs}"
    return out


# ---------------------------------------------------------------------------
# LaTeX

_LATEX_CALLS = {
    "sin": lambda a: f"\\sin\\left({a[0]}\\right)",
    "cos": lambda a: f"\\cos\\left({a[0]}\\right)",
    "tanh": lambda a: f"\\tanh\\left({a[0]}\\right)",
    "exp": lambda a: f"\\exp\\left({a[0]}\\right)",
    "negexp": lambda a: f"\\exp\\left(-{a[0]}\\right)",
    "gauss": lambda a: f"\\exp\\left(-{a[0]}^{{2}}\\right)",
    "log10": lambda a: f"\\log_{{10}}\\left(\\left|{a[0]}\\right|\\right)",
    "sqrt": lambda a: f"\\sqrt{{\\left|{a[0]}\\right|}}",
    "abs": lambda a: f"\\left|{a[0]}\\right|",
    "pdivide": lambda a: f"\\frac{{{a[0]}}}{{{a[1]}}}",
    "divide": lambda a: f"\\frac{{{a[0]}}}{{{a[1]}}}",
}


def to_latex(e: CExpr, sig: int = HUMAN_SIG) -> str:
    if isinstance(e, CConst):
        return fmt_num(e.value, sig)
    if isinstance(e, CVar):
        return f"x_{{{e.index}}}"
    if isinstance(e, CCall):
        args = [to_latex(a, sig) for a in e.args]
        render = _LATEX_CALLS.get(e.name)
        if render:
            return render(args)
        return f"\\operatorname{{{e.name}}}\\left({', '.join(args)}\\right)"
    if isinstance(e, CPow):
        base = to_latex(e.base, sig)
        if isinstance(e.base, (CSum, CProd)):
            base = f"\\left({base}\\right)"
        return f"{base}^{{{e.power}}}"
    if isinstance(e, CProd):
        parts = []
        for f in e.factors:
            s = to_latex(f, sig)
            parts.append(f"\\left({s}\\right)" if isinstance(f, CSum) else s)
        return "\\,".join(parts)
    out = ""
    for coeff, mono in e.terms:
        ms = to_latex(mono, sig)
        if isinstance(mono, CSum):
            ms = f"\\left({ms}\\right)"
        mag = abs(coeff)
        piece = ms if mag == 1.0 else f"{fmt_num(mag, sig)}\\,{ms}"
        if not out:
            out = piece if coeff > 0 else f"-{piece}"
        else:
            out += f" + {piece}" if coeff > 0 else f" - {piece}"
    if e.const != 0.0 or not out:
        cs = fmt_num(abs(e.const), sig)
        if not out:
            out = fmt_num(e.const, sig)
        else:
            out += f" + {cs}" if e.const > 0 else f" - {cs}"
    return out


# ---------------------------------------------------------------------------
# C snippet

_C_HELPERS = {
    "pdivide": "static double pdiv(double a, double b) { return fabs(b) < 1e-12 ? 0.0 : a / b; }",
    "log10": "static double plog10(double x) { return x == 0.0 ? 0.0 : log10(fabs(x)); }",
    "square": "static double square(double x) { return x * x; }",
    "cube": "static double cube(double x) { return x * x * x; }",
    "gauss": "static double gauss(double x) { return exp(-(x * x)); }",
}


def _c_expr(node: T.Node, used: set[str]) -> str:
    if isinstance(node, T.Var):
        return f"x{node.index}"
    if isinstance(node, T.Const):
        return fmt_num(node.value, FULL_SIG)
    name = node.spec.name
    args = [_c_expr(c, used) for c in node.children]
    binary = {"plus": "+", "minus": "-", "times": "*", "divide": "/"}
    if name in binary:
        return f"({args[0]} {binary[name]} {args[1]})"
    if name == "add3":
        return f"({args[0]} + {args[1]} + {args[2]})"
    if name == "mult3":
        return f"({args[0]} * {args[1]} * {args[2]})"
    if name == "neg":
        return f"(-{args[0]})"
    if name == "pdivide":
        used.add("pdivide")
        return f"pdiv({args[0]}, {args[1]})"
    if name == "log10":
        used.add("log10")
        return f"plog10({args[0]})"
    if name in ("square", "cube", "gauss"):
        used.add(name)
        return f"{name}({args[0]})"
    if name == "sqrt":
        return f"sqrt(fabs({args[0]}))"
    if name == "abs":
        return f"fabs({args[0]})"
    if name == "negexp":
        return f"exp(-{args[0]})"
    if name == "power":
        return f"pow({args[0]}, {args[1]})"
    if name == "iflte":
        return f"({args[0]} <= {args[1]} ? {args[2]} : {args[3]})"
    if name == "gt":
        return f"({args[0]} > {args[1]} ? 1.0 : 0.0)"
    if name == "lt":
        return f"({args[0]} < {args[1]} ? 1.0 : 0.0)"
    if name == "step":
        return f"({args[0]} >= 0.0 ? 1.0 : 0.0)"
    if name == "thresh":
        return f"({args[0]} >= {args[1]} ? 1.0 : 0.0)"
    # sin, cos, tanh, exp map straight to libm
    return f"{name}({', '.join(args)})"


def to_c(model: FittedModel, function_name: str = "predict") -> str:
    used_helpers: set[str] = set()
    gene_exprs = [_c_expr(g, used_helpers) for g in model.genes]
    used_vars = sorted(set().union(*(T.variables_used(g) for g in model.genes)) or set())
    params = ", ".join(f"double x{i}" for i in used_vars) or "void"
    lines = ["#include <math.h>", ""]
    for key in sorted(used_helpers):
        lines.append(_C_HELPERS[key])
    if used_helpers:
        lines.append("")
    lines.append(f"double {function_name}({params}) {{")
    for i, expr in enumerate(gene_exprs, start=1):
        lines.append(f"    double g{i} = {expr};")
    acc = fmt_num(model.weights[0], FULL_SIG)
    for i in range(1, len(model.weights)):
        acc += f" + {fmt_num(model.weights[i], FULL_SIG)} * g{i}"
    lines.append(f"    return {acc};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON

MODEL_JSON_VERSION = 1


def to_json(model: FittedModel, palette_manifest: dict | None = None) -> str:
    doc = {
        "version": MODEL_JSON_VERSION,
        "genes": [T.to_prefix(g) for g in model.genes],
        "weights": [float(w) for w in model.weights],
        "stats": {
            split: {"rmse": s.rmse, "r2": s.r2} for split, s in sorted(model.stats.items())
        },
        "complexity": model.complexity,
        "palette": palette_manifest or {},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def model_from_json(text: str):
    """Parse a JSON export back into (genes, weights)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ExportError(f"bad model JSON: {exc}") from exc
    if doc.get("version") != MODEL_JSON_VERSION:
        raise ExportError(f"unsupported model JSON version {doc.get('version')!r}")
    genes = tuple(T.from_prefix(g) for g in doc["genes"])
    weights = np.asarray(doc["weights"], dtype=float)
    return genes, weights


def predict_from_json(text: str, X: np.ndarray) -> np.ndarray:
    genes, weights = model_from_json(text)
    return gene_response_matrix(genes, X) @ weights


# ---------------------------------------------------------------------------
# dispatch

def export_model(model: FittedModel, fmt: str, palette_manifest: dict | None = None) -> str:
    if fmt == "infix":
        return to_infix(simplify_model(model.genes, model.weights).expr) + "\n"
    if fmt == "latex":
        return to_latex(simplify_model(model.genes, model.weights).expr) + "\n"
    if fmt == "c":
        return to_c(model)
    if fmt == "json":
        return to_json(model, palette_manifest)
    raise ExportError(f"unknown export format {fmt!r}; expected one of {EXPORT_FORMATS}")


def model_equation(model: FittedModel, sig: int = HUMAN_SIG) -> str:
    """The simplified single-expression form used in reports."""
    return to_infix(simplify_model(model.genes, model.weights).expr, sig)
