"""Expression trees: representation, evaluation, metrics, random generation.

A tree is its root node. Nodes are immutable after construction, so trees
can be shared freely between individuals and evaluated concurrently.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, TreeStructureError
from .functions import CATALOG, FunctionSpec, Palette


class Node:
    __slots__ = ()


class Func(Node):
    __slots__ = ("spec", "children")

    def __init__(self, spec: FunctionSpec, children):
        children = tuple(children)
        if len(children) != spec.arity:
            raise TreeStructureError(
                f"{spec.name} expects {spec.arity} children, got {len(children)}"
            )
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "children", children)

    def __setattr__(self, *_):
        raise AttributeError("tree nodes are immutable")

    def __repr__(self):
        return to_prefix(self)


class Var(Node):
    """Input variable x<index>, 1-based."""

    __slots__ = ("index",)

    def __init__(self, index: int):
        if index < 1:
            raise TreeStructureError(f"variable index must be >= 1, got {index}")
        object.__setattr__(self, "index", index)

    def __setattr__(self, *_):
        raise AttributeError("tree nodes are immutable")

    def __repr__(self):
        return f"x{self.index}"


class Const(Node):
    """Ephemeral random constant; value frozen at creation."""

    __slots__ = ("value",)

    def __init__(self, value: float):
        object.__setattr__(self, "value", float(value))

    def __setattr__(self, *_):
        raise AttributeError("tree nodes are immutable")

    def __repr__(self):
        return format_constant(self.value)


def format_constant(value: float) -> str:
    """Serialize a constant with 17 significant digits so it round-trips."""
    return format(value, ".17g")


def eval_tree(tree: Node, X: np.ndarray) -> np.ndarray:
    """Evaluate a tree elementwise over the rows of X (shape N x M).

    Protected functions never produce non-finite values; unprotected ones
    may, and callers computing fitness must treat those models as invalid.
    A variable index beyond M raises TreeStructureError.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise TreeStructureError("X must be a 2-D matrix")
    n, m = X.shape
    if isinstance(tree, Var):
        if tree.index > m:
            raise TreeStructureError(
                f"tree references x{tree.index} but data has {m} variables"
            )
        return X[:, tree.index - 1].copy()
    if isinstance(tree, Const):
        return np.full(n, tree.value)
    args = [eval_tree(child, X) for child in tree.children]
    with np.errstate(all="ignore"):
        out = tree.spec.evaluator(*args)
    return np.asarray(out, dtype=float)


def node_count(tree: Node) -> int:
    """Number of nodes (functions plus leaves)."""
    if isinstance(tree, (Var, Const)):
        return 1
    return 1 + sum(node_count(c) for c in tree.children)


def expressional_complexity(tree: Node) -> int:
    """Sum of node counts over every full subtree of the tree.

    A leaf is a full subtree of itself, so a lone leaf scores 1. Among
    trees of equal node count, flatter trees score lower.
    """
    size, total = _size_and_ec(tree)
    del size
    return total


def _size_and_ec(tree: Node) -> tuple[int, int]:
    if isinstance(tree, (Var, Const)):
        return 1, 1
    size = 1
    ec = 0
    for child in tree.children:
        csize, cec = _size_and_ec(child)
        size += csize
        ec += cec
    return size, ec + size


def depth(tree: Node) -> int:
    """Depth in nodes along the longest root-to-leaf path; a leaf is 1."""
    if isinstance(tree, (Var, Const)):
        return 1
    return 1 + max(depth(c) for c in tree.children)


def variables_used(tree: Node) -> set[int]:
    if isinstance(tree, Var):
        return {tree.index}
    if isinstance(tree, Const):
        return set()
    out: set[int] = set()
    for c in tree.children:
        out |= variables_used(c)
    return out


def iter_nodes(tree: Node):
    """Pre-order traversal."""
    yield tree
    if isinstance(tree, Func):
        for child in tree.children:
            yield from iter_nodes(child)


def random_leaf(palette: Palette, rng: np.random.Generator) -> Node:
    choices = palette.num_inputs + (1 if palette.erc_enabled else 0)
    pick = int(rng.integers(choices))
    if pick < palette.num_inputs:
        return Var(pick + 1)
    lo, hi = palette.erc_range
    return Const(rng.uniform(lo, hi))


def random_tree(
    palette: Palette,
    depth_limit: int,
    rng: np.random.Generator,
    method: str = "grow",
) -> Node:
    """Generate a random tree of depth at most depth_limit.

    "full" places functions at every level above the limit, so all leaves
    sit at exactly depth_limit. "grow" picks uniformly between functions
    and leaves at intermediate levels.
    """
    if depth_limit < 1:
        raise ConfigurationError("depth_limit must be >= 1")
    if method not in ("grow", "full"):
        raise ConfigurationError(f"unknown generation method {method!r}")
    if not palette.functions:
        raise ConfigurationError("cannot generate trees from an empty palette")
    return _random_tree(palette, depth_limit, rng, method)


def _random_tree(palette, depth_limit, rng, method):
    if depth_limit == 1:
        return random_leaf(palette, rng)
    if method == "grow":
        n_funcs = len(palette.functions)
        n_leaves = palette.num_inputs + (1 if palette.erc_enabled else 0)
        if int(rng.integers(n_funcs + n_leaves)) >= n_funcs:
            return random_leaf(palette, rng)
    spec = palette.functions[int(rng.integers(len(palette.functions)))]
    children = [_random_tree(palette, depth_limit - 1, rng, method) for _ in range(spec.arity)]
    return Func(spec, children)


def canonical_key(tree: Node) -> str:
    """Structural identity key: identical shape, names, indices and constant
    values (to full precision) map to the same key. Commutative-operand
    swaps may map to different keys; semantic identity is the simplifier's
    job."""
    return to_prefix(tree)


def to_prefix(tree: Node) -> str:
    """Prefix (s-expression) text form, e.g. ``(plus (sin x1) 3.0)``."""
    if isinstance(tree, Var):
        return f"x{tree.index}"
    if isinstance(tree, Const):
        return format_constant(tree.value)
    inner = " ".join(to_prefix(c) for c in tree.children)
    return f"({tree.spec.name} {inner})"


def from_prefix(text: str) -> Node:
    """Parse the prefix text form back into a tree.

    Function names are resolved against the full catalog, so archives can
    be read regardless of the run palette.
    """
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    if not tokens:
        raise TreeStructureError("empty expression")
    pos = 0

    def parse() -> Node:
        nonlocal pos
        if pos >= len(tokens):
            raise TreeStructureError("truncated expression")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens):
                raise TreeStructureError("truncated expression")
            name = tokens[pos]
            pos += 1
            if name not in CATALOG:
                raise TreeStructureError(f"unknown function {name!r}")
            spec = CATALOG[name]
            children = []
            while pos < len(tokens) and tokens[pos] != ")":
                children.append(parse())
            if pos >= len(tokens):
                raise TreeStructureError("unbalanced parentheses")
            pos += 1
            return Func(spec, children)
        if tok == ")":
            raise TreeStructureError("unbalanced parentheses")
        if tok.startswith("x") and tok[1:].isdigit():
            return Var(int(tok[1:]))
        try:
            return Const(float(tok))
        except ValueError as exc:
            raise TreeStructureError(f"bad token {tok!r}") from exc

    node = parse()
    if pos != len(tokens):
        raise TreeStructureError("trailing tokens after expression")
    return node


def replace_subtree(tree: Node, target_index: int, replacement: Node) -> Node:
    """Return a copy of tree with the node at pre-order position
    target_index replaced by replacement."""
    counter = [0]

    def rebuild(node: Node) -> Node:
        idx = counter[0]
        counter[0] += 1
        if idx == target_index:
            # advance the counter past the replaced subtree
            counter[0] += node_count(node) - 1
            return replacement
        if isinstance(node, Func):
            return Func(node.spec, [rebuild(c) for c in node.children])
        return node

    out = rebuild(tree)
    if counter[0] <= target_index:
        raise TreeStructureError(f"node index {target_index} out of range")
    return out


def subtree_at(tree: Node, index: int) -> Node:
    for i, node in enumerate(iter_nodes(tree)):
        if i == index:
            return node
    raise TreeStructureError(f"node index {index} out of range")
