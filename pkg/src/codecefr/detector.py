"""Construct detection over a parsed module.

Each :class:`DetectionRule` matches one kind of syntax node.  Rules are
grouped in families; when several rules of the same family match a node,
only the most specific one is reported (ties go to the smaller id).  So a
list holding a dict is reported as ``list-with-dictionary`` and not also as
``list-literal``, while the inner dict is classified on its own.

``print``/``open``/``super`` are recognised by name only, so a shadowed
builtin is still reported.
"""

from __future__ import annotations

import ast
from collections import defaultdict
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .catalog import CATALOG, LevelMapping, default_mapping
from .levels import Level
from .parsing import SyntaxTree, parse_text


@dataclass(frozen=True)
class Occurrence:
    construct: str
    display_name: str
    start_line: int
    end_line: int
    displacement: int
    level: Level

    @property
    def sort_key(self) -> tuple[int, int, str]:
        return self.start_line, self.displacement, self.construct


class Context(NamedTuple):
    parent: ast.AST | None
    field: str | None


Matcher = Callable[[ast.AST, Context], bool]


class DetectionRule(NamedTuple):
    id: str
    family: str
    specificity: int
    node_types: tuple[type, ...]
    matcher: Matcher


# -- node predicates ---------------------------------------------------------

FUNCTION_DEFS = (ast.FunctionDef, ast.AsyncFunctionDef)
SCOPE_NODES = (ast.FunctionDef, ast.AsyncFunctionDef, ast.Lambda, ast.ClassDef)
TRY_NODES = tuple(t for t in (ast.Try, getattr(ast, "TryStar", None)) if t is not None)


def _is_load(node: ast.AST) -> bool:
    return isinstance(getattr(node, "ctx", None), ast.Load)


def is_list_display(node: ast.AST | None) -> bool:
    return isinstance(node, ast.List) and _is_load(node)


def is_container_display(node: ast.AST | None) -> bool:
    if isinstance(node, (ast.List, ast.Tuple)):
        return _is_load(node)
    return isinstance(node, (ast.Dict, ast.Set))


def _calls_name(name: str) -> Matcher:
    def match(node: ast.AST, ctx: Context) -> bool:
        return isinstance(node.func, ast.Name) and node.func.id == name

    return match


def _always(node: ast.AST, ctx: Context) -> bool:
    return True


def _load_only(node: ast.AST, ctx: Context) -> bool:
    return _is_load(node)


def _list_nested(node: ast.List, ctx: Context) -> bool:
    return _is_load(node) and any(is_list_display(e) for e in node.elts)


def _list_with_dict(node: ast.List, ctx: Context) -> bool:
    return _is_load(node) and any(isinstance(e, ast.Dict) for e in node.elts)


def _dict_parts(node: ast.Dict) -> list[ast.AST]:
    return [k for k in node.keys if k is not None] + list(node.values)


def _dict_simple(node: ast.Dict, ctx: Context) -> bool:
    return not any(is_container_display(p) for p in _dict_parts(node))


def _dict_with_container(node: ast.Dict, ctx: Context) -> bool:
    return any(is_container_display(p) for p in _dict_parts(node))


def _dict_nested(node: ast.Dict, ctx: Context) -> bool:
    return any(isinstance(v, ast.Dict) for v in node.values)


def _dict_of_lists_of_dicts(node: ast.Dict, ctx: Context) -> bool:
    return any(
        is_list_display(v) and any(isinstance(e, ast.Dict) for e in v.elts) for v in node.values
    )


def _is_name(node: ast.AST, name: str) -> bool:
    return isinstance(node, ast.Name) and node.id == name


def _is_str(node: ast.AST, value: str | None = None) -> bool:
    if not (isinstance(node, ast.Constant) and isinstance(node.value, str)):
        return False
    return value is None or node.value == value


def _main_guard(node: ast.If, ctx: Context) -> bool:
    test = node.test
    if not (isinstance(test, ast.Compare) and len(test.ops) == 1 and isinstance(test.ops[0], ast.Eq)):
        return False
    left, right = test.left, test.comparators[0]
    return (_is_name(left, "__name__") and _is_str(right, "__main__")) or (
        _is_name(right, "__name__") and _is_str(left, "__main__")
    )


def _outer_parts(scope: ast.AST) -> list[ast.AST]:
    """Parts of a nested scope node that run in the enclosing scope."""
    parts: list[ast.AST] = list(getattr(scope, "decorator_list", ()))
    if isinstance(scope, ast.ClassDef):
        return parts + scope.bases + [kw.value for kw in scope.keywords]
    args = scope.args
    parts += args.defaults + [d for d in args.kw_defaults if d is not None]
    if not isinstance(scope, ast.Lambda):
        every_arg = args.posonlyargs + args.args + args.kwonlyargs + [a for a in (args.vararg, args.kwarg) if a]
        parts += [a.annotation for a in every_arg if a.annotation is not None]
        if scope.returns is not None:
            parts.append(scope.returns)
    return parts


def own_scope_nodes(func: ast.AST) -> Iterator[ast.AST]:
    """Nodes in ``func``'s body, not descending into nested scopes."""
    stack = list(ast.iter_child_nodes(func))
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, SCOPE_NODES):
            stack.extend(_outer_parts(node))
        else:
            stack.extend(ast.iter_child_nodes(node))


def _generator_function(node: ast.AST, ctx: Context) -> bool:
    # decorators and defaults are evaluated outside the function body
    body = ast.Module(body=node.body, type_ignores=[])
    return any(isinstance(n, (ast.Yield, ast.YieldFrom)) for n in own_scope_nodes(body))


def _attr_named(name: str) -> Matcher:
    def match(node: ast.Attribute, ctx: Context) -> bool:
        return node.attr == name

    return match


def _in_class_body(ctx: Context) -> bool:
    return isinstance(ctx.parent, ast.ClassDef) and ctx.field == "body"


def _slots_assignment(node: ast.AST, ctx: Context) -> bool:
    if not _in_class_body(ctx):
        return False
    targets = node.targets if isinstance(node, ast.Assign) else [node.target]
    return any(_is_name(t, "__slots__") for t in targets)


def _decorates(kinds: tuple[type, ...]) -> Matcher:
    def match(node: ast.AST, ctx: Context) -> bool:
        return isinstance(ctx.parent, kinds) and ctx.field == "decorator_list"

    return match


def _function_decorator_named(names: set[str], attrs: frozenset[str] = frozenset()) -> Matcher:
    decorates = _decorates(FUNCTION_DEFS)

    def match(node: ast.AST, ctx: Context) -> bool:
        if not decorates(node, ctx):
            return False
        if isinstance(node, ast.Name):
            return node.id in names
        if isinstance(node, ast.Attribute):
            return node.attr in attrs
        return False

    return match


def _has_metaclass(node: ast.ClassDef, ctx: Context) -> bool:
    return any(kw.arg == "metaclass" for kw in node.keywords)


def _context_manager_class(node: ast.ClassDef, ctx: Context) -> bool:
    methods = {s.name for s in node.body if isinstance(s, FUNCTION_DEFS)}
    return {"__enter__", "__exit__"} <= methods or {"__aenter__", "__aexit__"} <= methods


def _special_method(node: ast.AST, ctx: Context) -> bool:
    name = node.name
    return (
        _in_class_body(ctx)
        and len(name) > 4
        and name.startswith("__")
        and name.endswith("__")
        and name != "__init__"
    )


def _try_except(node: ast.AST, ctx: Context) -> bool:
    return bool(node.handlers)


def _variadic(node: ast.AST, ctx: Context) -> bool:
    return node.args.vararg is not None or node.args.kwarg is not None


def _unpacks_arguments(node: ast.Call, ctx: Context) -> bool:
    return any(isinstance(a, ast.Starred) for a in node.args) or any(
        kw.arg is None for kw in node.keywords
    )


def _fstring(node: ast.JoinedStr, ctx: Context) -> bool:
    # the format spec of ``f"{x:{w}}"`` is itself a JoinedStr
    return not (isinstance(ctx.parent, ast.FormattedValue) and ctx.field == "format_spec")


def _percent_format(node: ast.BinOp, ctx: Context) -> bool:
    return isinstance(node.op, ast.Mod) and _is_str(node.left)


def _str_format_call(node: ast.Call, ctx: Context) -> bool:
    func = node.func
    return isinstance(func, ast.Attribute) and func.attr == "format" and _is_str(func.value)


# -- registry ----------------------------------------------------------------


def _rule(cid: str, types: type | tuple[type, ...], matcher: Matcher = _always, *,
          family: str | None = None, specificity: int = 0) -> DetectionRule:
    if not isinstance(types, tuple):
        types = (types,)
    return DetectionRule(cid, family or cid, specificity, types, matcher)


PROPERTY_NAMES = {"property", "cached_property"}
PROPERTY_ATTRS = frozenset({"setter", "getter", "deleter", "cached_property"})


def register_rules() -> list[DetectionRule]:
    """The fixed rule set; exactly one rule per catalog id."""
    rules = [
        _rule("print-call", ast.Call, _calls_name("print")),
        _rule("open-call", ast.Call, _calls_name("open")),
        _rule("super-call", ast.Call, _calls_name("super")),
        _rule("if-statement", ast.If, family="if"),
        _rule("main-guard", ast.If, _main_guard, family="if", specificity=1),
        _rule("list-literal", ast.List, _load_only, family="list"),
        _rule("nested-list", ast.List, _list_nested, family="list", specificity=1),
        _rule("list-with-dictionary", ast.List, _list_with_dict, family="list", specificity=2),
        _rule("simple-dictionary", ast.Dict, _dict_simple, family="dict"),
        _rule("dict-with-container", ast.Dict, _dict_with_container, family="dict"),
        _rule("nested-dictionary", ast.Dict, _dict_nested, family="dict", specificity=1),
        _rule("dict-of-lists-of-dicts", ast.Dict, _dict_of_lists_of_dicts, family="dict", specificity=2),
        _rule("with-statement", ast.With),
        _rule("list-comprehension", ast.ListComp),
        _rule("lambda-expression", ast.Lambda),
        _rule("generator-function", FUNCTION_DEFS, _generator_function),
        _rule("dunder-dict-attribute", ast.Attribute, _attr_named("__dict__")),
        _rule("dunder-slots", (ast.Assign, ast.AnnAssign), _slots_assignment),
        _rule("function-decorator", ast.expr, _decorates(FUNCTION_DEFS), family="decorator"),
        _rule("property-decorator", (ast.Name, ast.Attribute),
              _function_decorator_named(PROPERTY_NAMES, PROPERTY_ATTRS), family="decorator", specificity=1),
        _rule("staticmethod-decorator", ast.Name, _function_decorator_named({"staticmethod"}),
              family="decorator", specificity=1),
        _rule("classmethod-decorator", ast.Name, _function_decorator_named({"classmethod"}),
              family="decorator", specificity=1),
        _rule("class-decorator", ast.expr, _decorates((ast.ClassDef,))),
        _rule("metaclass", ast.ClassDef, _has_metaclass),
        _rule("import", (ast.Import, ast.ImportFrom)),
        _rule("for-statement", ast.For),
        _rule("while-statement", ast.While),
        _rule("function-def", ast.FunctionDef),
        _rule("class-def", ast.ClassDef),
        _rule("context-manager-protocol", ast.ClassDef, _context_manager_class),
        _rule("special-method", FUNCTION_DEFS, _special_method),
        _rule("try-except", TRY_NODES, _try_except),
        _rule("raise-statement", ast.Raise),
        _rule("assert-statement", ast.Assert),
        _rule("global-statement", ast.Global),
        _rule("nonlocal-statement", ast.Nonlocal),
        _rule("break-statement", ast.Break),
        _rule("continue-statement", ast.Continue),
        _rule("del-statement", ast.Delete),
        _rule("tuple-literal", ast.Tuple, _load_only),
        _rule("set-literal", ast.Set),
        _rule("slice", ast.Slice),
        _rule("conditional-expression", ast.IfExp),
        _rule("assignment-expression", ast.NamedExpr),
        _rule("generator-expression", ast.GeneratorExp),
        _rule("dict-comprehension", ast.DictComp),
        _rule("set-comprehension", ast.SetComp),
        _rule("star-args", (*FUNCTION_DEFS, ast.Lambda), _variadic),
        _rule("argument-unpacking", ast.Call, _unpacks_arguments),
        _rule("string-formatting", ast.JoinedStr, _fstring, family="string-formatting"),
        _rule("string-formatting", ast.BinOp, _percent_format, family="string-formatting"),
        _rule("string-formatting", ast.Call, _str_format_call, family="string-formatting"),
        _rule("async-function", ast.AsyncFunctionDef),
        _rule("await-expression", ast.Await),
        _rule("async-for", ast.AsyncFor),
        _rule("async-with", ast.AsyncWith),
        _rule("yield-from", ast.YieldFrom),
    ]
    return _merge_same_id(rules)


def _merge_same_id(rules: list[DetectionRule]) -> list[DetectionRule]:
    """Fold rules split over several node types into one rule per id."""
    merged: dict[str, list[DetectionRule]] = defaultdict(list)
    for r in rules:
        merged[r.id].append(r)
    out = []
    for cid, parts in merged.items():
        if len(parts) == 1:
            out.append(parts[0])
            continue
        if len({(p.family, p.specificity) for p in parts}) != 1:
            raise ValueError(f"inconsistent rule parts for {cid}")
        by_type = [(p.node_types, p.matcher) for p in parts]

        def match(node: ast.AST, ctx: Context, _by_type=by_type) -> bool:
            return any(isinstance(node, types) and m(node, ctx) for types, m in _by_type)

        types = tuple(t for p in parts for t in p.node_types)
        out.append(DetectionRule(cid, parts[0].family, parts[0].specificity, types, match))
    return out


RULES: tuple[DetectionRule, ...] = tuple(register_rules())
RULE_IDS: frozenset[str] = frozenset(r.id for r in RULES)

assert len(RULE_IDS) == len(RULES), "duplicate rule id"
assert RULE_IDS == set(CATALOG), "rule registry and catalog disagree"


@lru_cache(maxsize=None)
def _rules_for(node_type: type) -> tuple[DetectionRule, ...]:
    return tuple(r for r in RULES if issubclass(node_type, r.node_types))


def iter_nodes(module: ast.AST) -> Iterator[tuple[ast.AST, Context]]:
    """Every node of the tree with its parent and the parent field holding it."""
    stack: list[tuple[ast.AST, Context]] = [(module, Context(None, None))]
    while stack:
        node, ctx = stack.pop()
        yield node, ctx
        for name, value in ast.iter_fields(node):
            if isinstance(value, list):
                stack.extend((v, Context(node, name)) for v in value if isinstance(v, ast.AST))
            elif isinstance(value, ast.AST):
                stack.append((value, Context(node, name)))


def classify(node: ast.AST, ctx: Context) -> list[DetectionRule]:
    """The winning rule of each family that matches ``node``."""
    winners: dict[str, DetectionRule] = {}
    for rule in _rules_for(type(node)):
        if not rule.matcher(node, ctx):
            continue
        best = winners.get(rule.family)
        if best is None or (rule.specificity, best.id) > (best.specificity, rule.id):
            winners[rule.family] = rule
    return list(winners.values())


def detect(tree: SyntaxTree, mapping: LevelMapping | None = None) -> list[Occurrence]:
    """All construct occurrences in ``tree``, ordered by position then id."""
    if mapping is None:
        mapping = default_mapping()
    found = []
    for node, ctx in iter_nodes(tree.module):
        if not hasattr(node, "lineno"):
            continue
        for rule in classify(node, ctx):
            found.append(
                Occurrence(
                    construct=rule.id,
                    display_name=CATALOG[rule.id].display_name,
                    start_line=node.lineno,
                    end_line=node.end_lineno or node.lineno,
                    displacement=tree.column(node),
                    level=mapping.lookup(rule.id),
                )
            )
    found.sort(key=lambda o: o.sort_key)
    return found


def detect_source(text: str, mapping: LevelMapping | None = None) -> list[Occurrence]:
    """Parse and detect in one step; raises :class:`SyntaxError`."""
    return detect(parse_text(text), mapping)
