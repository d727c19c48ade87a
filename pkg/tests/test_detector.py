import io
import tokenize
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codecefr.catalog import CATALOG, default_mapping, load_mapping
from codecefr.detector import RULES, Occurrence, detect, detect_source, register_rules
from codecefr.levels import Level
from codecefr.parsing import parse_text


def ids(text: str) -> list[str]:
    return [o.construct for o in detect_source(text)]


def count(text: str) -> Counter:
    return Counter(ids(text))


# -- examples ------------------------------------------------------------------


def test_print():
    assert detect_source("print('hi')") == [
        Occurrence("print-call", "Print", 1, 1, 0, Level.A1)
    ]


def test_nested_list_decomposition():
    occs = detect_source("x = [1, [2, 3]]")
    assert [(o.construct, o.displacement, o.level) for o in occs] == [
        ("nested-list", 4, Level.A2),
        ("list-literal", 8, Level.A1),
    ]


def test_list_comprehension_displacement():
    text = "squares = [i*i for i in range(10)]"
    (occ,) = detect_source(text)
    assert (occ.construct, occ.start_line, occ.end_line, occ.level) == ("list-comprehension", 1, 1, Level.B2)
    toks = tokenize.generate_tokens(io.StringIO(text).readline)
    bracket = next(t for t in toks if t.string == "[")
    assert occ.displacement == bracket.start[1] == 10


def test_main_guard_suppresses_if_statement():
    occs = detect_source("if __name__ == '__main__': main()")
    assert [(o.construct, o.level) for o in occs] == [("main-guard", Level.B2)]


@pytest.mark.parametrize(
    "text",
    ['if "__main__" == __name__:\n    pass\n', 'if __name__ == "__main__":\n    pass\n'],
)
def test_main_guard_either_order(text):
    assert ids(text) == ["main-guard"]


@pytest.mark.parametrize(
    "text",
    [
        "if __name__ != '__main__':\n    pass\n",
        "if __name__ == 'main':\n    pass\n",
        "if name == '__main__':\n    pass\n",
        "if __name__ == '__main__' == x:\n    pass\n",
    ],
)
def test_not_a_main_guard(text):
    assert "main-guard" not in ids(text)
    assert "if-statement" in ids(text)


def test_empty_module():
    assert detect_source("") == []


# -- one positive snippet per catalog id ----------------------------------------

POSITIVE = {
    "print-call": "print(1)",
    "if-statement": "if x:\n    pass",
    "list-literal": "x = [1, 2]",
    "open-call": "fh = open('f')",
    "nested-list": "x = [[1], 2]",
    "simple-dictionary": "d = {'a': 1}",
    "list-with-dictionary": "x = [{'a': 1}]",
    "nested-dictionary": "d = {'a': {'b': 1}}",
    "with-statement": "with ctx:\n    pass",
    "list-comprehension": "x = [i for i in y]",
    "dunder-dict-attribute": "d = obj.__dict__",
    "main-guard": "if __name__ == '__main__':\n    pass",
    "dict-of-lists-of-dicts": "d = {'a': [{'b': 1}]}",
    "lambda-expression": "f = lambda: 0",
    "dunder-slots": "class K:\n    __slots__ = ('a',)",
    "generator-function": "def g():\n    yield 1",
    "function-decorator": "@cache\ndef f():\n    pass",
    "metaclass": "class K(metaclass=M):\n    pass",
    "class-decorator": "@dataclass\nclass K:\n    pass",
    "import": "import os",
    "for-statement": "for i in y:\n    pass",
    "while-statement": "while x:\n    pass",
    "function-def": "def f():\n    pass",
    "tuple-literal": "t = (1, 2)",
    "set-literal": "s = {1, 2}",
    "slice": "y = x[1:2]",
    "string-formatting": "s = f'{x}'",
    "break-statement": "for i in y:\n    break",
    "continue-statement": "for i in y:\n    continue",
    "del-statement": "del x",
    "class-def": "class K:\n    pass",
    "try-except": "try:\n    pass\nexcept E:\n    pass",
    "raise-statement": "raise E",
    "assert-statement": "assert x",
    "global-statement": "def f():\n    global x",
    "dict-with-container": "d = {'a': [1]}",
    "conditional-expression": "y = a if b else c",
    "star-args": "def f(*args):\n    pass",
    "argument-unpacking": "f(*args)",
    "generator-expression": "g = (i for i in y)",
    "dict-comprehension": "d = {k: v for k, v in y}",
    "set-comprehension": "s = {i for i in y}",
    "nonlocal-statement": "def f():\n    def g():\n        nonlocal x",
    "assignment-expression": "if (n := len(a)):\n    pass",
    "super-call": "super().__init__()",
    "special-method": "class K:\n    def __len__(self):\n        return 0",
    "property-decorator": "class K:\n    @property\n    def p(self):\n        pass",
    "staticmethod-decorator": "class K:\n    @staticmethod\n    def p():\n        pass",
    "classmethod-decorator": "class K:\n    @classmethod\n    def p(cls):\n        pass",
    "async-function": "async def f():\n    pass",
    "await-expression": "async def f():\n    await g()",
    "async-for": "async def f():\n    async for i in y:\n        pass",
    "async-with": "async def f():\n    async with y:\n        pass",
    "yield-from": "def g():\n    yield from y",
    "context-manager-protocol": "class K:\n    def __enter__(self): pass\n    def __exit__(self, *a): pass",
}


def test_every_catalog_id_has_a_positive_example():
    assert set(POSITIVE) == set(CATALOG)


@pytest.mark.parametrize("cid", sorted(POSITIVE))
def test_positive_example(cid):
    occs = [o for o in detect_source(POSITIVE[cid]) if o.construct == cid]
    assert len(occs) == 1
    assert occs[0].level is default_mapping()[cid]
    assert occs[0].display_name == CATALOG[cid].display_name


# -- specificity and families -----------------------------------------------------


def test_list_with_dictionary_beats_nested_list():
    assert count("x = [[1], {'a': 1}]") == Counter(
        {"list-with-dictionary": 1, "list-literal": 1, "simple-dictionary": 1}
    )


def test_dict_family_winners():
    assert count("d = {'a': {'b': 1}, 'c': [{'d': 2}]}") == Counter(
        {"dict-of-lists-of-dicts": 1, "simple-dictionary": 2, "list-with-dictionary": 1}
    )


def test_deep_nesting_classified_by_outermost_rule():
    # list of list of dict: outer is nested-list, middle list-with-dictionary
    occs = detect_source("x = [[{'a': 1}]]")
    assert [o.construct for o in occs] == ["nested-list", "list-with-dictionary", "simple-dictionary"]


def test_dict_keys_count_as_containers():
    assert ids("d = {(1, 2): 'x'}") == ["dict-with-container", "tuple-literal"]


def test_dict_spread_is_simple():
    assert ids("d = {**base, 'a': 1}") == ["simple-dictionary"]


def test_store_context_lists_and_tuples_ignored():
    assert ids("[a, b] = 1, 2") == ["tuple-literal"]
    assert ids("for a, b in y:\n    pass") == ["for-statement"]


def test_elif_is_its_own_if_statement():
    text = "if a:\n    pass\nelif b:\n    pass\nelse:\n    pass\n"
    occs = detect_source(text)
    assert [(o.construct, o.start_line) for o in occs] == [("if-statement", 1), ("if-statement", 3)]


def test_one_occurrence_per_decorator():
    text = "@a\n@b.c\n@d(1)\ndef f():\n    pass\n"
    occs = [o for o in detect_source(text) if o.construct == "function-decorator"]
    assert [(o.start_line, o.displacement) for o in occs] == [(1, 1), (2, 1), (3, 1)]


def test_property_refines_function_decorator():
    text = "class K:\n    @property\n    def x(self): pass\n    @x.setter\n    def x(self, v): pass\n"
    c = count(text)
    assert c["property-decorator"] == 2
    assert c["function-decorator"] == 0


def test_class_vs_function_decorators():
    text = "@register\nclass K:\n    @register\n    def m(self): pass\n"
    c = count(text)
    assert c["class-decorator"] == 1 and c["function-decorator"] == 1


def test_generator_function_ignores_nested_scopes():
    occs = detect_source("def f():\n    def g():\n        yield 1\n    return g\n")
    assert [o.start_line for o in occs if o.construct == "generator-function"] == [2]
    assert "generator-function" not in ids("def f():\n    return lambda: (yield)\n")
    assert ids("def f():\n    x = yield\n").count("generator-function") == 1
    assert "generator-function" in ids("async def f():\n    yield 1\n")


def test_generator_function_ignores_decorator_and_default_yields():
    text = "def outer():\n    @deco((yield))\n    def inner(a=(yield)):\n        pass\n"
    c = count(text)
    assert c["generator-function"] == 1  # outer only


def test_slots_only_in_class_body():
    assert "dunder-slots" not in ids("__slots__ = ()")
    assert "dunder-slots" not in ids("class K:\n    def f(self):\n        __slots__ = ()\n")
    assert "dunder-slots" in ids("class K:\n    __slots__: tuple = ()\n")


def test_print_and_open_matched_by_name_only():
    assert "print-call" not in ids("sys.stdout.print(1)")
    assert "open-call" not in ids("os.open('f', 0)")
    # shadowed builtin still reported
    assert "print-call" in ids("def print(x): pass\nprint(1)")


def test_string_formatting_forms():
    c = count("a = '%s' % x\nb = '{}'.format(x)\nc = f'{x:{w}}'\nd = x % y\n")
    assert c["string-formatting"] == 3


def test_try_finally_is_not_try_except():
    assert "try-except" not in ids("try:\n    pass\nfinally:\n    pass\n")


def test_init_is_not_a_special_method():
    assert "special-method" not in ids("class K:\n    def __init__(self): pass\n")
    assert "special-method" not in ids("def __len__(): pass\n")


def test_metaclass_keyword_required():
    assert "metaclass" not in ids("class K(Base, other=1):\n    pass")


def test_async_def_is_not_function_def():
    assert ids("async def f():\n    pass") == ["async-function"]


def test_levels_come_from_mapping():
    mapping = load_mapping("list-comprehension: B1")
    (occ,) = detect(parse_text("x = [i for i in y]"), mapping)
    assert occ.level is Level.B1


def test_ordering_by_position_then_id():
    occs = detect_source("def g(*a):\n    yield 1\n")
    assert [o.construct for o in occs] == ["function-def", "generator-function", "star-args"]
    keys = [o.sort_key for o in occs]
    assert keys == sorted(keys)


def test_multiline_spans():
    occs = detect_source("d = {\n    'a': 1,\n}\n")
    assert [(o.construct, o.start_line, o.end_line, o.displacement) for o in occs] == [
        ("simple-dictionary", 1, 3, 4)
    ]


# -- registry ---------------------------------------------------------------------


def test_registry_matches_catalog():
    rules = register_rules()
    rule_ids = [r.id for r in rules]
    assert len(rule_ids) == len(set(rule_ids))
    assert set(rule_ids) == set(CATALOG)
    for r in rules:
        default_mapping().lookup(r.id)


def test_families_are_consistent():
    for r in RULES:
        peers = [p for p in RULES if p.family == r.family]
        if len(peers) > 1:
            assert r.family in {"list", "dict", "if", "decorator"}


# -- properties --------------------------------------------------------------------

TOP_LEVEL = [
    "print('x')\n",
    "x = [1, [2]]\n",
    "d = {'a': {'b': [{'c': 1}]}}\n",
    "with open('f') as fh:\n    data = fh.read()\n",
    "if __name__ == '__main__':\n    run()\n",
    "for i in range(3):\n    if i:\n        continue\n",
    "class K(metaclass=M):\n    __slots__ = ('a',)\n    def __iter__(self):\n        yield from ()\n",
    "@deco\ndef f(*a, **k):\n    return [i for i in a if i] + list(k)\n",
    "s = {i for i in y}; t = {k: v for k, v in z}\n",
    "try:\n    pass\nexcept (A, B):\n    raise\n",
    "f = lambda x: x if x else None\n",
    "",
    "# comment only\n",
]


def _shifted(occs, offset):
    return Counter((o.construct, o.level, o.start_line + offset, o.end_line + offset, o.displacement) for o in occs)


@settings(max_examples=200)
@given(st.lists(st.sampled_from(TOP_LEVEL), min_size=1, max_size=6))
def test_concatenation_sums_occurrences(parts):
    combined = detect_source("".join(parts))
    expected = Counter()
    offset = 0
    for part in parts:
        expected += _shifted(detect_source(part), offset)
        offset += part.count("\n")
    assert _shifted(combined, 0) == expected


@given(st.lists(st.sampled_from(TOP_LEVEL), min_size=1, max_size=6))
def test_spans_lie_within_the_file(parts):
    text = "".join(parts)
    tree = parse_text(text)
    n_lines = max(1, text.count("\n"))
    for occ in detect(tree):
        assert 1 <= occ.start_line <= occ.end_line <= n_lines
        assert occ.displacement >= 0
    assert detect(tree) == detect(parse_text(text))
