#!/usr/bin/env python3
"""Regenerates the frozen test fixtures. Every expected value here comes from CPython's
own `ast` module or from plain reference code written in this file, never from the C++
library. Run from the repository root: python3 tests/fixtures/gen/make_fixtures.py"""
import ast
import json
import math
import os
import random
import textwrap

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..")

# --------------------------------------------------------------------------------------
# det-v1 reference


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def tokens(text: str):
    out, cur = [], []
    for ch in text:
        c = ch.lower() if "A" <= ch <= "Z" else ch
        if ("a" <= c <= "z") or ("0" <= c <= "9") or c == "_":
            cur.append(c)
        else:
            if cur:
                out.append("".join(cur))
            cur = []
    if cur:
        out.append("".join(cur))
    return out


def det_v1(text: str, d: int):
    v = [0.0] * d
    for t in tokens(text):
        v[fnv1a64(t.encode()) % d] += 1.0
    sq = 0.0
    for x in v:
        sq += x * x
    if sq == 0.0:
        return v
    n = math.sqrt(sq)
    return [x / n for x in v]


def cosine(a, b):
    dot = na = nb = 0.0
    for x, y in zip(a, b):
        dot += x * y
        na += x * x
        nb += y * y
    if na == 0.0 or nb == 0.0:
        return 0.0
    return max(-1.0, min(1.0, dot / (math.sqrt(na) * math.sqrt(nb))))


# --------------------------------------------------------------------------------------
# random Python functions

VARS = ["total", "count", "items", "value", "result", "data", "idx", "acc", "buf", "name"]
CALLS = ["process", "helper", "len", "print", "compute", "sorted", "normalize", "load"]


class FnGen:
    def __init__(self, rng):
        self.r = rng

    def expr(self):
        r = self.r
        k = r.randrange(6)
        if k == 0:
            return r.choice(VARS)
        if k == 1:
            return str(r.randrange(100))
        if k == 2:
            return f"{r.choice(CALLS)}({r.choice(VARS)})"
        if k == 3:
            return f"{r.choice(VARS)} {r.choice(['+', '-', '*', '%'])} {r.randrange(1, 9)}"
        if k == 4:
            return f"[x for x in {r.choice(VARS)} if x > {r.randrange(5)}]"
        return f"'{r.choice(['a', 'b', 'sum', 'text'])}'"

    def cond(self):
        r = self.r
        return f"{r.choice(VARS)} {r.choice(['>', '<', '==', '!=', 'in'])} {self.expr()}"

    def simple(self, ind):
        r = self.r
        k = r.randrange(5)
        pad = "    " * ind
        if k == 0:
            return [f"{pad}{r.choice(VARS)} = {self.expr()}"]
        if k == 1:
            return [f"{pad}{r.choice(VARS)} += {r.randrange(1, 5)}"]
        if k == 2:
            return [f"{pad}{r.choice(CALLS)}({self.expr()})"]
        if k == 3:
            return [f"{pad}# note {r.randrange(1000)}", f"{pad}pass"]
        return [f"{pad}{r.choice(VARS)} = lambda q: q + 1"]

    def body(self, ind, depth, is_async):
        lines = []
        for _ in range(self.r.randint(1, 3)):
            lines += self.stmt(ind, depth, is_async)
        return lines

    def stmt(self, ind, depth, is_async):
        r = self.r
        pad = "    " * ind
        if depth >= 4 or r.random() < 0.45:
            return self.simple(ind)
        k = r.randrange(10)
        if k == 0:
            out = [f"{pad}if {self.cond()}:"] + self.body(ind + 1, depth + 1, is_async)
            for _ in range(r.randrange(3)):
                out += [f"{pad}elif {self.cond()}:"] + self.body(ind + 1, depth + 1, is_async)
            if r.random() < 0.5:
                out += [f"{pad}else:"] + self.body(ind + 1, depth + 1, is_async)
            return out
        if k == 1:
            kw = "async for" if is_async and r.random() < 0.4 else "for"
            out = [f"{pad}{kw} {r.choice(VARS)} in {r.choice(VARS)}:"] + self.body(ind + 1, depth + 1, is_async)
            if r.random() < 0.2:
                out += [f"{pad}else:"] + self.body(ind + 1, depth + 1, is_async)
            return out
        if k == 2:
            return [f"{pad}while {self.cond()}:"] + self.body(ind + 1, depth + 1, is_async)
        if k == 3:
            kw = "async with" if is_async and r.random() < 0.4 else "with"
            return [f"{pad}{kw} open({r.choice(VARS)}) as fh:"] + self.body(ind + 1, depth + 1, is_async)
        if k == 4:
            out = [f"{pad}try:"] + self.body(ind + 1, depth + 1, is_async)
            out += [f"{pad}except ValueError as err:"] + self.body(ind + 1, depth + 1, is_async)
            if r.random() < 0.3:
                out += [f"{pad}else:"] + self.body(ind + 1, depth + 1, is_async)
            if r.random() < 0.3:
                out += [f"{pad}finally:"] + self.body(ind + 1, depth + 1, is_async)
            return out
        if k == 5:
            out = [f"{pad}def inner_{r.randrange(100)}(q):"] + self.body(ind + 1, depth + 1, False)
            return out
        if k == 6:
            out = [f"{pad}match {r.choice(VARS)}:"]
            out += [f"{pad}    case [first, *rest]:"] + self.body(ind + 2, depth + 1, is_async)
            out += [f"{pad}    case _:"] + self.body(ind + 2, depth + 1, is_async)
            return out
        if k == 7:
            return [f"{pad}if {self.cond()}: {r.choice(VARS)} = {r.randrange(9)}"]
        if k == 8:
            return [f"{pad}for {r.choice(VARS)} in range({r.randrange(9)}): {r.choice(CALLS)}(idx)"]
        return [f"{pad}return {self.expr()}"]

    def function(self, name, method=False):
        r = self.r
        is_async = r.random() < 0.15
        lines = []
        if r.random() < 0.2:
            lines.append("@cache")
        params = "self, data" if method else "data"
        lines.append(f"{'async ' if is_async else ''}def {name}({params}):")
        if r.random() < 0.3:
            lines.append('    """Docstring for ' + name + '."""')
        lines += self.body(1, 0, is_async)
        lines.append(f"    return {r.choice(VARS)}")
        return lines


def block_oracle(fn_node, source_lines):
    """Blocks per the analyzer contract: every if/for/while/with/try statement (async
    variants included) inside the function, an elif clause belonging to its chain."""
    kinds = {ast.If: "if", ast.For: "for", ast.AsyncFor: "for", ast.While: "while", ast.With: "with",
             ast.AsyncWith: "with", ast.Try: "try"}
    out = []

    def is_elif(node):
        line = source_lines[node.lineno - 1]
        return line[node.col_offset:].startswith("elif")

    def walk(node, parent):
        for child in ast.iter_child_nodes(node):
            p = parent
            kind = kinds.get(type(child))
            if kind and not (isinstance(child, ast.If) and is_elif(child)):
                out.append({"construct": kind, "start": child.lineno, "end": child.end_lineno, "parent": parent})
                p = len(out) - 1
            walk(child, p)

    walk(fn_node, None)
    return out


def functions_fixture(rng):
    gen = FnGen(rng)
    records = []
    for i in range(50):
        method = rng.random() < 0.2
        name = f"fn_{i}"
        lines = gen.function(name, method)
        if method:
            lines = [f"class Holder{i}:"] + ["    " + l if l else l for l in lines]
        src = "\n".join(lines) + "\n"
        if rng.random() < 0.3:
            src = f"import os\n\nLIMIT = {i}\n\n" + src
        tree = ast.parse(src)
        src_lines = src.split("\n")
        fns = []
        for node in ast.walk(tree):
            if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)) and node.name == name:
                first = min([d.lineno for d in node.decorator_list] + [node.lineno])
                fns.append({"name": name, "start": first, "end": node.end_lineno,
                            "blocks": block_oracle(node, src_lines)})
        assert len(fns) == 1
        output = "Here is the function:\n```python\n" + src + "```\n"
        records.append({"record": {"instruction": f"Write {name}.", "output": output}, "functions": fns})
    return records


# --------------------------------------------------------------------------------------
# random JSON trees

KEYS = ["title", "body", "text", "tags", "meta", "a-b", "x\\y", "name", "list", "value", "k"]


def random_json(rng, depth):
    if depth >= 5 or rng.random() < 0.35:
        k = rng.randrange(7)
        return [None, True, False, rng.randrange(-50, 50), rng.choice([0.5, 1e-7, 2.25, -3.0e20]),
                rng.choice(["loops", "", "null", "use for", "ünïcode"]), "s" + str(rng.randrange(99))][k]
    if rng.random() < 0.6:
        return {rng.choice(KEYS) + ("" if rng.random() < 0.5 else str(rng.randrange(9))): random_json(rng, depth + 1)
                for _ in range(rng.randrange(0, 4))}
    return [random_json(rng, depth + 1) for _ in range(rng.randrange(0, 4))]


def escape(key):
    return key.replace("\\", "\\\\").replace("-", "\\-")


def leaves_of(value, path, out, counter):
    counter[0] += 1
    if isinstance(value, dict):
        for k, v in value.items():
            leaves_of(v, escape(k) if not path else path + "-" + escape(k), out, counter)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            leaves_of(v, str(i) if not path else path + "-" + str(i), out, counter)
    else:
        out[path] = value


def json_fixture(rng):
    docs = []
    while len(docs) < 100:
        doc = {rng.choice(KEYS) + str(j): random_json(rng, 1) for j in range(rng.randrange(0, 5))}
        leaves, counter = {}, [0]
        leaves_of(doc, "", leaves, counter)
        if sum(1 for _ in leaves) > 30:
            continue
        docs.append({"document": json.dumps(doc, ensure_ascii=False), "leaves": leaves, "node_count": counter[0]})
    return docs


# --------------------------------------------------------------------------------------
# retrieval graphs

WORDS = ["sum", "loop", "file", "read", "open", "sort", "list", "count", "for", "if", "total", "parse",
         "json", "write", "path", "value", "key", "string", "split", "join"]


def retrieval_fixture(rng, d):
    graphs = []
    for g in range(20):
        nodes = []
        pool = [" ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 6))) for _ in range(12)]
        target = rng.randint(20, 200)
        while len(nodes) < target:
            fname = len(nodes)
            nodes.append({"kind": "function_name", "content": f"f{fname}"})
            impl = len(nodes)
            nodes.append({"kind": "function_impl", "content": rng.choice(pool), "owner": fname, "parent": fname,
                          "edge": "name_to_impl"})
            for _ in range(rng.randrange(4)):
                nodes.append({"kind": "code_block", "content": rng.choice(pool), "owner": fname, "parent": impl,
                              "edge": "impl_to_block"})
            if rng.random() < 0.3:
                nodes.append({"kind": "path_value", "content": rng.choice(pool), "path": "p"})
        queries = []
        for _ in range(3):
            q = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 5)))
            qv = det_v1(q, d)
            ranks = {}
            for mode, kind in (("block", "code_block"), ("function", "function_impl"), ("path", "path_value")):
                scored = [(cosine(qv, det_v1(n["content"], d)), i) for i, n in enumerate(nodes) if n["kind"] == kind]
                scored.sort(key=lambda t: (-t[0], t[1]))
                ranks[mode] = [[i, s] for s, i in scored]
            queries.append({"text": q, "rankings": ranks})
        graphs.append({"dimension": d, "nodes": nodes, "queries": queries})
    return graphs


# --------------------------------------------------------------------------------------
# syntax corpus

VALID = [
    "x = 1\n",
    "def f(a, b=2, *args, c, **kw):\n    return a + b\n",
    "class A(B, metaclass=M):\n    def m(self):\n        pass\n",
    "for i in range(3):\n    if i:\n        continue\nelse:\n    pass\n",
    "with open('f') as a, open('g') as b:\n    pass\n",
    "try:\n    x()\nexcept (A, B) as e:\n    raise\nfinally:\n    y()\n",
    "async def g():\n    async with a as b:\n        await b\n    async for x in y:\n        yield x\n",
    "match p:\n    case [1, 2, *rest]:\n        pass\n    case {'k': v, **kw}:\n        pass\n    case Point(x=0) | None:\n        pass\n    case _:\n        pass\n",
    "lambda x, /, y=1, *, z: x\n",
    "x = [i for i in range(9) if i % 2 if i > 3]\n",
    "print(f'{x!r:>{width}} and {y}')\n",
    "@dec\n@dec2(arg)\ndef f():\n    '''doc'''\n",
    "if (n := len(a)) > 10:\n    pass\n",
    "a, *b = c\n",
    "x = {**a, 'b': 1}\n",
    "global q\n",
    "def f():\n    nonlocal_ = 1\n    return (yield)\n",
    "with (open('a') as f, open('b') as g):\n    pass\n",
    "x = 1 if y else 2\n",
    "del a[0], b.c\n",
    "import a.b as c\nfrom . import d\nfrom ..e import (f, g)\n",
    "assert x, 'msg'\n",
    "x = b'bytes' rb'raw' if 0 else 0\n",
    "s = '''multi\nline'''\n",
    "x = (1,\n     2)\n",
    "if x:\n    pass\nelif y:\n    pass\nelse:\n    pass\n",
    "while True:\n    break\n",
    "x: int = 5\n",
    "print(*a, **k)\n",
    "x = a[1:2, ::3]\n",
    "def f(*, a):\n    pass\n",
    "x = not a and b or c\n",
    "x = a if b else (lambda: c)\n",
    "class C: pass\n",
    "x = 0x1F + 0o17 + 0b11 + 1_000 + 1.5e-3 + 2j\n",
    "for x, in y: pass\n",
    "x = [\n    1,\n    2,\n]\n",
    "def f(a,\n      b):\n    return a \\\n        + b\n",
    "if x:\n\n    # comment\n    pass\n",
    "x = {1, 2, 3}\n",
]

SYNTAX_BAD = [
    "def f(: pass\n",
    "x = = 1\n",
    "if x\n    pass\n",
    "for in y:\n    pass\n",
    "return = 3\n",
    "x = (1, 2\n",
    "print 'hello'\n",
    "class :\n    pass\n",
    "f(**a, *b)\n",
    "def f(a=1, b):\n    pass\n",
    "x = [1, 2, 3)\n",
    "lambda: (yield)\nx = 1 +\n",
    "a + 1 = 2\n",
    "del f()\n",
    "f(x for x in y, 1)\n",
    "x = 'unterminated\n",
    "s = '''never closed\n",
    "import\n",
    "from x import\n",
    "with open('f') as:\n    pass\n",
    "try:\n    pass\n",
    "try:\n    pass\nelse:\n    pass\n",
    "x = 1 1\n",
    "x = $\n",
    "def f():\n    x = [1,\n",
    "match x:\n    case 1\n        pass\n",
    "f(a=1, a)\n",
    "async x = 1\n",
    "x += 1 += 2\n",
    "True = 1\n",
    "for x in range(3):\n    pass\nelse\n    pass\n",
    "x = {'a' 1}\n",
    "nonlocal\n",
    "f'{}'\n",
    "@\ndef f(): pass\n",
]

INDENT_BAD = [
    "def f():\nreturn 1\n",
    "  x = 1\n",
    "if x:\n    a = 1\n  b = 2\n",
    "for i in y:\n",
    "class A:\n    def m(self):\n    pass\n",
    "x = 1\n    y = 2\n",
    "while x:\n# c\nx -= 1\n",
    "try:\n    pass\nexcept E:\npass\n",
    "if x:\n        a\n    b\n",
    "def f():\n    if x:\n    return\n",
    "with a:\n",
    "def g():\n\tif x:\n        \treturn 1\n",
    "if True:\n\tx = 1\n        y = 2\n",
    "else_ = 1\n  z = 2\n",
    "def f():\n    pass\n  pass\n",
]


PARSER_CASES = [
    "match = 1\ncase = 2\nprint(match, case)\n",
    "match(x)\n",
    "match x:\n    case 1 | 2:\n        pass\n",
    "match x:\n    case {**rest, 'a': 1}:\n        pass\n",
    "x = f'{a!x}'\n",
    "x = f'{a:{b}}'\n",
    "x = f'{'\n",
    "(a, b) := 1\n",
    "[x := 1 for y in z]\n",
    "def f(x, x):\n    pass\n",
    "def f(*):\n    pass\n",
    "def f(**k, a):\n    pass\n",
    "f(a for a in b)\n",
    "*a = 1\n",
    "*a, = 1\n",
    "a = *b\n",
    "print(*a if b else c)\n",
    "x = yield\n",
    "del (a, [b, c])\n",
    "del a + b\n",
    "for x in *a, *b:\n    pass\n",
    "x = 1 if y\n",
    "x = [1, 2,, 3]\n",
    "if x:\npass\n",
    "\tif x:\n\t\tpass\n",
    "if x:\n\tpass\n        pass\n",
    "def f():\n    return\n   x = 1\n",
    "x = (\n1 +\n2)\n",
    "x = 1 \\\n + 2\n",
    "x = 1 \\ + 2\n",
    "s = 'a' 'b' f'c'\n",
    "b = b'\\xff' + 'a'\n",
    "x = 0777\n",
    "x = 1__0\n",
    "x = 1.e5 + .5j\n",
    "class A(x for x in y):\n    pass\n",
    "@a.b[c](d)\ndef f():\n    pass\n",
    "@x\nclass C:\n    pass\n",
    "@x\nx = 1\n",
    "async def f():\n    await x\n    return [i async for i in y]\n",
    "lambda *args, **kw: (args, kw)\n",
    "lambda: yield\n",
    "x = {a: b for a, b in c}\n",
    "x = {**a for a in b}\n",
    "try:\n    pass\nexcept* E:\n    pass\n",
    "with a as (b, c):\n    pass\n",
    "with a as b.c, d as e[0]:\n    pass\n",
    "with a as f():\n    pass\n",
    "import a.b.c\nfrom a import *\n",
    "from a import *, b\n",
    "from . import (a, b,)\n",
    "from . import (a, b,\n",
    "global a, b\nnonlocal c\n",
    "raise E from None\n",
    "assert (x, 'msg')\n",
    "x: int\ny: list[int] = []\n",
    "(x): int = 1\n",
    "x, y: int = 1, 2\n",
    "a.b: int\n",
    "print('''a\n\nb''')\n",
    "x = '''\n",
    "# only a comment\n",
    "",
    "\n\n\n",
    "if True:\n    x = 1\n\n\n    y = 2\n",
    "x = [\n    1\n    2\n]\n",
    "def f(a, /, b, *, c):\n    pass\n",
    "def f(a, /):\n    pass\n",
    "def f(/, a):\n    pass\n",
    "def f() -> int: return 1\n",
    "x = not\n",
    "x = a if b else\n",
    "x = 1; y = 2;\n",
    "x = 1;; y = 2\n",
    "for x in y: pass\nelse: pass\n",
    "while x: break\nelse:\n    pass\n",
    "if x: pass\nelif: pass\n",
    "else:\n    pass\n",
    "try:\n    pass\nfinally:\n    pass\nexcept E:\n    pass\n",
    "a[1:2:3, ...] = b\n",
    "a[] = 1\n",
    "f(a=1)(b=2)\n",
    "f(1=2)\n",
    "f(a.b=1)\n",
    "x = (yield from y)\n",
    "x = (1 for y in z if w)\n",
    "x = [i for i in range(3) for j in range(i)]\n",
    "x = [for i in y]\n",
    "if x == 1 and (y := 2):\n    pass\n",
    "x = 1 <> 2\n",
    "print(1, end='')\n",
    "exec 'code'\n",
    "x = a.if\n",
    "def f():\n    '''doc'''\n    def g():\n        pass\n    return g\n",
    "class A:\n    x = 1\n    def f(self): return self.x\n",
    "if x:\n    pass\n  else:\n    pass\n",
    "x = {\n    'a': 1,\n    'b': 2\n",
    "x = )\n",
    "x = (]\n",
]


def parser_cases():
    cases = []
    for src in PARSER_CASES:
        try:
            ast.parse(src)
            cases.append({"source": src, "verdict": "valid", "line": None})
        except SyntaxError as e:
            cases.append({"source": src, "verdict": type(e).__name__, "line": e.lineno})
    return cases


def classify(src):
    try:
        ast.parse(src)
        return "valid"
    except SyntaxError as e:
        return type(e).__name__


def syntax_fixture(rng):
    progs = [(s, "valid-template") for s in VALID] + [(s, "syntax-template") for s in SYNTAX_BAD] + \
            [(s, "indent-template") for s in INDENT_BAD]
    # Fill to 100 with mutated functions from the block generator.
    gen = FnGen(rng)
    n = 0
    while len(progs) < 100:
        src = "\n".join(gen.function(f"g{n}")) + "\n"
        n += 1
        lines = src.split("\n")
        k = rng.randrange(3)
        if k == 1 and len(lines) > 3:
            i = rng.randrange(1, len(lines) - 2)
            lines[i] = lines[i][2:] if lines[i].startswith("  ") else "  " + lines[i]
        elif k == 2:
            i = rng.randrange(len(lines))
            pos = rng.randrange(len(lines[i]) + 1)
            lines[i] = lines[i][:pos] + rng.choice([":", "(", ")", "=", ",", "def ", "]"]) + lines[i][pos:]
        progs.append(("\n".join(lines), "generated"))
    out = []
    for i, (src, origin) in enumerate(progs):
        out.append({"id": f"p{i:03d}", "origin": origin, "source": src, "verdict": classify(src)})
    return out


# --------------------------------------------------------------------------------------


def write_jsonl(name, rows):
    with open(os.path.join(OUT, name), "w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def main():
    rng = random.Random(20240611)
    write_jsonl("functions.jsonl", functions_fixture(rng))
    write_jsonl("json_trees.jsonl", json_fixture(rng))
    write_jsonl("retrieval_graphs.jsonl", retrieval_fixture(rng, 64))
    write_jsonl("syntax_corpus.jsonl", syntax_fixture(rng))
    write_jsonl("parser_cases.jsonl", parser_cases())

    texts = ["", "for for", "for", "if for", "Sum a LOOP", "open file read", "def f(x):\n    return x",
             "snake_case_name", "CamelCaseName", "tags-0: a", "body-text: use for", "1234 5678",
             "ünïcode wörds", "a_b c-d e.f", "x" * 40, "tab\tseparated\ttext", "  leading spaces",
             "punctuation!!! only???", "mixed 3rd 4th_5", "return total"]
    vectors = []
    for d in (8, 64):
        for t in texts:
            vectors.append({"text": t, "dimension": d, "vector": det_v1(t, d)})
    with open(os.path.join(OUT, "det_v1_vectors.json"), "w", encoding="utf-8", newline="\n") as f:
        json.dump(vectors, f, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    main()
