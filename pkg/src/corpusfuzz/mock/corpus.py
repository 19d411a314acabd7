"""Synthetic seed corpora with controllable feature prevalence."""

from __future__ import annotations

import os

import numpy as np

# one statement per occurrence, each detected exactly once by its feature's rule
SNIPPETS = {
    "arrays": "int a{i}[2];",
    "structs": "struct S{i} {{ int m; }} s{i};",
    "unions": "union U{i} {{ int m; short n; }} u{i};",
    "volatiles": "volatile int v{i} = {i};",
    "consts": "const int c{i} = {i};",
    "float": "double d{i} = 0;",
    "jumps": "goto L{i}; L{i}: ;",
    "divs": "x = x / {k};",
    "muls": "x = x * {k};",
    "compound-assignment": "x += {k};",
    "post-incr-operator": "x++;",
    "pre-decr-operator": "--x;",
    "builtins": "x = __builtin_abs(x);",
    "longlong": "long long q{i} = 0;",
}


def synthetic_program(counts: dict[str, int]) -> str:
    body = ["int x = 1;"]
    for name, c in counts.items():
        template = SNIPPETS[name]
        for j in range(int(c)):
            body.append(template.format(i=f"{name.replace('-', '_')}_{j}", k=j + 2))
    inner = "\n    ".join(body)
    return f"/* synthetic seed program */\nint f(void)\n{{\n    {inner}\n    return x;\n}}\n"


def write_synthetic_corpus(directory, n_programs: int = 60, rich=("volatiles", "unions"),
                           seed: int = 0, rich_range=(8, 12), background_max: int = 5) -> list[str]:
    """Write ``n_programs`` C snippets into ``directory``.

    Every program holds between ``rich_range`` occurrences of each ``rich``
    feature, except the first, which holds two; that keeps the normalized
    prevalence of the rich features high (about 0.6 to 1.0) for nearly all
    programs.  The remaining snippet features get 0..``background_max``
    occurrences at random.
    """
    rng = np.random.default_rng(seed)
    os.makedirs(directory, exist_ok=True)
    background = [f for f in SNIPPETS if f not in rich]
    paths = []
    for p in range(n_programs):
        counts = {}
        for f in rich:
            counts[f] = 2 if p == 0 else int(rng.integers(rich_range[0], rich_range[1] + 1))
        for f in background:
            counts[f] = int(rng.integers(0, background_max + 1))
        path = os.path.join(os.fspath(directory), f"seed{p:04d}.c")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(synthetic_program(counts))
        paths.append(path)
    return paths
