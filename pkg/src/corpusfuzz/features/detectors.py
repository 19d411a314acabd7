"""Lexical detection rules for C language features.

Each rule counts occurrences of one construct in comment- and
string-stripped source.  The rules are deliberately shallow: they work on
snippets that do not compile (no ``main``, missing headers) and never raise
on odd syntax.  Counts only need to reflect relative prevalence across a
corpus, not exact AST semantics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

__all__ = ["DETECTORS", "Lexed", "lex", "strip_source", "tokenize"]

_TOKEN_RE = re.compile(
    r"""
    (?P<id>[A-Za-z_]\w*)
  | (?P<num>0[xX][0-9A-Fa-f.]*(?:[pP][+-]?\d+)?\w*
           |(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\w*)
  | (?P<str>"")
  | (?P<chr>'')
  | (?P<op>>>=|<<=|\.\.\.|->|\+\+|--|<<|>>|<=|>=|==|!=|&&|\|\||\+=|-=|\*=|/=|%=|&=|\|=|\^=|\#\#|[^\s\w])
    """,
    re.VERBOSE,
)

ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="})
COMPOUND_OPS = ASSIGN_OPS - {"="}

TYPE_KEYWORDS = frozenset(
    """void char short int long float double signed unsigned _Bool _Complex
    struct union enum""".split()
)
DECL_KEYWORDS = TYPE_KEYWORDS | frozenset(
    """typedef extern static auto register const volatile restrict inline
    __inline __inline__ __restrict __restrict__ __volatile__ __const
    _Thread_local __thread __attribute__ __extension__ typeof __typeof__
    _Atomic _Alignas _Noreturn""".split()
)
KEYWORDS = DECL_KEYWORDS | frozenset(
    """if else while for do switch case default break continue goto return
    sizeof _Alignof __alignof__ _Static_assert _Generic asm __asm__""".split()
)


def _is_typedef_name(tok: str) -> bool:
    return tok.endswith("_t")


def strip_source(text: str) -> str:
    """Remove comments, empty out string/char literals, drop directives.

    ``#pragma`` lines are kept since some features (struct packing) are
    expressed through them.  Line structure is preserved.
    """
    out = []
    i, n = 0, len(text)
    line_start = True
    while i < n:
        c = text[i]
        if line_start:
            j = i
            while j < n and text[j] in " \t":
                j += 1
            if j < n and text[j] == "#":
                end = j
                # directive spans continuation lines
                while True:
                    nl = text.find("\n", end)
                    if nl == -1:
                        nl = n
                    if nl > 0 and text[nl - 1] == "\\" and nl < n:
                        end = nl + 1
                        continue
                    break
                directive = text[j:nl]
                if re.match(r"#\s*pragma\b", directive):
                    out.append(_strip_comments_only(directive))
                out.append("\n" * (text.count("\n", i, nl) + (1 if nl < n else 0)))
                i = nl + 1
                line_start = True
                continue
            line_start = False
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            nl = text.find("\n", i)
            i = n if nl == -1 else nl
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "*":
            end = text.find("*/", i + 2)
            end = n if end == -1 else end + 2
            out.append(" " + "\n" * text.count("\n", i, end))
            i = end
            continue
        if c == '"' or c == "'":
            j = i + 1
            while j < n and text[j] != c and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            out.append(c + c)
            i = min(j + 1, n)
            continue
        if c == "\n":
            line_start = True
        out.append(c)
        i += 1
    return "".join(out)


def _strip_comments_only(line: str) -> str:
    return re.sub(r"/\*.*?\*/|//.*", " ", line)


def tokenize(stripped: str) -> list[tuple[str, str]]:
    return [(m.lastgroup, m.group()) for m in _TOKEN_RE.finditer(stripped)]


@dataclass
class Lexed:
    """Token stream plus the syntactic context each token sits in."""

    tokens: list[tuple[str, str]]
    paren_kind: list[str] = field(default_factory=list)
    for_clause: list[tuple[int, bool]] = field(default_factory=list)
    brace_kind: list[str] = field(default_factory=list)
    stmt_id: list[int] = field(default_factory=list)
    stmt_is_decl: dict[int, bool] = field(default_factory=dict)
    stmt_first: list[bool] = field(default_factory=list)
    segment_id: list[int] = field(default_factory=list)

    @property
    def texts(self) -> list[str]:
        return [t for _, t in self.tokens]


def _operand_end(tok: tuple[str, str] | None) -> bool:
    if tok is None:
        return False
    kind, text = tok
    if kind == "id":
        return text not in KEYWORDS
    return kind in ("num", "str", "chr") or text in (")", "]")


def _looks_decl(tokens, i) -> bool:
    if i >= len(tokens):
        return False
    kind, text = tokens[i]
    if kind != "id":
        return False
    if text in DECL_KEYWORDS or _is_typedef_name(text):
        return True
    if text in KEYWORDS:
        return False
    nxt = tokens[i + 1] if i + 1 < len(tokens) else None
    return nxt is not None and nxt[0] == "id" and nxt[1] not in KEYWORDS


def lex(source: str) -> Lexed:
    tokens = tokenize(strip_source(source))
    lx = Lexed(tokens)
    parens: list[list] = []  # [kind, clause, first_clause_is_decl]
    braces: list[str] = []
    stmt = 0
    segment = 0
    stmt_start = True
    stmt_len = 0
    stmt_head = ""
    prev = None
    for i, tok in enumerate(tokens):
        kind, text = tok
        first = False
        if stmt_start and text != ";":
            stmt += 1
            segment += 1
            lx.stmt_is_decl[stmt] = (
                not braces or braces[-1] == "agg" or _looks_decl(tokens, i)
            ) and braces[-1:] != ["init"]
            stmt_start = False
            stmt_len = 0
            stmt_head = text
            first = True
        stmt_len += 1

        lx.paren_kind.append(parens[-1][0] if parens else "")
        lx.for_clause.append((parens[-1][1], parens[-1][2]) if parens and parens[-1][0] == "for" else (0, False))
        lx.brace_kind.append(braces[-1] if braces else "")
        lx.stmt_id.append(stmt)
        lx.stmt_first.append(first)
        lx.segment_id.append(segment)

        if text == "(":
            ptext = prev[1] if prev else ""
            if ptext == "for":
                parens.append(["for", 0, _looks_decl(tokens, i + 1)])
            elif ptext in ("if", "while", "switch"):
                parens.append(["control", 0, False])
            elif _operand_end(prev):
                parens.append(["call", 0, False])
            else:
                parens.append(["group", 0, False])
        elif text == ")":
            if parens:
                closed = parens.pop()
                if closed[0] in ("control", "for") and not parens:
                    stmt_start = True
        elif text == ";":
            if parens and parens[-1][0] == "for":
                parens[-1][1] += 1
            else:
                parens.clear()
                stmt_start = True
        elif text == "{":
            ptext = prev[1] if prev else ""
            if ptext == "=" or (braces and braces[-1] == "init" and ptext in (",", "{", "=")):
                braces.append("init")
            elif _opens_aggregate(tokens, i):
                braces.append("agg")
                stmt_start = True
            else:
                braces.append("block")
                stmt_start = True
            parens.clear()
        elif text == "}":
            closed = braces.pop() if braces else "block"
            if closed == "block":
                stmt_start = True
        elif text in ("else", "do"):
            stmt_start = True
        elif text == ":" and not parens and (stmt_head in ("case", "default") or (stmt_len == 2 and prev and prev[0] == "id")):
            if not braces or braces[-1] != "agg":
                stmt_start = True
        elif text == "," and not parens:
            segment += 1
        prev = tok
    return lx


def _opens_aggregate(tokens, i) -> bool:
    # `struct X {`, `union {`, `enum E {` (attributes between are tolerated)
    j = i - 1
    if j >= 0 and tokens[j][0] == "id" and tokens[j][1] not in KEYWORDS:
        j -= 1
    return j >= 0 and tokens[j][1] in ("struct", "union", "enum")


# --------------------------------------------------------------------- rules


def _count_words(words):
    words = frozenset(words)

    def rule(lx: Lexed) -> int:
        return sum(1 for k, t in lx.tokens if k == "id" and t in words)

    return rule


def _count_ops(ops):
    ops = frozenset(ops)

    def rule(lx: Lexed) -> int:
        return sum(1 for k, t in lx.tokens if k == "op" and t in ops)

    return rule


def _count_pairs(first, second):
    def rule(lx: Lexed) -> int:
        n, toks, i = 0, lx.texts, 0
        while i < len(toks) - 1:
            if toks[i] == first and toks[i + 1] == second:
                n += 1
                i += 2
            else:
                i += 1
        return n

    return rule


def subscript(lx: Lexed) -> int:
    return sum(1 for _, t in lx.tokens if t == "[")


def bitfield_member(lx: Lexed) -> int:
    toks = lx.tokens
    n = 0
    for i, (_, t) in enumerate(toks):
        if t != ":" or lx.brace_kind[i] != "agg" or lx.paren_kind[i]:
            continue
        prev = toks[i - 1] if i else None
        if prev is None or prev[0] != "id":
            continue
        # width expression runs to the member terminator
        j = i + 1
        while j < len(toks) and toks[j][1] not in (";", ",", "}"):
            j += 1
        if j > i + 1:
            n += 1
    return n


def comma_operator(lx: Lexed) -> int:
    n = 0
    for i, (_, t) in enumerate(lx.tokens):
        if t != ",":
            continue
        pk = lx.paren_kind[i]
        if pk in ("group", "control"):
            n += 1
        elif pk == "for":
            clause, decl0 = lx.for_clause[i]
            if not (clause == 0 and decl0):
                n += 1
        elif pk == "" and lx.brace_kind[i] == "block" and not lx.stmt_is_decl.get(lx.stmt_id[i], True):
            n += 1
    return n


def embedded_assign(lx: Lexed) -> int:
    n = 0
    plain_seen: set[int] = set()
    for i, (k, t) in enumerate(lx.tokens):
        if k != "op" or t not in ASSIGN_OPS:
            continue
        if lx.brace_kind[i] == "init":
            continue
        pk = lx.paren_kind[i]
        if pk and pk != "for":
            n += 1
        elif not pk:
            seg = lx.segment_id[i]
            if seg in plain_seen:
                n += 1
            else:
                plain_seen.add(seg)
    return n


def _inc_dec(op: str, postfix: bool):
    def rule(lx: Lexed) -> int:
        n = 0
        for i, (_, t) in enumerate(lx.tokens):
            if t == op and _operand_end(lx.tokens[i - 1] if i else None) == postfix:
                n += 1
        return n

    return rule


def unary_plus(lx: Lexed) -> int:
    return sum(
        1
        for i, (_, t) in enumerate(lx.tokens)
        if t == "+" and not _operand_end(lx.tokens[i - 1] if i else None)
    )


def long_long(lx: Lexed) -> int:
    n = _count_pairs("long", "long")(lx)
    n += sum(1 for k, t in lx.tokens if k == "num" and re.search(r"(?i)ll", t))
    return n


def floating_point(lx: Lexed) -> int:
    n = 0
    for k, t in lx.tokens:
        if k == "id" and t in ("float", "double"):
            n += 1
        elif k == "num":
            low = t.lower()
            if low.startswith("0x"):
                n += "p" in low
            elif "." in low or "e" in low.rstrip("f").rstrip("l"):
                n += 1
    return n


def _is_multiplication(lx: Lexed, i: int) -> bool:
    prev = lx.tokens[i - 1] if i else None
    if not _operand_end(prev):
        return False
    if prev[0] == "id":
        if _is_typedef_name(prev[1]):
            return False
        # `T *p;` at the head of a declaration statement
        if lx.stmt_first[i - 1] and lx.stmt_is_decl.get(lx.stmt_id[i - 1], False):
            return False
        if lx.stmt_first[i - 1] and i + 1 < len(lx.tokens) and lx.tokens[i + 1][0] == "id":
            after = lx.tokens[i + 2][1] if i + 2 < len(lx.tokens) else ";"
            if after in (";", "=", ",", "[", ")"):
                return False
    return True


def multiplication(lx: Lexed) -> int:
    n = 0
    for i, (_, t) in enumerate(lx.tokens):
        if t == "*=" or (t == "*" and _is_multiplication(lx, i)):
            n += 1
    return n


def pointer_use(lx: Lexed) -> int:
    n = 0
    for i, (_, t) in enumerate(lx.tokens):
        if t == "->" or (t == "*" and not _is_multiplication(lx, i)):
            n += 1
    return n


_SPECIFIER_WORDS = TYPE_KEYWORDS | frozenset(
    "const volatile restrict __restrict signed unsigned register static extern".split()
)


def _qualified_pointer(qualifier: str):
    def rule(lx: Lexed) -> int:
        toks = lx.tokens
        counted: set[int] = set()
        for i, (k, t) in enumerate(toks):
            if t != qualifier:
                continue
            j = i + 1
            typedef_seen = False
            while j < len(toks):
                kj, tj = toks[j]
                if kj == "id" and tj in _SPECIFIER_WORDS:
                    if tj in ("struct", "union", "enum") and j + 1 < len(toks) and toks[j + 1][0] == "id":
                        j += 1
                    j += 1
                    continue
                if kj == "id" and tj not in KEYWORDS and not typedef_seen:
                    # a typedef name only if another declarator-ish token follows
                    nxt = toks[j + 1][1] if j + 1 < len(toks) else ""
                    if nxt == "*" or (j + 1 < len(toks) and toks[j + 1][0] == "id"):
                        typedef_seen = True
                        j += 1
                        continue
                break
            if j < len(toks) and toks[j][1] == "*":
                counted.add(j)
            if i and toks[i - 1][1] == "*":
                counted.add(i - 1)
        return len(counted)

    return rule


def global_declarator(lx: Lexed) -> int:
    toks = lx.tokens
    total = 0
    stmt: list[str] = []
    depth = 0
    body_is_function = []
    for i, (_, t) in enumerate(toks):
        if t == "{":
            if depth == 0:
                body_is_function.append(bool(stmt) and stmt[-1] == ")" and "=" not in stmt)
                stmt.append("{}")
            depth += 1
            continue
        if t == "}":
            depth = max(depth - 1, 0)
            if depth == 0 and body_is_function and body_is_function.pop():
                stmt = []
            continue
        if depth:
            continue
        if t == ";":
            total += _count_global_declarators(stmt)
            stmt = []
        else:
            stmt.append(t)
    return total


def _count_global_declarators(stmt: list[str]) -> int:
    if not stmt or stmt[0] in ("typedef", "_Static_assert", "asm", "__asm__"):
        return 0
    if stmt[-1] == "{}" and stmt[0] in ("struct", "union", "enum"):
        return 0
    if "{}" in stmt and stmt[0] in ("struct", "union", "enum") and stmt.index("{}") == len(stmt) - 1:
        return 0
    if len(stmt) <= 2 and stmt[0] in ("struct", "union", "enum"):
        return 0  # forward declaration
    depth = 0
    declarators = 1
    has_name = False
    for j, t in enumerate(stmt):
        if t in ("(", "["):
            if depth == 0 and t == "(" and "=" not in stmt[:j]:
                prev = stmt[j - 1] if j else ""
                nxt = stmt[j + 1] if j + 1 < len(stmt) else ""
                if prev not in ("__attribute__",) and nxt != "*" and re.match(r"[A-Za-z_]\w*$", prev) and prev not in KEYWORDS:
                    return 0  # function prototype
            depth += 1
        elif t in (")", "]"):
            depth -= 1
        elif t == "," and depth == 0:
            declarators += 1
        elif depth == 0 and re.match(r"[A-Za-z_]\w*$", t) and t not in DECL_KEYWORDS:
            if not (j and stmt[j - 1] in ("struct", "union", "enum")):
                has_name = True
    return declarators if has_name else 0


def undetectable(lx: Lexed) -> int:
    return 0


DETECTORS: dict[str, Callable[[Lexed], int]] = {
    "subscript": subscript,
    "bitfield_member": bitfield_member,
    "comma_operator": comma_operator,
    "compound_assign": _count_ops(COMPOUND_OPS),
    "kw_const": _count_words({"const", "__const"}),
    "division": _count_ops({"/", "%", "/=", "%="}),
    "embedded_assign": embedded_assign,
    "pre_increment": _inc_dec("++", postfix=False),
    "pre_decrement": _inc_dec("--", postfix=False),
    "post_increment": _inc_dec("++", postfix=True),
    "post_decrement": _inc_dec("--", postfix=True),
    "unary_plus": unary_plus,
    "jump_statement": _count_words({"goto", "break", "continue"}),
    "long_long": long_long,
    "int8_type": lambda lx: _count_words({"int8_t", "__int8"})(lx) + _count_pairs("signed", "char")(lx),
    "uint8_type": lambda lx: _count_words({"uint8_t", "__uint8"})(lx) + _count_pairs("unsigned", "char")(lx),
    "floating_point": floating_point,
    "int64_type": _count_words({"int64_t", "uint64_t", "__int64"}),
    "kw_inline": _count_words({"inline", "__inline", "__inline__"}),
    "multiplication": multiplication,
    "packed_attribute": lambda lx: _count_words({"packed", "__packed__"})(lx) + _count_pairs("pragma", "pack")(lx),
    "kw_struct": _count_words({"struct"}),
    "kw_union": _count_words({"union"}),
    "kw_volatile": _count_words({"volatile", "__volatile__"}),
    "volatile_pointer": _qualified_pointer("volatile"),
    "const_pointer": _qualified_pointer("const"),
    "global_declarator": global_declarator,
    "builtin_call": lambda lx: sum(1 for k, t in lx.tokens if k == "id" and t.startswith("__builtin_")),
    "pointer_use": pointer_use,
}
