"""ALCH+ abstract syntax, a prefix-functional expression parser, and TBox files.

Expression grammar (whitespace insignificant outside names)::

    expr := name | "top" | "bot" | "not(" expr ")" | "and(" expr "," expr ")"
          | "or(" expr "," expr ")" | "all(" role "," expr ")"
          | "some(" role "," expr ")"
    role := name | "runion(" role "," role ")" | "rinter(" role "," role ")"

TBox file format, one statement per line, '#' starts a comment::

    concept <name>
    role <name>
    <child> sub <parent>          # atomic concept inclusion
    role <child> sub <parent>     # role inclusion
    define <name> = <expr>
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_KEYWORDS = frozenset(
    {"top", "bot", "not", "and", "or", "all", "some", "runion", "rinter"}
)


class DlError(ValueError):
    """Base error for parsing and TBox validation."""


class DlSyntaxError(DlError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class TboxError(DlError):
    pass


# --- abstract syntax -------------------------------------------------------


@dataclass(frozen=True)
class RoleExpr:
    pass


@dataclass(frozen=True)
class AtomicRole(RoleExpr):
    name: str


@dataclass(frozen=True)
class RoleUnion(RoleExpr):
    left: RoleExpr
    right: RoleExpr


@dataclass(frozen=True)
class RoleIntersection(RoleExpr):
    left: RoleExpr
    right: RoleExpr


@dataclass(frozen=True)
class ConceptExpr:
    pass


@dataclass(frozen=True)
class Atomic(ConceptExpr):
    name: str


@dataclass(frozen=True)
class Top(ConceptExpr):
    pass


@dataclass(frozen=True)
class Bottom(ConceptExpr):
    pass


@dataclass(frozen=True)
class Not(ConceptExpr):
    arg: ConceptExpr


@dataclass(frozen=True)
class And(ConceptExpr):
    left: ConceptExpr
    right: ConceptExpr


@dataclass(frozen=True)
class Or(ConceptExpr):
    left: ConceptExpr
    right: ConceptExpr


@dataclass(frozen=True)
class All(ConceptExpr):
    role: RoleExpr
    filler: ConceptExpr


@dataclass(frozen=True)
class Some(ConceptExpr):
    role: RoleExpr
    filler: ConceptExpr


def role_to_text(role: RoleExpr) -> str:
    if isinstance(role, AtomicRole):
        return role.name
    if isinstance(role, RoleUnion):
        return f"runion({role_to_text(role.left)},{role_to_text(role.right)})"
    if isinstance(role, RoleIntersection):
        return f"rinter({role_to_text(role.left)},{role_to_text(role.right)})"
    raise TypeError(role)


def to_text(expr: ConceptExpr) -> str:
    """Canonical printer; parse_expr(to_text(e)) == e."""
    if isinstance(expr, Atomic):
        return expr.name
    if isinstance(expr, Top):
        return "top"
    if isinstance(expr, Bottom):
        return "bot"
    if isinstance(expr, Not):
        return f"not({to_text(expr.arg)})"
    if isinstance(expr, And):
        return f"and({to_text(expr.left)},{to_text(expr.right)})"
    if isinstance(expr, Or):
        return f"or({to_text(expr.left)},{to_text(expr.right)})"
    if isinstance(expr, All):
        return f"all({role_to_text(expr.role)},{to_text(expr.filler)})"
    if isinstance(expr, Some):
        return f"some({role_to_text(expr.role)},{to_text(expr.filler)})"
    raise TypeError(expr)


# --- expression parser -----------------------------------------------------


class _Scanner:
    def __init__(self, text: str, line_offset: int = 1):
        self.text = text
        self.pos = 0
        self.line_offset = line_offset

    def _location(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + self.line_offset
        last_nl = self.text.rfind("\n", 0, pos)
        column = pos - last_nl if last_nl >= 0 else pos + 1
        return line, column

    def error(self, message: str, pos: int | None = None) -> DlSyntaxError:
        line, column = self._location(self.pos if pos is None else pos)
        return DlSyntaxError(message, line, column)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str) -> None:
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != char:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            raise self.error(f"expected '{char}', found {found!r}")
        self.pos += 1

    def name(self) -> str:
        self.skip_ws()
        match = NAME_RE.match(self.text, self.pos)
        if not match:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            raise self.error(f"expected a name, found {found!r}")
        self.pos = match.end()
        return match.group()

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _parse_role(sc: _Scanner) -> RoleExpr:
    name = sc.name()
    if name in ("runion", "rinter"):
        sc.expect("(")
        left = _parse_role(sc)
        sc.expect(",")
        right = _parse_role(sc)
        sc.expect(")")
        return RoleUnion(left, right) if name == "runion" else RoleIntersection(left, right)
    if name in _KEYWORDS:
        raise sc.error(f"keyword {name!r} is not a role")
    return AtomicRole(name)


def _parse_concept(sc: _Scanner) -> ConceptExpr:
    name = sc.name()
    if name == "top":
        return Top()
    if name == "bot":
        return Bottom()
    if name == "not":
        sc.expect("(")
        arg = _parse_concept(sc)
        sc.expect(")")
        return Not(arg)
    if name in ("and", "or"):
        sc.expect("(")
        left = _parse_concept(sc)
        sc.expect(",")
        right = _parse_concept(sc)
        sc.expect(")")
        return And(left, right) if name == "and" else Or(left, right)
    if name in ("all", "some"):
        sc.expect("(")
        role = _parse_role(sc)
        sc.expect(",")
        filler = _parse_concept(sc)
        sc.expect(")")
        return All(role, filler) if name == "all" else Some(role, filler)
    if name in ("runion", "rinter"):
        raise sc.error(f"role constructor {name!r} used as a concept")
    return Atomic(name)


def parse_expr(text: str, line_offset: int = 1) -> ConceptExpr:
    """Parse a prefix-functional concept expression; no normalization."""
    sc = _Scanner(text, line_offset)
    expr = _parse_concept(sc)
    if not sc.at_end():
        raise sc.error(f"trailing input {sc.text[sc.pos:]!r}")
    return expr


# --- TBox ------------------------------------------------------------------


@dataclass(frozen=True)
class TBox:
    """Terminology: declared atomics, inclusion edges and definitions.

    ``atomic_concepts``/``atomic_roles`` preserve declaration order; both
    inclusion relations are DAGs, checked at parse time.
    """

    atomic_concepts: tuple[str, ...]
    atomic_roles: tuple[str, ...]
    concept_inclusions: tuple[tuple[str, str], ...]
    role_inclusions: tuple[tuple[str, str], ...]
    definitions: dict[str, ConceptExpr] = field(default_factory=dict)

    def concept_parents(self, name: str) -> tuple[str, ...]:
        return tuple(p for c, p in self.concept_inclusions if c == name)

    def role_parents(self, name: str) -> tuple[str, ...]:
        return tuple(p for c, p in self.role_inclusions if c == name)

    def concept_ancestors(self, name: str) -> frozenset[str]:
        """All strict ancestors of an atomic concept in the hierarchy."""
        out: set[str] = set()
        stack = [name]
        while stack:
            for parent in self.concept_parents(stack.pop()):
                if parent not in out:
                    out.add(parent)
                    stack.append(parent)
        return frozenset(out)

    def role_ancestors(self, name: str) -> frozenset[str]:
        out: set[str] = set()
        stack = [name]
        while stack:
            for parent in self.role_parents(stack.pop()):
                if parent not in out:
                    out.add(parent)
                    stack.append(parent)
        return frozenset(out)


def _find_cycle(nodes: list[str], edges: list[tuple[str, str]]) -> str | None:
    parents: dict[str, list[str]] = {n: [] for n in nodes}
    for child, parent in edges:
        parents[child].append(parent)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}

    def visit(node: str) -> str | None:
        color[node] = GRAY
        for parent in parents[node]:
            if color[parent] == GRAY:
                return parent
            if color[parent] == WHITE:
                found = visit(parent)
                if found is not None:
                    return found
        color[node] = BLACK
        return None

    for n in nodes:
        if color[n] == WHITE:
            found = visit(n)
            if found is not None:
                return found
    return None


def _check_names(expr: ConceptExpr, concepts: set[str], roles: set[str],
                 defined: set[str], where: str) -> None:
    if isinstance(expr, Atomic):
        if expr.name not in concepts and expr.name not in defined:
            raise TboxError(f"undeclared name {expr.name!r} in {where}")
    elif isinstance(expr, Not):
        _check_names(expr.arg, concepts, roles, defined, where)
    elif isinstance(expr, (And, Or)):
        _check_names(expr.left, concepts, roles, defined, where)
        _check_names(expr.right, concepts, roles, defined, where)
    elif isinstance(expr, (All, Some)):
        _check_role_names(expr.role, roles, where)
        _check_names(expr.filler, concepts, roles, defined, where)


def _check_role_names(role: RoleExpr, roles: set[str], where: str) -> None:
    if isinstance(role, AtomicRole):
        if role.name not in roles:
            raise TboxError(f"undeclared role {role.name!r} in {where}")
    elif isinstance(role, (RoleUnion, RoleIntersection)):
        _check_role_names(role.left, roles, where)
        _check_role_names(role.right, roles, where)


def _definition_refs(expr: ConceptExpr, defined: set[str]) -> set[str]:
    if isinstance(expr, Atomic):
        return {expr.name} if expr.name in defined else set()
    if isinstance(expr, Not):
        return _definition_refs(expr.arg, defined)
    if isinstance(expr, (And, Or)):
        return _definition_refs(expr.left, defined) | _definition_refs(expr.right, defined)
    if isinstance(expr, (All, Some)):
        return _definition_refs(expr.filler, defined)
    return set()


def parse_tbox(text: str) -> TBox:
    """Parse and validate a TBox file; rejects cycles and undeclared names."""
    concepts: list[str] = []
    roles: list[str] = []
    concept_incl: list[tuple[str, str]] = []
    role_incl: list[tuple[str, str]] = []
    definitions: dict[str, ConceptExpr] = {}
    pending_defs: list[tuple[str, str, int]] = []

    def check_name(token: str, lineno: int) -> str:
        if not NAME_RE.fullmatch(token) or token in _KEYWORDS:
            raise TboxError(f"invalid name {token!r} (line {lineno})")
        return token

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "concept" and len(tokens) == 2:
            name = check_name(tokens[1], lineno)
            if name in concepts:
                raise TboxError(f"duplicate concept {name!r} (line {lineno})")
            concepts.append(name)
        elif tokens[0] == "role" and len(tokens) == 2:
            name = check_name(tokens[1], lineno)
            if name in roles:
                raise TboxError(f"duplicate role {name!r} (line {lineno})")
            roles.append(name)
        elif tokens[0] == "role" and len(tokens) == 4 and tokens[2] == "sub":
            child, parent = check_name(tokens[1], lineno), check_name(tokens[3], lineno)
            role_incl.append((child, parent))
        elif len(tokens) == 3 and tokens[1] == "sub":
            child, parent = check_name(tokens[0], lineno), check_name(tokens[2], lineno)
            concept_incl.append((child, parent))
        elif tokens[0] == "define":
            rest = line[len("define"):].strip()
            if "=" not in rest:
                raise TboxError(f"malformed define (line {lineno})")
            name_part, expr_part = rest.split("=", 1)
            name = check_name(name_part.strip(), lineno)
            pending_defs.append((name, expr_part.strip(), lineno))
        else:
            raise TboxError(f"unrecognized statement {line!r} (line {lineno})")

    concept_set, role_set = set(concepts), set(roles)
    for child, parent in concept_incl:
        for name in (child, parent):
            if name not in concept_set:
                raise TboxError(f"undeclared name {name!r} in inclusion")
    for child, parent in role_incl:
        for name in (child, parent):
            if name not in role_set:
                raise TboxError(f"undeclared role {name!r} in role inclusion")

    defined_names: set[str] = set()
    for name, _, lineno in pending_defs:
        if name in concept_set or name in role_set:
            raise TboxError(
                f"definition name {name!r} collides with a declaration (line {lineno})"
            )
        if name in defined_names:
            raise TboxError(f"duplicate definition {name!r} (line {lineno})")
        defined_names.add(name)

    for name, expr_text, lineno in pending_defs:
        expr = parse_expr(expr_text, line_offset=lineno)
        _check_names(expr, concept_set, role_set, defined_names, f"define {name}")
        definitions[name] = expr

    cycle = _find_cycle(concepts, concept_incl)
    if cycle is not None:
        raise TboxError(f"cycle in concept hierarchy involving {cycle!r}")
    cycle = _find_cycle(roles, role_incl)
    if cycle is not None:
        raise TboxError(f"cycle in role hierarchy involving {cycle!r}")
    def_edges = [
        (name, ref)
        for name, expr in definitions.items()
        for ref in _definition_refs(expr, defined_names)
    ]
    cycle = _find_cycle(sorted(defined_names), def_edges)
    if cycle is not None:
        raise TboxError(f"cycle in definitions involving {cycle!r}")

    return TBox(
        atomic_concepts=tuple(concepts),
        atomic_roles=tuple(roles),
        concept_inclusions=tuple(concept_incl),
        role_inclusions=tuple(role_incl),
        definitions=definitions,
    )


def expand_definitions(expr: ConceptExpr, tbox: TBox) -> ConceptExpr:
    """Replace every defined name by its body (definitions are acyclic)."""
    defs = tbox.definitions
    if not defs:
        return expr

    def walk(e: ConceptExpr) -> ConceptExpr:
        if isinstance(e, Atomic):
            body = defs.get(e.name)
            return walk(body) if body is not None else e
        if isinstance(e, Not):
            return Not(walk(e.arg))
        if isinstance(e, And):
            return And(walk(e.left), walk(e.right))
        if isinstance(e, Or):
            return Or(walk(e.left), walk(e.right))
        if isinstance(e, All):
            return All(e.role, walk(e.filler))
        if isinstance(e, Some):
            return Some(e.role, walk(e.filler))
        return e

    return walk(expr)
