"""Template engine: role-tagged templates with strict `{name}` substitution.

Grammar: `{name}` is a placeholder (identifier: letters, digits, underscore,
not starting with a digit). `{{` and `}}` escape literal braces. Nothing else
is special; there is no conditional or loop syntax, and binding values are
inserted verbatim, never re-expanded.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .messages import Message, Role

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def is_identifier(name: str) -> bool:
    """True if `name` is usable as a placeholder or memory-variable name."""
    return _IDENT.fullmatch(name) is not None


class TemplateError(Exception):
    """Base class for template parse and render failures."""


class TemplateSyntaxError(TemplateError):
    """Source text violates the placeholder grammar."""


class MissingVariable(TemplateError):
    """A placeholder had no binding at render time."""

    def __init__(self, name: str) -> None:
        super().__init__(f"missing binding for template variable {name!r}")
        self.name = name


def _scan(source: str) -> list[tuple[str, str]]:
    """Tokenize source into ("text", chunk) and ("var", name) parts.

    Escapes are resolved here: `{{`/`}}` become literal braces inside text
    chunks, so downstream code never sees escape sequences.
    """
    parts: list[tuple[str, str]] = []
    buf: list[str] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "{":
            if i + 1 < n and source[i + 1] == "{":
                buf.append("{")
                i += 2
                continue
            end = source.find("}", i + 1)
            if end == -1:
                raise TemplateSyntaxError(f"unterminated placeholder at index {i}")
            name = source[i + 1 : end]
            if not name:
                raise TemplateSyntaxError(f"empty placeholder at index {i}")
            if not is_identifier(name):
                raise TemplateSyntaxError(f"bad placeholder name {name!r} at index {i}")
            if buf:
                parts.append(("text", "".join(buf)))
                buf = []
            parts.append(("var", name))
            i = end + 1
        elif ch == "}":
            if i + 1 < n and source[i + 1] == "}":
                buf.append("}")
                i += 2
                continue
            raise TemplateSyntaxError(
                f"single '}}' at index {i}; use '}}}}' for a literal brace"
            )
        else:
            buf.append(ch)
            i += 1
    if buf:
        parts.append(("text", "".join(buf)))
    return parts


@dataclass(frozen=True)
class PromptTemplate:
    """Parsed template text together with the exact set of placeholders in it."""

    source: str
    variables: frozenset[str]

    def render(self, bindings: Mapping[str, str]) -> str:
        """Substitute every placeholder; collapse escapes; leave all else intact.

        Raises MissingVariable if a placeholder has no binding. Bindings for
        names the template does not use are ignored.
        """
        out: list[str] = []
        for kind, value in _scan(self.source):
            if kind == "text":
                out.append(value)
            else:
                if value not in bindings:
                    raise MissingVariable(value)
                out.append(bindings[value])
        return "".join(out)

    def count_occurrences(self, name: str) -> int:
        """How many times the placeholder `name` appears in the source."""
        return sum(1 for kind, value in _scan(self.source) if kind == "var" and value == name)


def parse_template(source: str) -> PromptTemplate:
    """Parse source text, validating the grammar and collecting placeholders."""
    names = frozenset(value for kind, value in _scan(source) if kind == "var")
    return PromptTemplate(source=source, variables=names)


@dataclass(frozen=True)
class MessageTemplate:
    """A prompt template that renders to a message with a fixed role."""

    role: Role
    template: PromptTemplate

    def render(self, bindings: Mapping[str, str]) -> Message:
        return Message(self.role, self.template.render(bindings))


@dataclass(frozen=True)
class ChatPromptTemplate:
    """Ordered role-tagged templates rendered together into a message list."""

    parts: tuple[MessageTemplate, ...]
    variables: frozenset[str]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("a chat prompt needs at least one part")

    @classmethod
    def from_sources(cls, pairs: Iterable[tuple[Role, str]]) -> "ChatPromptTemplate":
        parts = tuple(MessageTemplate(role, parse_template(src)) for role, src in pairs)
        variables = frozenset().union(*(p.template.variables for p in parts))
        return cls(parts=parts, variables=variables)

    def render(self, bindings: Mapping[str, str]) -> list[Message]:
        """Render each part in order, all with the same bindings."""
        return [part.render(bindings) for part in self.parts]
