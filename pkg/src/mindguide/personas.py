"""Personas: the assistant's configured identity, shipped and loaded as data.

A persona is a JSON document {id, system_template, human_template, welcome}.
The built-in "mindguide" persona (a mental-health assistant) ships with the
package; a persona directory can add or override personas by id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .memory import DEFAULT_MEMORY_KEY
from .prompting import TemplateError, parse_template

DEFAULT_PERSONA_ID = "mindguide"
DEFAULT_INPUT_KEY = "question"


class PersonaError(Exception):
    """Persona document is malformed or violates the template contract."""


@dataclass(frozen=True)
class Persona:
    id: str
    system_template: str
    human_template: str
    welcome: str

    def validate(
        self,
        input_key: str = DEFAULT_INPUT_KEY,
        memory_key: str = DEFAULT_MEMORY_KEY,
    ) -> None:
        """Check the template contract before any session is created.

        The system template may only reference the memory variable; the human
        template must contain the input placeholder exactly once and may
        additionally reference the memory variable.
        """
        try:
            system = parse_template(self.system_template)
            human = parse_template(self.human_template)
        except TemplateError as exc:
            raise PersonaError(f"persona {self.id!r}: {exc}") from None
        stray = system.variables - {memory_key}
        if stray:
            raise PersonaError(
                f"persona {self.id!r}: system template has unbound variables {sorted(stray)}"
            )
        count = human.count_occurrences(input_key)
        if count != 1:
            raise PersonaError(
                f"persona {self.id!r}: human template must contain {{{input_key}}} "
                f"exactly once (found {count})"
            )

    @classmethod
    def from_mapping(cls, data: dict) -> "Persona":
        missing = {"id", "system_template", "human_template", "welcome"} - data.keys()
        if missing:
            raise PersonaError(f"persona document missing fields {sorted(missing)}")
        if not all(isinstance(data[k], str) for k in ("id", "system_template", "human_template", "welcome")):
            raise PersonaError("persona fields must all be strings")
        return cls(
            id=data["id"],
            system_template=data["system_template"],
            human_template=data["human_template"],
            welcome=data["welcome"],
        )

    @classmethod
    def from_file(cls, path: Path) -> "Persona":
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise PersonaError(f"cannot read persona file {path}: {exc}") from None
        if not isinstance(data, dict):
            raise PersonaError(f"persona file {path} is not a JSON object")
        return cls.from_mapping(data)


def builtin_personas() -> dict[str, Persona]:
    """Personas bundled with the package, keyed by id."""
    text = resources.files("mindguide").joinpath("data/mindguide.json").read_text("utf-8")
    persona = Persona.from_mapping(json.loads(text))
    return {persona.id: persona}


def load_personas(directory: Path | None = None) -> dict[str, Persona]:
    """Built-in personas plus any *.json documents in `directory`.

    Directory personas win on id collision, so the default persona can be
    overridden by dropping a file in the persona directory. Every persona is
    validated before it is returned.
    """
    personas = builtin_personas()
    if directory is not None:
        for path in sorted(Path(directory).glob("*.json")):
            persona = Persona.from_file(path)
            personas[persona.id] = persona
    for persona in personas.values():
        persona.validate()
    return personas
