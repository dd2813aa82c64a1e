# -*- coding: utf-8 -*-
"""Argument-level semantics of log calls: kinds, labels, literals, embedded calls."""

import logging
import re
from dataclasses import dataclass, field
from enum import StrEnum
from typing import List, Optional, Sequence

from tree_sitter import Node

from .models import LogArgument
from .parsing import (
    ParsedSource,
    call_arguments,
    estree_kind,
    is_plain_call,
    unwrap_parens,
    walk,
)

logger = logging.getLogger(__name__)

NUMERIC_LITERAL = re.compile(r"\d+\.?\d*|\.\d+")
REPEATED_RUN = re.compile(r"(.)\1{3,}", re.DOTALL)
QUOTES = ("'", '"', "`")


class ArgKind(StrEnum):
    LITERAL = "literal"
    TEMPLATE = "template"
    IDENTIFIER = "identifier"
    MEMBER = "member"
    CALL = "call"
    OTHER = "other"


@dataclass
class ArgumentProfile:
    """Shape of the argument list of one log call."""

    arg_count: int = 0
    kinds: List[ArgKind] = field(default_factory=list)
    node_kinds: List[str] = field(default_factory=list)
    rendered: List[str] = field(default_factory=list)
    names: List[Optional[str]] = field(default_factory=list)
    literal_texts: List[Optional[str]] = field(default_factory=list)
    string_like: List[bool] = field(default_factory=list)
    has_literal: bool = False
    has_any_literal: bool = False
    label_names_other: bool = False
    embedded_callee_names: List[str] = field(default_factory=list)


def _arg_kind(node: Node) -> ArgKind:
    kind = node.type
    if kind in ("string", "number", "true", "false", "null", "regex"):
        return ArgKind.LITERAL
    if kind == "template_string":
        return ArgKind.TEMPLATE
    if kind in ("identifier", "undefined"):
        return ArgKind.IDENTIFIER
    if kind in ("member_expression", "subscript_expression"):
        return ArgKind.MEMBER
    if is_plain_call(node):
        return ArgKind.CALL
    return ArgKind.OTHER


def literal_value(text: str) -> str:
    """Strip the delimiters of a string or template literal's source text."""
    if len(text) >= 2 and text[0] in QUOTES and text[-1] == text[0]:
        return text[1:-1]
    return text


def member_property_name(text: str) -> Optional[str]:
    """Final property of a dotted member expression (``a.b.c`` -> ``c``)."""
    if text.endswith("]") or "." not in text:
        return None
    name = text.rsplit(".", 1)[1].strip()
    return name if name.isidentifier() or name.startswith("#") else None


def _finish(profile: ArgumentProfile, word_boundary: bool) -> ArgumentProfile:
    profile.arg_count = len(profile.kinds)
    profile.has_literal = any(profile.string_like)
    profile.has_any_literal = any(
        kind in (ArgKind.LITERAL, ArgKind.TEMPLATE) for kind in profile.kinds
    )
    if profile.arg_count == 2:
        profile.label_names_other = detect_label(profile, word_boundary=word_boundary)
    return profile


def profile_arguments(
    call: Node, parsed: ParsedSource, word_boundary: bool = False
) -> ArgumentProfile:
    """Profile the arguments of a log call straight from the syntax tree."""
    profile = ArgumentProfile()
    for argument in call_arguments(call):
        node = unwrap_parens(argument)
        kind = _arg_kind(node)
        text = parsed.text(node)
        profile.kinds.append(kind)
        profile.node_kinds.append(estree_kind(node))
        profile.rendered.append(parsed.text(argument))
        profile.string_like.append(node.type in ("string", "template_string"))

        if kind == ArgKind.IDENTIFIER:
            profile.names.append(text)
        elif node.type == "member_expression":
            prop = node.child_by_field_name("property")
            profile.names.append(parsed.text(prop) if prop is not None else None)
        else:
            profile.names.append(None)

        if kind in (ArgKind.LITERAL, ArgKind.TEMPLATE):
            profile.literal_texts.append(literal_value(text))
        else:
            profile.literal_texts.append(None)

    profile.embedded_callee_names = embedded_calls(call, parsed)
    return _finish(profile, word_boundary)


def profile_from_record(
    arguments: Sequence[LogArgument],
    embedded: Sequence[str] = (),
    word_boundary: bool = False,
) -> ArgumentProfile:
    """Rebuild a profile from a serialized record's ``arguments`` list.

    Used when analyzing record files, where the syntax tree is gone. Only the
    source text and estree kind of each argument are available.
    """
    profile = ArgumentProfile()
    for argument in arguments:
        text = argument.text.strip()
        while text.startswith("(") and text.endswith(")"):
            text = text[1:-1].strip()
        node_kind = argument.type_of_arg
        if node_kind == "Literal":
            kind = ArgKind.LITERAL
        elif node_kind == "TemplateLiteral":
            kind = ArgKind.TEMPLATE
        elif node_kind == "Identifier":
            kind = ArgKind.IDENTIFIER
        elif node_kind == "MemberExpression":
            kind = ArgKind.MEMBER
        elif node_kind == "CallExpression":
            kind = ArgKind.CALL
        else:
            kind = ArgKind.OTHER

        profile.kinds.append(kind)
        profile.node_kinds.append(node_kind)
        profile.rendered.append(argument.text)
        is_string = kind in (ArgKind.LITERAL, ArgKind.TEMPLATE) and text[:1] in QUOTES
        profile.string_like.append(is_string)
        if kind == ArgKind.IDENTIFIER:
            profile.names.append(text)
        elif kind == ArgKind.MEMBER:
            profile.names.append(member_property_name(text))
        else:
            profile.names.append(None)
        literal = kind in (ArgKind.LITERAL, ArgKind.TEMPLATE)
        profile.literal_texts.append(literal_value(text) if literal else None)

    profile.embedded_callee_names = list(embedded)
    return _finish(profile, word_boundary)


def detect_label(profile: ArgumentProfile, word_boundary: bool = False) -> bool:
    """Whether one literal argument names the other, non-literal one.

    The test is a case-insensitive substring match, so
    ``console.log('Result:', result)`` is labeled. With ``word_boundary``
    the name must appear as a whole word. Argument order does not matter.

    Raises:
        ValueError: The call does not have exactly two arguments.
    """
    if profile.arg_count != 2:
        raise ValueError(f"Label detection needs exactly 2 arguments, got {profile.arg_count}")
    for index in (0, 1):
        other = 1 - index
        text = profile.literal_texts[index]
        name = profile.names[other]
        if not profile.string_like[index] or text is None or not name:
            continue
        if profile.kinds[other] in (ArgKind.LITERAL, ArgKind.TEMPLATE):
            continue
        if word_boundary:
            if re.search(rf"\b{re.escape(name)}\b", text, re.IGNORECASE):
                return True
        elif name.lower() in text.lower():
            return True
    return False


def normalize_literal(text: str) -> str:
    """Collapse numeric literals to ``<NUM>`` and long character runs to ``cR``.

    ``"----------"`` and ``"-----"`` both become ``"-R"``; runs of three or
    fewer are kept as they are.
    """
    if NUMERIC_LITERAL.fullmatch(text):
        return "<NUM>"
    # Single pass: "aaaaRRR" becomes "aRRRR", a new run made by the marker.
    return REPEATED_RUN.sub(lambda match: match.group(1) + "R", text)


def _qualified_name(node: Node, parsed: ParsedSource) -> Optional[str]:
    node = unwrap_parens(node)
    if node.type in ("identifier", "this", "super", "property_identifier", "private_property_identifier"):
        return parsed.text(node)
    if node.type == "member_expression":
        obj = node.child_by_field_name("object")
        prop = node.child_by_field_name("property")
        if obj is None or prop is None:
            return None
        prefix = _qualified_name(obj, parsed)
        if prefix is None:
            return None
        return f"{prefix}.{parsed.text(prop)}"
    return None


def callee_qualified_name(call: Node, parsed: ParsedSource) -> str:
    """Dotted name of a call's callee, or its whitespace-free source text."""
    callee = call.child_by_field_name("function")
    if callee is None:
        return ""
    name = _qualified_name(callee, parsed)
    if name is not None:
        return name
    return re.sub(r"\s+", "", parsed.text(callee))


def embedded_calls(call: Node, parsed: ParsedSource) -> List[str]:
    """Callee names of every call nested in the log's arguments, pre-order."""
    names = []
    for argument in call_arguments(call):
        for node in walk(argument):
            if is_plain_call(node):
                names.append(callee_qualified_name(node, parsed))
    return names
