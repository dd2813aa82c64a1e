# -*- coding: utf-8 -*-
"""Syntactic context of console.log call sites: blocks, functions, complexity."""

import logging
import re
from dataclasses import dataclass
from datetime import datetime
from typing import AbstractSet, List, Optional, Sequence

from tree_sitter import Node

from .models import (
    CandidateCommit,
    FunctionComplexity,
    LogArgument,
    LogLocation,
    LogRecord,
)
from .parsing import (
    FUNCTION_NODE_TYPES,
    LOGICAL_OPERATORS,
    ParsedSource,
    call_arguments,
    estree_kind,
    is_function,
    logical_parent,
    same_node,
    unwrap_parens,
    walk,
    walk_pruned,
)
from .semantics import embedded_calls

logger = logging.getLogger(__name__)

DEFAULT_CONSOLE_METHODS = ("log",)
EXTRA_CONSOLE_METHODS = ("log", "info", "warn", "error", "debug")

ANONYMOUS = "(anonymous)"
TOP_LEVEL = "(top-level)"

STRUCTURAL_BLOCKS = {
    "try_statement": "TryStatement",
    "catch_clause": "CatchClause",
    "if_statement": "IfStatement",
    "for_statement": "For",
    "for_in_statement": "For",
    "while_statement": "WhileStatement",
    "do_statement": "DoWhileStatement",
    "switch_case": "SwitchCase",
    "switch_default": "SwitchCase",
    "class_body": "ClassBody",
    "program": "Program",
}

# Parents under which a statement_block is a free-standing `{ ... }` block.
BARE_BLOCK_PARENTS = frozenset(
    {"statement_block", "program", "switch_case", "switch_default", "labeled_statement"}
)

DECISION_NODE_TYPES = frozenset(
    {
        "if_statement",
        "ternary_expression",
        "for_statement",
        "for_in_statement",
        "while_statement",
        "do_statement",
        "switch_case",
        "catch_clause",
    }
)

FIELD_DEFINITIONS = ("field_definition", "public_field_definition")
ASSIGNMENTS = ("assignment_expression", "augmented_assignment_expression")


@dataclass
class FunctionContext:
    """The function enclosing a log call."""

    node: Node
    kind: str
    name: str
    is_async: bool
    is_callback: bool
    is_anonymous: bool
    line: int
    callback_callee_name: Optional[str] = None


def is_console_call(node: Node, parsed: ParsedSource, methods: Sequence[str] = DEFAULT_CONSOLE_METHODS) -> bool:
    """Whether ``node`` is ``console.<method>(...)`` with a non-computed member."""
    if node.type != "call_expression":
        return False
    arguments = node.child_by_field_name("arguments")
    callee = node.child_by_field_name("function")
    if arguments is None or arguments.type != "arguments" or callee is None:
        return False
    callee = unwrap_parens(callee)
    if callee.type != "member_expression":
        return False
    obj = callee.child_by_field_name("object")
    prop = callee.child_by_field_name("property")
    if obj is None or prop is None:
        return False
    if obj.type != "identifier" or prop.type != "property_identifier":
        return False
    return parsed.text(obj) == "console" and parsed.text(prop) in methods


def find_log_calls(parsed: ParsedSource, methods: Sequence[str] = DEFAULT_CONSOLE_METHODS) -> List[Node]:
    """All console.log call sites in source order, nested ones included."""
    return [node for node in walk(parsed.root) if is_console_call(node, parsed, methods)]


def match_deleted_logs(calls: Sequence[Node], deleted_lines: AbstractSet[int]) -> List[Node]:
    """Keep the calls whose start line was deleted by the commit."""
    return [call for call in calls if call.start_point[0] + 1 in deleted_lines]


def enclosing_block(node: Node) -> str:
    """Kind of the nearest structural block around ``node``.

    A function kind is only reported when the node sits at the root level of
    that function's body; a log under an ``if`` in a function reports
    ``IfStatement``. A free-standing ``{ ... }`` block reports
    ``BlockStatement``.
    """
    child = node
    parent = node.parent
    while parent is not None:
        if is_function(parent):
            if same_node(child, parent.child_by_field_name("body")):
                return estree_kind(parent)
        elif parent.type == "statement_block" and parent.parent is not None:
            if parent.parent.type in BARE_BLOCK_PARENTS:
                return "BlockStatement"
        elif parent.type in STRUCTURAL_BLOCKS:
            return STRUCTURAL_BLOCKS[parent.type]
        child = parent
        parent = parent.parent
    return "Program"


def _own_name(fn: Node, parsed: ParsedSource) -> Optional[str]:
    name = fn.child_by_field_name("name")
    if name is None:
        return None
    return parsed.text(name)


def _callee_name(call: Node, parsed: ParsedSource) -> Optional[str]:
    callee = call.child_by_field_name("function")
    if callee is None:
        return None
    callee = unwrap_parens(callee)
    if callee.type == "identifier":
        return parsed.text(callee)
    if callee.type == "member_expression":
        prop = callee.child_by_field_name("property")
        return parsed.text(prop) if prop is not None else None
    return None


def _call_receiving(fn: Node) -> Optional[Node]:
    """The call expression that takes ``fn`` as a direct argument, if any."""
    parent, _ = logical_parent(fn)
    if parent is None or parent.type != "arguments":
        return None
    call = parent.parent
    if call is None or call.type != "call_expression":
        return None
    return call


def _assigned_name(target: Node, parsed: ParsedSource) -> Optional[str]:
    target = unwrap_parens(target)
    if target.type == "identifier":
        return parsed.text(target)
    if target.type == "member_expression":
        prop = target.child_by_field_name("property")
        return parsed.text(prop) if prop is not None else None
    return None


def name_function(fn: Node, parsed: ParsedSource) -> str:
    """Name a function, borrowing a name from its surroundings if it has none.

    In order: its own identifier; the declared variable; the callee it is
    passed to (``then`` for ``p.then(() => ...)``); the leftmost target of an
    assignment chain; the class field key. Otherwise ``(anonymous)``.
    """
    own = _own_name(fn, parsed)
    if own:
        return own

    parent, child = logical_parent(fn)
    if parent is None:
        return ANONYMOUS

    if parent.type == "variable_declarator":
        target = parent.child_by_field_name("name")
        if target is not None and target.type == "identifier":
            return parsed.text(target)

    call = _call_receiving(fn)
    if call is not None:
        name = _callee_name(call, parsed)
        if name:
            return name

    if parent.type in ASSIGNMENTS and same_node(parent.child_by_field_name("right"), child):
        outer = parent
        while True:
            above, seen = logical_parent(outer)
            if above is None or above.type not in ASSIGNMENTS:
                break
            if not same_node(above.child_by_field_name("right"), seen):
                break
            outer = above
        left = outer.child_by_field_name("left")
        name = _assigned_name(left, parsed) if left is not None else None
        if name:
            return name

    if parent.type in FIELD_DEFINITIONS:
        key = parent.child_by_field_name("property") or parent.child_by_field_name("name")
        if key is not None:
            return parsed.text(key)

    if parent.type == "pair":
        key = parent.child_by_field_name("key")
        if key is not None:
            return parsed.text(key)

    return ANONYMOUS


def is_async_function(fn: Node) -> bool:
    return any(child.type == "async" for child in fn.children)


def classify_function(fn: Node, parsed: ParsedSource) -> tuple[bool, bool, bool, str]:
    """(is_async, is_callback, is_anonymous, function_type) of a function node."""
    is_callback = _call_receiving(fn) is not None
    is_anonymous = not _own_name(fn, parsed)
    return is_async_function(fn), is_callback, is_anonymous, estree_kind(fn)


def callback_callee_name(fn: Node, parsed: ParsedSource) -> Optional[str]:
    """Name of the function a callback is passed to (``then``, ``setTimeout``)."""
    call = _call_receiving(fn)
    if call is None:
        return None
    return _callee_name(call, parsed)


def describe_function(fn: Node, parsed: ParsedSource) -> FunctionContext:
    is_async, is_callback, is_anonymous, kind = classify_function(fn, parsed)
    return FunctionContext(
        node=fn,
        kind=kind,
        name=name_function(fn, parsed),
        is_async=is_async,
        is_callback=is_callback,
        is_anonymous=is_anonymous,
        line=fn.start_point[0] + 1,
        callback_callee_name=callback_callee_name(fn, parsed) if is_callback else None,
    )


def enclosing_function(node: Node, parsed: ParsedSource) -> Optional[FunctionContext]:
    """Nearest function-like ancestor of ``node``; None for top-level code."""
    parent = node.parent
    while parent is not None:
        if is_function(parent):
            return describe_function(parent, parsed)
        parent = parent.parent
    return None


def cyclomatic_complexity(fn: Node, count_logical_operators: bool = True) -> int:
    """McCabe complexity of one function, nested functions excluded.

    Counts if, ternary, for/for-in/for-of, while, do-while, non-default
    switch cases, catch clauses and, unless disabled, ``&&``/``||``/``??``.
    """
    body = fn.child_by_field_name("body")
    if body is None or is_function(body):
        return 1
    complexity = 1
    for node in walk_pruned(body, FUNCTION_NODE_TYPES):
        if node.type in FUNCTION_NODE_TYPES:
            continue
        if node.type in DECISION_NODE_TYPES:
            complexity += 1
        elif count_logical_operators and node.type == "binary_expression":
            operator = node.child_by_field_name("operator")
            if operator is not None and operator.type in LOGICAL_OPERATORS:
                complexity += 1
    return complexity


def folder_path(path: str) -> str:
    """Flatten a file path the way the log dataset does: ``src/a.js`` -> ``src_a_js``."""
    return re.sub(r"[\\/.]", "_", path)


def build_log_record(
    call: Node,
    parsed: ParsedSource,
    path: str,
    commit: CandidateCommit,
    author_time: Optional[datetime] = None,
    count_logical_operators: bool = True,
) -> LogRecord:
    """Assemble the full record for one deleted log call."""
    function = enclosing_function(call, parsed)
    arguments = [
        LogArgument(text=parsed.text(argument), type_of_arg=estree_kind(argument))
        for argument in call_arguments(call)
    ]

    complexity = None
    if function is not None:
        complexity = FunctionComplexity(
            name=function.name,
            complexity=cyclomatic_complexity(function.node, count_logical_operators),
            line=function.line,
        )

    return LogRecord(
        log_in_string=parsed.text(call),
        function_name=function.name if function else TOP_LEVEL,
        function_type=function.kind if function else None,
        log_loc=LogLocation(
            start=parsed.position(call.start_point),
            end=parsed.position(call.end_point),
        ),
        complexity_of_function=complexity,
        arguments=arguments,
        is_async_function=function.is_async if function else False,
        is_callback_function=function.is_callback if function else False,
        is_anonymous_function=function.is_anonymous if function else False,
        block_statement=enclosing_block(call),
        repository_name=commit.repo_full_name.replace("/", "_"),
        commit_sha=commit.sha,
        folder_path=folder_path(path),
        callback_callee_name=function.callback_callee_name if function else None,
        embedded_calls=embedded_calls(call, parsed),
        file_path=path,
        event_time=commit.event_time,
        author_time=author_time,
    )
