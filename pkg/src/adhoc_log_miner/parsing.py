# -*- coding: utf-8 -*-
"""Tree-sitter front end for JavaScript/TypeScript with estree node kinds."""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import PurePosixPath
from typing import Iterator, List, Optional, Tuple

import tree_sitter_javascript as tsjs
import tree_sitter_typescript as tsts
from tree_sitter import Language, Node, Parser, Tree

from .errors import SourceParseError
from .models import SourcePosition

logger = logging.getLogger(__name__)

FUNCTION_NODE_TYPES = frozenset(
    {
        "function_declaration",
        "generator_function_declaration",
        "function_expression",
        "function",
        "generator_function",
        "arrow_function",
        "method_definition",
    }
)

# Tree-sitter node types whose estree name is not their CamelCase form.
ESTREE_KINDS = {
    "program": "Program",
    "generator_function_declaration": "FunctionDeclaration",
    "function": "FunctionExpression",
    "generator_function": "FunctionExpression",
    "arrow_function": "ArrowFunctionExpression",
    "class": "ClassExpression",
    "member_expression": "MemberExpression",
    "subscript_expression": "MemberExpression",
    "property_identifier": "Identifier",
    "shorthand_property_identifier": "Identifier",
    "private_property_identifier": "PrivateIdentifier",
    "undefined": "Identifier",
    "string": "Literal",
    "number": "Literal",
    "true": "Literal",
    "false": "Literal",
    "null": "Literal",
    "regex": "Literal",
    "template_string": "TemplateLiteral",
    "this": "ThisExpression",
    "augmented_assignment_expression": "AssignmentExpression",
    "ternary_expression": "ConditionalExpression",
    "object": "ObjectExpression",
    "array": "ArrayExpression",
    "do_statement": "DoWhileStatement",
    "switch_default": "SwitchCase",
    "finally_clause": "BlockStatement",
    "statement_block": "BlockStatement",
    "lexical_declaration": "VariableDeclaration",
    "field_definition": "PropertyDefinition",
    "public_field_definition": "PropertyDefinition",
    "pair": "Property",
    "jsx_self_closing_element": "JSXElement",
    "as_expression": "TSAsExpression",
    "satisfies_expression": "TSSatisfiesExpression",
    "non_null_expression": "TSNonNullExpression",
    "type_assertion": "TSTypeAssertion",
}

LOGICAL_OPERATORS = frozenset({"&&", "||", "??"})


@lru_cache(maxsize=None)
def _language(grammar: str) -> Language:
    if grammar == "typescript":
        return Language(tsts.language_typescript())
    if grammar == "tsx":
        return Language(tsts.language_tsx())
    return Language(tsjs.language())


def grammar_for(path: str) -> str:
    """Pick the grammar for a file: TypeScript, TSX, or JavaScript (with JSX)."""
    suffix = PurePosixPath(path).suffix.lower()
    if suffix in (".ts", ".mts", ".cts"):
        return "typescript"
    if suffix == ".tsx":
        return "tsx"
    return "javascript"


@dataclass
class ParsedSource:
    """A parsed file: its text, UTF-8 bytes and syntax tree."""

    path: str
    source: str
    data: bytes
    tree: Tree
    _line_starts: List[int] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        starts = [0]
        for index, byte in enumerate(self.data):
            if byte == 0x0A:
                starts.append(index + 1)
        self._line_starts = starts

    @property
    def root(self) -> Node:
        return self.tree.root_node

    def text(self, node: Node) -> str:
        return self.data[node.start_byte : node.end_byte].decode("utf-8", errors="replace")

    def position(self, point: Tuple[int, int]) -> SourcePosition:
        """Convert a tree-sitter (row, byte column) point to an estree line/column.

        Columns count UTF-16 code units, as JavaScript tooling does, so a
        character outside the Basic Multilingual Plane takes two columns.
        """
        row, byte_column = point[0], point[1]
        start = self._line_starts[row]
        prefix = self.data[start : start + byte_column].decode("utf-8", errors="replace")
        return SourcePosition(line=row + 1, column=len(prefix.encode("utf-16-le")) // 2)


def _first_error_line(node: Node) -> Optional[int]:
    for current in walk(node):
        if current.type == "ERROR" or current.is_missing:
            return current.start_point[0] + 1
    return None


def parse_source(source: str, path: str = "<memory>.js") -> ParsedSource:
    """Parse JavaScript/TypeScript source into a syntax tree.

    Raises:
        SourceParseError: The tree contains ERROR or MISSING nodes.
    """
    data = source.encode("utf-8")
    parser = Parser(_language(grammar_for(path)))
    tree = parser.parse(data)
    if tree.root_node.has_error:
        raise SourceParseError(path, _first_error_line(tree.root_node))
    return ParsedSource(path=path, source=source, data=data, tree=tree)


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal of the subtree rooted at ``node`` via a cursor."""
    cursor = node.walk()
    while True:
        yield cursor.node
        if cursor.goto_first_child() or cursor.goto_next_sibling():
            continue
        while True:
            # The cursor cannot leave the subtree it was created on.
            if not cursor.goto_parent():
                return
            if cursor.goto_next_sibling():
                break


def walk_pruned(node: Node, stop_types: frozenset[str]) -> Iterator[Node]:
    """Pre-order traversal that does not descend below ``stop_types`` nodes.

    The root itself is always expanded; pruned nodes are still yielded.
    """
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        if current is not node and current.type in stop_types:
            continue
        stack.extend(reversed(current.children))


def same_node(a: Optional[Node], b: Optional[Node]) -> bool:
    if a is None or b is None:
        return False
    return (a.start_byte, a.end_byte, a.type) == (b.start_byte, b.end_byte, b.type)


def syntax_children(node: Node) -> List[Node]:
    """Named children without comments."""
    return [child for child in node.named_children if child.type != "comment"]


def unwrap_parens(node: Node) -> Node:
    while node.type == "parenthesized_expression":
        inner = syntax_children(node)
        if not inner:
            break
        node = inner[0]
    return node


def logical_parent(node: Node) -> Tuple[Optional[Node], Node]:
    """Parent of ``node`` ignoring parentheses, and the child seen by it."""
    child = node
    parent = node.parent
    while parent is not None and parent.type == "parenthesized_expression":
        child = parent
        parent = parent.parent
    return parent, child


def estree_kind(node: Node) -> str:
    """Name a node the way an estree parser would (CallExpression, ...)."""
    node = unwrap_parens(node)
    kind = node.type
    if kind == "binary_expression":
        operator = node.child_by_field_name("operator")
        if operator is not None and operator.type in LOGICAL_OPERATORS:
            return "LogicalExpression"
        return "BinaryExpression"
    if kind == "for_in_statement":
        is_of = any(child.type == "of" for child in node.children)
        return "ForOfStatement" if is_of else "ForInStatement"
    if kind == "call_expression":
        arguments = node.child_by_field_name("arguments")
        if arguments is not None and arguments.type == "template_string":
            return "TaggedTemplateExpression"
        return "CallExpression"
    if kind in ESTREE_KINDS:
        return ESTREE_KINDS[kind]
    return "".join(part.capitalize() for part in kind.split("_"))


def is_function(node: Node) -> bool:
    return node.type in FUNCTION_NODE_TYPES


def iter_functions(parsed: ParsedSource) -> Iterator[Node]:
    """Every function-like node in the file, in source order."""
    for node in walk(parsed.root):
        if is_function(node):
            yield node


def is_plain_call(node: Node) -> bool:
    """A call with an argument list (tagged templates excluded)."""
    if node.type != "call_expression":
        return False
    arguments = node.child_by_field_name("arguments")
    return arguments is not None and arguments.type == "arguments"


def call_arguments(call: Node) -> List[Node]:
    arguments = call.child_by_field_name("arguments")
    if arguments is None or arguments.type != "arguments":
        return []
    return syntax_children(arguments)
