# -*- coding: utf-8 -*-
"""Tests for the tree-sitter front end."""

import pytest
from conftest import first_node, parse_js

from adhoc_log_miner.errors import SourceParseError
from adhoc_log_miner.parsing import (
    FUNCTION_NODE_TYPES,
    estree_kind,
    grammar_for,
    iter_functions,
    parse_source,
    walk,
    walk_pruned,
)


def recursive_walk(node):
    """Plain recursive pre-order traversal used as a reference."""
    yield node
    for child in node.children:
        yield from recursive_walk(child)


class TestGrammarFor:
    """Test cases for grammar selection."""

    @pytest.mark.parametrize(
        "path,grammar",
        [
            ("src/app.js", "javascript"),
            ("src/App.jsx", "javascript"),
            ("lib/index.mjs", "javascript"),
            ("src/app.ts", "typescript"),
            ("src/view.tsx", "tsx"),
            ("src/app.MTS", "typescript"),
        ],
    )
    def test_extension_mapping(self, path, grammar):
        assert grammar_for(path) == grammar


class TestParseSource:
    """Test cases for parse_source."""

    def test_valid_javascript(self):
        parsed = parse_js("const a = 1;\nconsole.log(a);\n")
        assert parsed.root.type == "program"
        assert parsed.path == "src/test.js"

    def test_syntax_error(self):
        with pytest.raises(SourceParseError) as exc_info:
            parse_source("function broken( {\n  return 1;\n", "src/broken.js")
        assert exc_info.value.path == "src/broken.js"
        assert "src/broken.js" in str(exc_info.value)

    def test_typescript_annotations(self):
        """Type annotations parse with the TypeScript grammar only."""
        source = "const n: number = 1;\nfunction f(x: string): void {\n  console.log(x);\n}\n"
        parsed = parse_source(source, "src/app.ts")
        assert [estree_kind(fn) for fn in iter_functions(parsed)] == ["FunctionDeclaration"]
        with pytest.raises(SourceParseError):
            parse_source(source, "src/app.js")

    def test_jsx_in_javascript_files(self):
        parse_source("const el = <div>{name}</div>;\n", "src/view.jsx")

    def test_position_uses_character_columns(self):
        """Columns count characters, not UTF-8 bytes."""
        parsed = parse_js("const s = 'é'; console.log(s);\n")
        call = [n for n in walk(parsed.root) if n.type == "call_expression"][0]
        position = parsed.position(call.start_point)
        assert position.line == 1
        assert position.column == 15
        assert call.start_point[1] == 16

    def test_position_counts_utf16_code_units(self):
        """Astral-plane characters take two columns, like in estree locations."""
        parsed = parse_js("const s = '😀'; console.log(s);\n")
        call = [n for n in walk(parsed.root) if n.type == "call_expression"][0]
        assert call.start_point[1] == 18
        assert parsed.position(call.start_point).column == 16

    def test_text_slices_source(self):
        parsed = parse_js("console.log( 'a',  b );")
        call = first_node(parsed, "call_expression")
        assert parsed.text(call) == "console.log( 'a',  b )"


class TestWalk:
    """Test cases for the tree traversals."""

    SOURCE = """
function outer(a) {
  if (a) {
    const inner = () => a.map((x) => x * 2);
    return inner();
  }
  return [1, 2, 3].filter(Boolean);
}
class K { m() { return 1; } }
"""

    def test_matches_recursive_walk(self):
        parsed = parse_js(self.SOURCE)
        walked = [(n.type, n.start_byte, n.end_byte) for n in walk(parsed.root)]
        expected = [(n.type, n.start_byte, n.end_byte) for n in recursive_walk(parsed.root)]
        assert walked == expected

    def test_subtree_walk_stays_inside(self):
        parsed = parse_js(self.SOURCE)
        statement = first_node(parsed, "if_statement")
        nodes = list(walk(statement))
        assert nodes[0].type == "if_statement"
        assert all(statement.start_byte <= n.start_byte and n.end_byte <= statement.end_byte for n in nodes)
        assert not any(n.type == "class_declaration" for n in nodes)

    def test_walk_pruned_stops_at_functions(self):
        parsed = parse_js(self.SOURCE)
        outer = first_node(parsed, "function_declaration")
        body = outer.child_by_field_name("body")
        types = [n.type for n in walk_pruned(body, FUNCTION_NODE_TYPES)]
        assert types.count("arrow_function") == 1
        assert "binary_expression" not in types
        assert "if_statement" in types

    def test_iter_functions_kinds(self):
        parsed = parse_js(self.SOURCE)
        kinds = sorted(estree_kind(fn) for fn in iter_functions(parsed))
        assert kinds == [
            "ArrowFunctionExpression",
            "ArrowFunctionExpression",
            "FunctionDeclaration",
            "MethodDefinition",
        ]


class TestEstreeKind:
    """Test cases for estree node naming."""

    @pytest.mark.parametrize(
        "source,node_type,kind",
        [
            ("a && b;", "binary_expression", "LogicalExpression"),
            ("a ?? b;", "binary_expression", "LogicalExpression"),
            ("a + b;", "binary_expression", "BinaryExpression"),
            ("for (const x of xs) {}", "for_in_statement", "ForOfStatement"),
            ("for (const k in o) {}", "for_in_statement", "ForInStatement"),
            ("tag`x`;", "call_expression", "TaggedTemplateExpression"),
            ("f(x);", "call_expression", "CallExpression"),
            ("'s';", "string", "Literal"),
            ("`t${x}`;", "template_string", "TemplateLiteral"),
            ("a.b;", "member_expression", "MemberExpression"),
            ("a[0];", "subscript_expression", "MemberExpression"),
            ("new Foo();", "new_expression", "NewExpression"),
            ("x => x;", "arrow_function", "ArrowFunctionExpression"),
            ("({ a: 1 });", "object", "ObjectExpression"),
            ("a ? b : c;", "ternary_expression", "ConditionalExpression"),
        ],
    )
    def test_kinds(self, source, node_type, kind):
        parsed = parse_js(source)
        assert estree_kind(first_node(parsed, node_type)) == kind

    def test_parentheses_are_transparent(self):
        parsed = parse_js("((a));")
        assert estree_kind(first_node(parsed, "parenthesized_expression")) == "Identifier"
