"""A DOT grammar checker built with pyparsing.

Implements the published grammar of the DOT language (graph, stmt_list,
node/edge/attr statements, subgraphs, ports; IDs as identifiers, numerals
or double-quoted strings). ``validate_dot`` parses a whole document and
raises ``pyparsing.ParseException`` on anything outside the grammar.
"""

from __future__ import annotations

import pyparsing as pp


def _build_parser() -> pp.ParserElement:
    LBRACE, RBRACE, LBRACK, RBRACK = map(pp.Suppress, "{}[]")
    EQ, SEMI, COMMA, COLON = map(pp.Suppress, "=;,:")

    identifier = pp.Word(pp.alphas + "_", pp.alphanums + "_")
    numeral = pp.Regex(r"-?(\.\d+|\d+(\.\d*)?)")
    quoted = pp.QuotedString('"', esc_char="\\", multiline=True)
    dot_id = quoted | numeral | identifier

    GRAPH = pp.CaselessKeyword("graph")
    DIGRAPH = pp.CaselessKeyword("digraph")
    SUBGRAPH = pp.CaselessKeyword("subgraph")
    NODE = pp.CaselessKeyword("node")
    EDGE = pp.CaselessKeyword("edge")
    STRICT = pp.CaselessKeyword("strict")

    edge_op = pp.Literal("->") | pp.Literal("--")

    a_list = pp.DelimitedList(
        pp.Group(dot_id + EQ + dot_id), delim=pp.Suppress(pp.one_of(", ;"))
    )
    attr_list = pp.OneOrMore(LBRACK + pp.Optional(a_list) + RBRACK)

    compass = pp.one_of("n ne e se s sw w nw c _")
    port = (COLON + dot_id + pp.Optional(COLON + compass)) | (COLON + compass)
    node_id = dot_id + pp.Optional(port)

    stmt_list = pp.Forward()
    subgraph = pp.Group(
        pp.Optional(SUBGRAPH + pp.Optional(dot_id)) + LBRACE + stmt_list + RBRACE
    )

    endpoint = subgraph | pp.Group(node_id)
    edge_rhs = pp.OneOrMore(edge_op + endpoint)
    edge_stmt = endpoint + edge_rhs + pp.Optional(attr_list)

    attr_stmt = (GRAPH | NODE | EDGE) + attr_list
    assignment = dot_id + EQ + dot_id
    node_stmt = pp.Group(node_id) + pp.Optional(attr_list)

    stmt = pp.Group(attr_stmt | assignment | edge_stmt | node_stmt | subgraph)
    stmt_list <<= pp.ZeroOrMore(stmt + pp.Optional(SEMI))

    graph = (
        pp.Optional(STRICT)
        + (GRAPH | DIGRAPH)
        + pp.Optional(dot_id)
        + LBRACE
        + stmt_list
        + RBRACE
    )
    graph.ignore(pp.cStyleComment)
    graph.ignore(pp.dblSlashComment)
    return graph


_PARSER = _build_parser()


def validate_dot(text: str):
    """Parse ``text`` as a complete DOT document; raises on syntax errors."""
    return _PARSER.parse_string(text, parse_all=True)
