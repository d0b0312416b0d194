#ifndef CELLSLEUTH_FORMULA_HPP
#define CELLSLEUTH_FORMULA_HPP

#include "cellsleuth/address.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cellsleuth {

// A single cell reference as written in a formula. Column/row components are
// independently absolute ('$' prefixed) or relative.
struct Ref {
    std::optional<std::string> sheet;
    int col = 1;
    int row = 1;
    bool col_abs = false;
    bool row_abs = false;

    CellAddress address() const { return CellAddress{col, row}; }
    friend bool operator==(const Ref&, const Ref&) = default;
};

struct Ast;
using AstPtr = std::shared_ptr<const Ast>;

struct NumberLit {
    double value;
};
struct TextLit {
    std::string value;
};
struct BoolLit {
    bool value;
};
struct CellRefNode {
    Ref ref;
};
struct RangeRefNode {
    Ref first;
    Ref second; // shares the sheet qualifier with first
};
struct NameRefNode {
    std::string name; // stored uppercase
};
struct CallNode {
    std::string func; // member of the supported set, uppercase
    std::vector<AstPtr> args;
};
struct UnaryNode {
    char op; // '-'
    AstPtr operand;
};
struct BinaryNode {
    std::string op; // one of + - * / ^ & = <> < <= > >=
    AstPtr lhs;
    AstPtr rhs;
};

struct Ast {
    std::variant<NumberLit, TextLit, BoolLit, CellRefNode, RangeRefNode, NameRefNode, CallNode,
                 UnaryNode, BinaryNode>
        node;
};

bool is_supported_function(const std::string& upper_name);

// Parses a formula (must start with '='). Throws SyntaxError with offset.
AstPtr parse_formula(const std::string& text);

// Shortest round-trip decimal text for a double; used everywhere a number is
// rendered so output stays byte-deterministic.
std::string format_number(double value);

// Customization points for the shared expression renderer. Defaults render
// canonical A1 text; the report module swaps these for English output.
struct RenderHooks {
    std::function<std::string(const Ref&)> cell;
    std::function<std::string(const Ref&, const Ref&)> range;
    std::function<std::string(const std::string&)> name;
    // Returns the full text for op joined between lhs/rhs, e.g. "+" or " plus ".
    std::function<std::string(const std::string&)> binary_op;
    std::function<std::string(char)> unary_op;
    std::function<std::string(const std::string&, const std::vector<std::string>&)> call;

    static RenderHooks canonical();
};

// Renders with minimal parentheses that preserve the parse; no leading '='.
std::string render_expression(const Ast& ast, const RenderHooks& hooks);

// Canonical text: '=' + uppercase functions, '$' flags preserved, no spaces.
// parse_formula(print_canonical(a)) is structurally equal to a.
std::string print_canonical(const Ast& ast);

// R1C1-style relative normalization as seen from the host cell. Two formulas
// are copy-equivalent iff their schema keys are equal.
std::string schema_key(const Ast& ast, const CellAddress& host);

// Shifts every relative reference component by (dr, dc); absolute components
// and everything else are untouched. Throws OutOfBounds.
AstPtr translate(const Ast& ast, int dr, int dc);

// Every CellRef in source order (duplicates preserved) with each RangeRef
// expanded to its full rectangle, row-major.
std::vector<Ref> collect_refs(const Ast& ast);

// Names referenced by the formula, in source order.
std::vector<std::string> collect_names(const Ast& ast);

// NumberLit values in source order, excluding a bare literal in ROUND's
// digit-position (second) argument.
std::vector<double> collect_constants(const Ast& ast);

bool ast_equal(const Ast& a, const Ast& b);

// True when the root of the formula is a division.
bool is_division(const Ast& ast);

// Flattens a +/- spine whose leaves are all single cell refs. Empty result
// when the formula is not such a chain or has fewer than two leaves.
std::vector<Ref> plus_chain_refs(const Ast& ast);

} // namespace cellsleuth

#endif
