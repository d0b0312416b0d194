#include "cellsleuth/errors.hpp"
#include "cellsleuth/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace cellsleuth {

bool is_supported_function(const std::string& upper_name) {
    static const std::set<std::string> kFunctions = {"SUM", "AVERAGE", "IF",    "ROUND",
                                                     "MIN", "MAX",     "COUNT", "ABS"};
    return kFunctions.count(upper_name) > 0;
}

namespace {

std::string to_upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

enum class Tok {
    Number,
    String,
    Ident,
    QuotedSheet,
    LParen,
    RParen,
    Comma,
    Colon,
    Bang,
    Dollar,
    Percent,
    Amp,
    Caret,
    Star,
    Slash,
    Plus,
    Minus,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    double num = 0.0;
    std::size_t offset = 0;
};

class Lexer {
public:
    Lexer(const std::string& src, std::size_t start) : src_(src), pos_(start) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            Token t = next();
            out.push_back(t);
            if (t.kind == Tok::End) break;
        }
        return out;
    }

private:
    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        std::size_t at = pos_;
        if (pos_ >= src_.size()) return {Tok::End, "", 0.0, at};
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))))
            return lex_number(at);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(at);
        if (c == '"') return lex_string(at);
        if (c == '\'') return lex_quoted_sheet(at);
        ++pos_;
        switch (c) {
        case '(': return {Tok::LParen, "(", 0.0, at};
        case ')': return {Tok::RParen, ")", 0.0, at};
        case ',': return {Tok::Comma, ",", 0.0, at};
        case ':': return {Tok::Colon, ":", 0.0, at};
        case '!': return {Tok::Bang, "!", 0.0, at};
        case '$': return {Tok::Dollar, "$", 0.0, at};
        case '%': return {Tok::Percent, "%", 0.0, at};
        case '&': return {Tok::Amp, "&", 0.0, at};
        case '^': return {Tok::Caret, "^", 0.0, at};
        case '*': return {Tok::Star, "*", 0.0, at};
        case '/': return {Tok::Slash, "/", 0.0, at};
        case '+': return {Tok::Plus, "+", 0.0, at};
        case '-': return {Tok::Minus, "-", 0.0, at};
        case '=': return {Tok::Eq, "=", 0.0, at};
        case '<':
            if (pos_ < src_.size() && src_[pos_] == '>') {
                ++pos_;
                return {Tok::Ne, "<>", 0.0, at};
            }
            if (pos_ < src_.size() && src_[pos_] == '=') {
                ++pos_;
                return {Tok::Le, "<=", 0.0, at};
            }
            return {Tok::Lt, "<", 0.0, at};
        case '>':
            if (pos_ < src_.size() && src_[pos_] == '=') {
                ++pos_;
                return {Tok::Ge, ">=", 0.0, at};
            }
            return {Tok::Gt, ">", 0.0, at};
        default: throw SyntaxError(std::string("unexpected character '") + c + "'", at);
        }
    }

    Token lex_number(std::size_t at) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // the 'e' belongs to something else
            }
        }
        std::string text = src_.substr(start, pos_ - start);
        double value = 0.0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size())
            throw SyntaxError("malformed number '" + text + "'", at);
        return {Tok::Number, text, value, at};
    }

    Token lex_ident(std::size_t at) {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                src_[pos_] == '.'))
            ++pos_;
        return {Tok::Ident, src_.substr(start, pos_ - start), 0.0, at};
    }

    Token lex_string(std::size_t at) {
        ++pos_; // opening quote
        std::string value;
        for (;;) {
            if (pos_ >= src_.size()) throw SyntaxError("unterminated string literal", at);
            char c = src_[pos_++];
            if (c == '"') {
                if (pos_ < src_.size() && src_[pos_] == '"') {
                    value.push_back('"');
                    ++pos_;
                    continue;
                }
                break;
            }
            value.push_back(c);
        }
        return {Tok::String, value, 0.0, at};
    }

    Token lex_quoted_sheet(std::size_t at) {
        ++pos_; // opening apostrophe
        std::string value;
        for (;;) {
            if (pos_ >= src_.size()) throw SyntaxError("unterminated sheet name", at);
            char c = src_[pos_++];
            if (c == '\'') {
                if (pos_ < src_.size() && src_[pos_] == '\'') {
                    value.push_back('\'');
                    ++pos_;
                    continue;
                }
                break;
            }
            value.push_back(c);
        }
        return {Tok::QuotedSheet, value, 0.0, at};
    }

    const std::string& src_;
    std::size_t pos_;
};

bool all_letters(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalpha(c) != 0;
    });
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
    });
}

// Splits "AB12" into letters and digits; false unless the whole token is
// letters followed by digits.
bool split_letters_digits(const std::string& s, std::string& letters, std::string& digits) {
    std::size_t i = 0;
    while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    if (i == 0 || i == s.size()) return false;
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j != s.size()) return false;
    letters = s.substr(0, i);
    digits = s.substr(i);
    return true;
}

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {
        if (src.empty() || src[0] != '=') throw SyntaxError("formula must start with '='", 0);
        tokens_ = Lexer(src, 1).run();
    }

    AstPtr run() {
        AstPtr e = parse_cmp();
        if (peek().kind != Tok::End) throw SyntaxError("unexpected trailing input", peek().offset);
        return e;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(idx_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    Token take() { return tokens_[std::min(idx_++, tokens_.size() - 1)]; }
    bool accept(Tok kind) {
        if (peek().kind == kind) {
            ++idx_;
            return true;
        }
        return false;
    }
    void expect(Tok kind, const char* what) {
        if (!accept(kind)) throw SyntaxError(std::string("expected ") + what, peek().offset);
    }

    static AstPtr make(Ast&& a) { return std::make_shared<Ast>(std::move(a)); }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : p_(p) {
            if (++p_.depth_ > 200) throw SyntaxError("formula nests too deeply", p_.peek().offset);
        }
        ~DepthGuard() { --p_.depth_; }
        Parser& p_;
    };

    AstPtr parse_cmp() {
        DepthGuard g(*this);
        AstPtr lhs = parse_concat();
        for (;;) {
            Tok k = peek().kind;
            if (k != Tok::Eq && k != Tok::Ne && k != Tok::Lt && k != Tok::Le && k != Tok::Gt &&
                k != Tok::Ge)
                break;
            std::string op = take().text;
            AstPtr rhs = parse_concat();
            lhs = make(Ast{BinaryNode{op, lhs, rhs}});
        }
        return lhs;
    }

    AstPtr parse_concat() {
        AstPtr lhs = parse_add();
        while (peek().kind == Tok::Amp) {
            take();
            AstPtr rhs = parse_add();
            lhs = make(Ast{BinaryNode{"&", lhs, rhs}});
        }
        return lhs;
    }

    AstPtr parse_add() {
        AstPtr lhs = parse_mul();
        for (;;) {
            Tok k = peek().kind;
            if (k != Tok::Plus && k != Tok::Minus) break;
            std::string op = take().text;
            AstPtr rhs = parse_mul();
            lhs = make(Ast{BinaryNode{op, lhs, rhs}});
        }
        return lhs;
    }

    AstPtr parse_mul() {
        AstPtr lhs = parse_pow();
        for (;;) {
            Tok k = peek().kind;
            if (k != Tok::Star && k != Tok::Slash) break;
            std::string op = take().text;
            AstPtr rhs = parse_pow();
            lhs = make(Ast{BinaryNode{op, lhs, rhs}});
        }
        return lhs;
    }

    AstPtr parse_pow() {
        AstPtr lhs = parse_unary();
        while (peek().kind == Tok::Caret) {
            take();
            AstPtr rhs = parse_unary();
            lhs = make(Ast{BinaryNode{"^", lhs, rhs}});
        }
        return lhs;
    }

    AstPtr parse_unary() {
        DepthGuard g(*this);
        if (accept(Tok::Minus)) {
            AstPtr operand = parse_unary();
            return make(Ast{UnaryNode{'-', operand}});
        }
        return parse_postfix();
    }

    AstPtr parse_postfix() {
        AstPtr a = parse_atom();
        if (accept(Tok::Percent)) {
            // "5%" is the number 0.05; on anything else '%' scales by 1/100.
            if (const auto* num = std::get_if<NumberLit>(&a->node))
                return make(Ast{NumberLit{num->value / 100.0}});
            return make(Ast{BinaryNode{"/", a, make(Ast{NumberLit{100.0}})}});
        }
        return a;
    }

    AstPtr parse_atom() {
        DepthGuard g(*this);
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Number: {
            Token tok = take();
            return make(Ast{NumberLit{tok.num}});
        }
        case Tok::String: {
            Token tok = take();
            return make(Ast{TextLit{tok.text}});
        }
        case Tok::LParen: {
            take();
            AstPtr e = parse_cmp();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::Dollar: return finish_ref(std::nullopt);
        case Tok::QuotedSheet: {
            Token sheet = take();
            expect(Tok::Bang, "'!' after sheet name");
            return finish_ref(sheet.text);
        }
        case Tok::Ident: return parse_ident_atom();
        default: throw SyntaxError("expected a value, reference, or '('", t.offset);
        }
    }

    AstPtr parse_ident_atom() {
        Token ident = take();
        if (peek().kind == Tok::LParen) {
            std::string fn = to_upper(ident.text);
            if (!is_supported_function(fn))
                throw SyntaxError("unknown function '" + fn + "'", ident.offset);
            take(); // '('
            std::vector<AstPtr> args;
            if (peek().kind != Tok::RParen) {
                args.push_back(parse_cmp());
                while (accept(Tok::Comma)) args.push_back(parse_cmp());
            }
            expect(Tok::RParen, "')'");
            return make(Ast{CallNode{fn, std::move(args)}});
        }
        if (peek().kind == Tok::Bang) {
            take();
            return finish_ref(ident.text);
        }

        std::string upper = to_upper(ident.text);
        std::string letters, digits;
        if (split_letters_digits(ident.text, letters, digits)) {
            if (letters.size() <= 2) {
                Ref r = make_ref(std::nullopt, false, letters, false, digits, ident.offset);
                return maybe_range(r);
            }
            return make(Ast{NameRefNode{upper}}); // e.g. AAA1 is a name, not an address
        }
        if (all_letters(ident.text)) {
            // "A$1" arrives as Ident("A") '$' Number(1).
            if (letters_could_be_column(ident.text) && peek().kind == Tok::Dollar &&
                peek(1).kind == Tok::Number && all_digits(peek(1).text)) {
                take(); // '$'
                Token rowTok = take();
                Ref r = make_ref(std::nullopt, false, ident.text, true, rowTok.text, ident.offset);
                return maybe_range(r);
            }
            if (upper == "TRUE") return make(Ast{BoolLit{true}});
            if (upper == "FALSE") return make(Ast{BoolLit{false}});
        }
        return make(Ast{NameRefNode{upper}});
    }

    static bool letters_could_be_column(const std::string& letters) {
        return column_from_letters(letters) != 0;
    }

    // Parses the "$A$1" body once any sheet qualifier has been consumed.
    AstPtr finish_ref(std::optional<std::string> sheet) {
        Ref r = parse_ref_body(std::move(sheet));
        return maybe_range(r);
    }

    Ref parse_ref_body(std::optional<std::string> sheet) {
        std::size_t at = peek().offset;
        bool col_abs = accept(Tok::Dollar);
        if (peek().kind != Tok::Ident)
            throw SyntaxError("expected a cell reference", peek().offset);
        Token ident = take();

        std::string letters, digits;
        if (split_letters_digits(ident.text, letters, digits)) {
            if (col_abs || sheet) {
                // '$' or a sheet qualifier forces reference interpretation.
            }
            return make_ref(std::move(sheet), col_abs, letters, false, digits, at);
        }
        if (all_letters(ident.text)) {
            bool row_abs = accept(Tok::Dollar);
            if (peek().kind != Tok::Number || !all_digits(peek().text))
                throw SyntaxError("expected a row number", peek().offset);
            Token rowTok = take();
            return make_ref(std::move(sheet), col_abs, ident.text, row_abs, rowTok.text, at);
        }
        throw SyntaxError("malformed cell reference '" + ident.text + "'", at);
    }

    Ref make_ref(std::optional<std::string> sheet, bool col_abs, const std::string& letters,
                 bool row_abs, const std::string& digits, std::size_t at) {
        int col = column_from_letters(letters);
        if (col == 0) throw SyntaxError("column '" + to_upper(letters) + "' is out of range", at);
        if (digits.size() > 6) throw SyntaxError("row is out of range", at);
        int row = std::stoi(digits);
        if (!address_in_bounds(col, row))
            throw SyntaxError("row " + std::to_string(row) + " is out of range", at);
        return Ref{std::move(sheet), col, row, col_abs, row_abs};
    }

    // A ':' after a cell reference makes it a range; the second endpoint
    // inherits the sheet qualifier unless it names the same sheet itself.
    AstPtr maybe_range(const Ref& first) {
        if (!accept(Tok::Colon)) return make(Ast{CellRefNode{first}});
        std::optional<std::string> sheet2;
        if (peek().kind == Tok::QuotedSheet ||
            (peek().kind == Tok::Ident && peek(1).kind == Tok::Bang)) {
            Token sheetTok = take();
            expect(Tok::Bang, "'!' after sheet name");
            sheet2 = sheetTok.text;
        }
        std::size_t at = peek().offset;
        Ref second = parse_ref_body(sheet2 ? sheet2 : first.sheet);
        if (!second.sheet.has_value()) second.sheet = first.sheet;
        bool same = (!first.sheet && !second.sheet) ||
                    (first.sheet && second.sheet && *first.sheet == *second.sheet);
        if (!same) throw SyntaxError("range endpoints must be on the same sheet", at);
        return make(Ast{RangeRefNode{first, second}});
    }

    const std::string& src_;
    std::vector<Token> tokens_;
    std::size_t idx_ = 0;
    int depth_ = 0;
};

} // namespace

AstPtr parse_formula(const std::string& text) { return Parser(text).run(); }

std::vector<Ref> expand_range_rect(const Ref& a, const Ref& b) {
    int c1 = std::min(a.col, b.col), c2 = std::max(a.col, b.col);
    int r1 = std::min(a.row, b.row), r2 = std::max(a.row, b.row);
    std::vector<Ref> out;
    out.reserve(static_cast<std::size_t>(c2 - c1 + 1) * static_cast<std::size_t>(r2 - r1 + 1));
    for (int r = r1; r <= r2; ++r)
        for (int c = c1; c <= c2; ++c) out.push_back(Ref{a.sheet, c, r, false, false});
    return out;
}

namespace {

void walk_refs(const Ast& ast, std::vector<Ref>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, CellRefNode>) {
                out.push_back(node.ref);
            } else if constexpr (std::is_same_v<T, RangeRefNode>) {
                auto cells = expand_range_rect(node.first, node.second);
                out.insert(out.end(), cells.begin(), cells.end());
            } else if constexpr (std::is_same_v<T, CallNode>) {
                for (const auto& a : node.args) walk_refs(*a, out);
            } else if constexpr (std::is_same_v<T, UnaryNode>) {
                walk_refs(*node.operand, out);
            } else if constexpr (std::is_same_v<T, BinaryNode>) {
                walk_refs(*node.lhs, out);
                walk_refs(*node.rhs, out);
            }
        },
        ast.node);
}

void walk_names(const Ast& ast, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NameRefNode>) {
                out.push_back(node.name);
            } else if constexpr (std::is_same_v<T, CallNode>) {
                for (const auto& a : node.args) walk_names(*a, out);
            } else if constexpr (std::is_same_v<T, UnaryNode>) {
                walk_names(*node.operand, out);
            } else if constexpr (std::is_same_v<T, BinaryNode>) {
                walk_names(*node.lhs, out);
                walk_names(*node.rhs, out);
            }
        },
        ast.node);
}

void walk_constants(const Ast& ast, std::vector<double>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NumberLit>) {
                out.push_back(node.value);
            } else if constexpr (std::is_same_v<T, CallNode>) {
                for (std::size_t i = 0; i < node.args.size(); ++i) {
                    // ROUND's digit-position argument is idiomatic, not a
                    // hardwired constant.
                    if (node.func == "ROUND" && i == 1 &&
                        std::holds_alternative<NumberLit>(node.args[i]->node))
                        continue;
                    walk_constants(*node.args[i], out);
                }
            } else if constexpr (std::is_same_v<T, UnaryNode>) {
                walk_constants(*node.operand, out);
            } else if constexpr (std::is_same_v<T, BinaryNode>) {
                walk_constants(*node.lhs, out);
                walk_constants(*node.rhs, out);
            }
        },
        ast.node);
}

Ref translate_ref(const Ref& r, int dr, int dc) {
    Ref out = r;
    if (!r.row_abs) out.row += dr;
    if (!r.col_abs) out.col += dc;
    if (!address_in_bounds(out.col, out.row))
        throw OutOfBounds("translated reference leaves the sheet: " + format_address(r.address()) +
                          " by (" + std::to_string(dr) + "," + std::to_string(dc) + ")");
    return out;
}

} // namespace

std::vector<Ref> collect_refs(const Ast& ast) {
    std::vector<Ref> out;
    walk_refs(ast, out);
    return out;
}

std::vector<std::string> collect_names(const Ast& ast) {
    std::vector<std::string> out;
    walk_names(ast, out);
    return out;
}

std::vector<double> collect_constants(const Ast& ast) {
    std::vector<double> out;
    walk_constants(ast, out);
    return out;
}

AstPtr translate(const Ast& ast, int dr, int dc) {
    return std::visit(
        [&](const auto& node) -> AstPtr {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, CellRefNode>) {
                return std::make_shared<Ast>(Ast{CellRefNode{translate_ref(node.ref, dr, dc)}});
            } else if constexpr (std::is_same_v<T, RangeRefNode>) {
                return std::make_shared<Ast>(Ast{RangeRefNode{translate_ref(node.first, dr, dc),
                                                              translate_ref(node.second, dr, dc)}});
            } else if constexpr (std::is_same_v<T, CallNode>) {
                std::vector<AstPtr> args;
                args.reserve(node.args.size());
                for (const auto& a : node.args) args.push_back(translate(*a, dr, dc));
                return std::make_shared<Ast>(Ast{CallNode{node.func, std::move(args)}});
            } else if constexpr (std::is_same_v<T, UnaryNode>) {
                return std::make_shared<Ast>(Ast{UnaryNode{node.op, translate(*node.operand, dr, dc)}});
            } else if constexpr (std::is_same_v<T, BinaryNode>) {
                return std::make_shared<Ast>(
                    Ast{BinaryNode{node.op, translate(*node.lhs, dr, dc), translate(*node.rhs, dr, dc)}});
            } else {
                return std::make_shared<Ast>(Ast{node});
            }
        },
        ast.node);
}

bool ast_equal(const Ast& a, const Ast& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, NumberLit>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, TextLit>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, CellRefNode>) {
                return na.ref == nb.ref;
            } else if constexpr (std::is_same_v<T, RangeRefNode>) {
                return na.first == nb.first && na.second == nb.second;
            } else if constexpr (std::is_same_v<T, NameRefNode>) {
                return na.name == nb.name;
            } else if constexpr (std::is_same_v<T, CallNode>) {
                if (na.func != nb.func || na.args.size() != nb.args.size()) return false;
                for (std::size_t i = 0; i < na.args.size(); ++i)
                    if (!ast_equal(*na.args[i], *nb.args[i])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, UnaryNode>) {
                return na.op == nb.op && ast_equal(*na.operand, *nb.operand);
            } else if constexpr (std::is_same_v<T, BinaryNode>) {
                return na.op == nb.op && ast_equal(*na.lhs, *nb.lhs) && ast_equal(*na.rhs, *nb.rhs);
            }
        },
        a.node);
}

bool is_division(const Ast& ast) {
    const auto* bin = std::get_if<BinaryNode>(&ast.node);
    return bin != nullptr && bin->op == "/";
}

namespace {

bool flatten_chain(const Ast& ast, std::vector<Ref>& out) {
    if (const auto* bin = std::get_if<BinaryNode>(&ast.node)) {
        if (bin->op != "+" && bin->op != "-") return false;
        return flatten_chain(*bin->lhs, out) && flatten_chain(*bin->rhs, out);
    }
    if (const auto* cell = std::get_if<CellRefNode>(&ast.node)) {
        out.push_back(cell->ref);
        return true;
    }
    return false;
}

} // namespace

std::vector<Ref> plus_chain_refs(const Ast& ast) {
    const auto* bin = std::get_if<BinaryNode>(&ast.node);
    if (bin == nullptr || (bin->op != "+" && bin->op != "-")) return {};
    std::vector<Ref> out;
    if (!flatten_chain(ast, out) || out.size() < 2) return {};
    return out;
}

} // namespace cellsleuth
