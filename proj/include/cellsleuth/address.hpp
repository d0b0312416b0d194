#ifndef CELLSLEUTH_ADDRESS_HPP
#define CELLSLEUTH_ADDRESS_HPP

#include <compare>
#include <string>

namespace cellsleuth {

// Columns run A..ZZ and rows 1..65536; both 1-based.
constexpr int kMaxColumn = 702;
constexpr int kMaxRow = 65536;

struct CellAddress {
    int column = 1;
    int row = 1;

    // Row-major ordering: row first, then column.
    friend constexpr auto operator<=>(const CellAddress& a, const CellAddress& b) {
        if (auto c = a.row <=> b.row; c != 0) return c;
        return a.column <=> b.column;
    }
    friend constexpr bool operator==(const CellAddress&, const CellAddress&) = default;
};

constexpr bool address_in_bounds(int column, int row) {
    return column >= 1 && column <= kMaxColumn && row >= 1 && row <= kMaxRow;
}

// Accepts optional '$' before the letters and before the digits; the flags are
// discarded. Throws MalformedAddress on anything else.
CellAddress parse_address(const std::string& text);

// Uppercase A1 text; inverse of parse_address.
std::string format_address(const CellAddress& addr);

// "AA" -> 27. Returns 0 when the text is not pure letters or out of range.
int column_from_letters(const std::string& letters);
std::string column_letters(int column);

} // namespace cellsleuth

#endif
