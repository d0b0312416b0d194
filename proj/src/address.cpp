#include "cellsleuth/address.hpp"

#include "cellsleuth/errors.hpp"

#include <cctype>

namespace cellsleuth {

int column_from_letters(const std::string& letters) {
    if (letters.empty() || letters.size() > 2) return 0;
    int col = 0;
    for (char ch : letters) {
        if (!std::isalpha(static_cast<unsigned char>(ch))) return 0;
        col = col * 26 + (std::toupper(static_cast<unsigned char>(ch)) - 'A' + 1);
    }
    return col <= kMaxColumn ? col : 0;
}

std::string column_letters(int column) {
    std::string out;
    while (column > 0) {
        int rem = column % 26;
        if (rem == 0) rem = 26;
        out.insert(out.begin(), static_cast<char>('A' + rem - 1));
        column = (column - rem) / 26;
    }
    return out;
}

CellAddress parse_address(const std::string& text) {
    std::size_t i = 0;
    if (i < text.size() && text[i] == '$') ++i;
    std::string letters;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i])))
        letters.push_back(text[i++]);
    if (i < text.size() && text[i] == '$') ++i;
    std::string digits;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
        digits.push_back(text[i++]);
    if (letters.empty() || digits.empty() || i != text.size())
        throw MalformedAddress(text);

    int col = column_from_letters(letters);
    if (col == 0) throw MalformedAddress(text);
    if (digits.size() > 6) throw MalformedAddress(text); // avoid overflow
    int row = std::stoi(digits);
    if (!address_in_bounds(col, row)) throw MalformedAddress(text);
    return CellAddress{col, row};
}

std::string format_address(const CellAddress& addr) {
    return column_letters(addr.column) + std::to_string(addr.row);
}

} // namespace cellsleuth
