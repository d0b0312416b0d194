#ifndef CELLSLEUTH_ERRORS_HPP
#define CELLSLEUTH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cellsleuth {

// Base for all toolkit errors; the CLI maps any of these to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class MalformedAddress : public Error {
public:
    explicit MalformedAddress(const std::string& text)
        : Error("malformed cell address: '" + text + "'") {}
};

// Formula text failed to parse; carries the character offset into the text.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t offset)
        : Error(msg + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// A structurally invalid workbook document (AWF or manifest).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

// A cell formula failed to parse during load; names the cell.
class FormulaError : public Error {
public:
    FormulaError(const std::string& sheet, const std::string& address, const std::string& msg)
        : Error(sheet + "!" + address + ": " + msg), sheet_(sheet), address_(address) {}
    const std::string& sheet() const { return sheet_; }
    const std::string& address() const { return address_; }

private:
    std::string sheet_;
    std::string address_;
};

class OutOfBounds : public Error {
public:
    explicit OutOfBounds(const std::string& msg) : Error(msg) {}
};

class UnresolvedName : public Error {
public:
    explicit UnresolvedName(const std::string& name)
        : Error("name '" + name + "' has no entry in the workbook names table") {}
};

class UnknownSheet : public Error {
public:
    explicit UnknownSheet(const std::string& name)
        : Error("no sheet named '" + name + "'") {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class ParamError : public Error {
public:
    explicit ParamError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

class ManifestMismatch : public Error {
public:
    explicit ManifestMismatch(const std::string& msg) : Error(msg) {}
};

class VectorLength : public Error {
public:
    explicit VectorLength(const std::string& msg) : Error(msg) {}
};

} // namespace cellsleuth

#endif
