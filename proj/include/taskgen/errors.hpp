#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taskgen {

// Base of every error the engine raises. Callers that only need a message can
// catch this; the subclasses carry the structured payload.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CsvError : public Error {
public:
    CsvError(std::size_t line, const std::string& what)
        : Error("csv line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class MissingColumn : public Error {
public:
    explicit MissingColumn(std::string column)
        : Error("missing column: " + column), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class NoTimeColumn : public Error {
public:
    NoTimeColumn() : Error("no time column") {}
};

class EmptyDataset : public Error {
public:
    EmptyDataset() : Error("dataset has no parseable rows") {}
};

class UnknownAttribute : public Error {
public:
    explicit UnknownAttribute(std::string name)
        : Error("unknown attribute: " + name), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, std::string expected)
        : Error("petel:" + std::to_string(line) + ":" + std::to_string(column) +
                ": expected " + expected),
          line_(line), column_(column), expected_(std::move(expected)) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string expected_;
};

class UnknownOperator : public Error {
public:
    explicit UnknownOperator(std::string name)
        : Error("unknown operator: " + name), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class InvalidTask : public Error {
public:
    using Error::Error;
};

class NoEntityAttribute : public Error {
public:
    NoEntityAttribute() : Error("schema has no entity attribute") {}
};

class NoDataForAttribute : public Error {
public:
    explicit NoDataForAttribute(const std::string& name)
        : Error("no present values for attribute: " + name) {}
};

class WindowExceedsSpan : public Error {
public:
    WindowExceedsSpan() : Error("lead + window exceeds the dataset time span") {}
};

class UnresolvedThreshold : public Error {
public:
    UnresolvedThreshold() : Error("filter threshold is unresolved") {}
};

class EmptyTrainingSet : public Error {
public:
    EmptyTrainingSet() : Error("training set is empty") {}
};

class LabelTypeMismatch : public Error {
public:
    using Error::Error;
};

class MissingMetrics : public Error {
public:
    MissingMetrics() : Error("task features carry no post-evaluation metrics") {}
};

class VersionError : public Error {
public:
    using Error::Error;
};

class CorruptBlob : public Error {
public:
    using Error::Error;
};

} // namespace taskgen
