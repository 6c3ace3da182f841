#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chasekit {

struct SourceSpan {
    std::size_t line = 1;   // 1-based
    std::size_t column = 1; // 1-based, in bytes
    std::size_t offset = 0;
    std::size_t length = 0;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// text-io failures, always positioned
class ParseError : public Error {
public:
    ParseError(const std::string& msg, SourceSpan span) : Error(msg), span_(span) {}
    const SourceSpan& span() const { return span_; }

private:
    SourceSpan span_;
};

// malformed values built through the API
class ValidationError : public Error {
public:
    using Error::Error;
};

class UnknownRelation : public Error {
public:
    explicit UnknownRelation(const std::string& rel) : Error("unknown relation '" + rel + "'") {}
};

class NoTupleId : public Error {
public:
    explicit NoTupleId(const std::string& rel) : Error("relation '" + rel + "' has no tuple id position") {}
};

class HeadArityMismatch : public Error {
public:
    HeadArityMismatch(std::size_t a, std::size_t b)
        : Error("head arities differ (" + std::to_string(a) + " vs " + std::to_string(b) + ")") {}
};

class NonSetDatabase : public Error {
public:
    explicit NonSetDatabase(const std::string& rel)
        : Error("database is not set valued (relation '" + rel + "' has a repeated tuple)") {}
};

class NotApplicable : public Error {
public:
    using Error::Error;
};

class ChaseFailure : public Error {
public:
    using Error::Error;
};

class ResourceBound : public Error {
public:
    using Error::Error;
};

class HypothesesNotMet : public Error {
public:
    using Error::Error;
};

class IncompatibleAggregates : public Error {
public:
    using Error::Error;
};

} // namespace chasekit
