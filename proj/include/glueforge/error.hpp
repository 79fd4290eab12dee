#pragma once

#include <stdexcept>
#include <string>

namespace glueforge {

enum class ErrorKind {
    parse,             // malformed input text
    invariant,         // a data-model invariant does not hold
    domain,            // operation called outside its domain
    backend_mismatch,  // markings from different surface backends
    unsupported,       // capability the chosen backend does not provide
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace glueforge
