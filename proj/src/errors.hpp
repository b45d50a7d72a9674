#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nqdeg {

enum class ErrorCode {
    domain,                // parameter outside its mathematical domain
    bounds,                // truncation / size cap exceeded
    truncation,            // coherent tail above tolerance
    parse,                 // state spec or JSON syntax
    arity,                 // single-mode vs bipartite mismatch
    config,                // grid / optimizer configuration invalid
    convergence,           // optimizer failed on every start
    undefined_statistic,   // Mandel q of a zero-mean-photon-number state
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(ErrorCode::parse, msg + " (at offset " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace nqdeg
