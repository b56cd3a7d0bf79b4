#pragma once

#include <stdexcept>
#include <string>

namespace hlppl {

/// Broad failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
    io,              // missing / unreadable / unwritable file
    parse,           // malformed input row
    validation,      // value violates a domain invariant
    insufficient_data,
    contract,        // caller broke a precondition (mismatched windows, bad config)
    domain,          // evaluation outside the model's domain (t >= t_c)
    degenerate,      // numerically undefined input (constant series, rank deficiency)
    fit_failure,
    feature_unavailable,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hlppl
