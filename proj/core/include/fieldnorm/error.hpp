#pragma once

#include <stdexcept>
#include <string>

namespace fieldnorm {

// Malformed or inconsistent input. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A row-level parse failure, carrying the 1-based line number.
class RowError : public InputError {
public:
    RowError(std::string path, std::size_t line, const std::string& what)
        : InputError(path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)), line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

// Violated precondition of a numeric routine.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace fieldnorm
