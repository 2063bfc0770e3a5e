#ifndef HESSFORMS_ERRORS_HPP
#define HESSFORMS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hessforms {

// Malformed form text, mixed degrees, zero form, bad variable index.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An enumeration would exceed the configured point budget.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hessforms

#endif
