#pragma once

#include <stdexcept>
#include <string>

namespace paircomp {

/// Malformed or incomplete input data (bad CSV rows, missing pairs, ...).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration (bad alpha levels, unknown tags, bad scenario spec).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A requested analysis cannot be carried out on this input
/// (degenerate variance estimate, saturated model, enumeration budget).
class analysis_refusal : public std::runtime_error {
public:
    explicit analysis_refusal(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace paircomp
