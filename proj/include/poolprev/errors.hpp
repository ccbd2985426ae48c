#pragma once

#include <stdexcept>
#include <string>

namespace poolprev {

/// Invalid request or inconsistent inputs (CLI exit code 2).
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Arithmetic precision was insufficient for a reliable result (CLI exit code 3).
class precision_error : public std::runtime_error {
public:
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

/// File or stream failure (CLI exit code 4).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// Posterior moments admit no beta distribution with the same mean and variance.
class infeasible_fit_error : public std::domain_error {
public:
    explicit infeasible_fit_error(const std::string& what) : std::domain_error(what) {}
};

/// Requested expansion exceeds the configured term budget.
class term_budget_error : public validation_error {
public:
    explicit term_budget_error(const std::string& what) : validation_error(what) {}
};

} // namespace poolprev
