#pragma once

#include <stdexcept>
#include <string>

namespace lapbounds {

struct not_positive_definite : std::runtime_error {
    explicit not_positive_definite(const std::string& what) : std::runtime_error(what) {}
};

struct delta_nonpositive : std::runtime_error {
    delta_nonpositive(const std::string& what, double eta_max_feasible)
        : std::runtime_error(what), eta_max(eta_max_feasible) {}
    double eta_max;  // largest ball-size parameter for which the gap stays positive
};

struct no_convergence : std::runtime_error {
    explicit no_convergence(const std::string& what) : std::runtime_error(what) {}
};

struct dimension_too_large : std::runtime_error {
    explicit dimension_too_large(const std::string& what) : std::runtime_error(what) {}
};

struct unreachable_threshold : std::runtime_error {
    explicit unreachable_threshold(const std::string& what) : std::runtime_error(what) {}
};

struct invalid_input : std::runtime_error {
    explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lapbounds
