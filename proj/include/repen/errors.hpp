#pragma once

#include <stdexcept>
#include <string>

namespace repen {

// Model has an empty cell where a defined estimator is required.
struct undefined_model_error : std::runtime_error {
    explicit undefined_model_error(const std::string& what) : std::runtime_error(what) {}
};

// Every resampling draw emptied some cell, so the conditional average is empty.
struct degenerate_conditioning_error : std::runtime_error {
    explicit degenerate_conditioning_error(const std::string& what) : std::runtime_error(what) {}
};

// No model survived threshold filtering.
struct empty_family_error : std::runtime_error {
    explicit empty_family_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation not defined for this weight scheme.
struct unsupported_scheme_error : std::invalid_argument {
    explicit unsupported_scheme_error(const std::string& what) : std::invalid_argument(what) {}
};

// Selection path with no dimension jump.
struct degenerate_path_error : std::runtime_error {
    explicit degenerate_path_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace repen
