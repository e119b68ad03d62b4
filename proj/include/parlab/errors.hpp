#pragma once

#include <stdexcept>
#include <string>

namespace parlab {

// Thrown when an exhaustive computation would exceed its configured cap.
// Exceeding a cap is an error, never silent sampling.
struct cap_exceeded : std::runtime_error {
    explicit cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

// Malformed external input (files, labels, distributions that do not sum to 1, ...).
struct input_error : std::runtime_error {
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// The increment step needs a pseudorandomness failure to work with; thrown
// when the search finds none at the tested parameters.
struct no_certificate_error : std::runtime_error {
    explicit no_certificate_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace parlab
