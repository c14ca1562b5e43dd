#pragma once

#include <stdexcept>
#include <string>

namespace steersim {

// Base for everything thrown by the library. The CLI maps subtypes to
// process exit codes (validation 2, unsupported dimension 3, I/O 4).
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct not_prime : error {
    using error::error;
};
struct unsupported_size : error {
    using error::error;
};
struct division_by_zero : error {
    using error::error;
};
struct unsupported_dimension : error {
    using error::error;
};
struct size_overflow : error {
    using error::error;
};
struct bad_split : error {
    using error::error;
};
struct non_hermitian : error {
    using error::error;
};
struct invalid_state : error {
    using error::error;
};
struct bad_probability : error {
    using error::error;
};
struct degenerate_spectrum : error {
    using error::error;
};
struct dimension_mismatch : error {
    using error::error;
};
struct index_out_of_range : error {
    using error::error;
};
struct empty_table : error {
    using error::error;
};
struct singular_fit : error {
    using error::error;
};
struct config_error : error {
    using error::error;
};
struct io_error : error {
    using error::error;
};

}  // namespace steersim
