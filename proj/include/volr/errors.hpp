#pragma once

#include <stdexcept>
#include <string>

namespace volr {

struct Unsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotInterior : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularMap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateAcceptance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionTooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline void require_dim(int expected, int got, const char* where) {
    if (expected != got)
        throw DimensionMismatch(std::string(where) + ": dimension mismatch (" +
                                std::to_string(expected) + " vs " + std::to_string(got) + ")");
}

}  // namespace volr
