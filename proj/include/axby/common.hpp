#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace axby {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

// Error taxonomy. Everything derives from std::runtime_error so callers that
// only care about "it failed" can catch one type.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OverflowUnit : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CeilingExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FactorizationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroElement : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QuadratureNonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateForm : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientLadder : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.3.0";

// Neumaier compensated accumulator.
template <class T>
struct CompensatedSum {
    T sum = 0;
    T c = 0;
    void add(T x) {
        T t = sum + x;
        if ((sum < 0 ? -sum : sum) >= (x < 0 ? -x : x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    T value() const { return sum + c; }
};

}  // namespace axby
