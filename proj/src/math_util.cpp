#include "math_util.hpp"

#include <array>
#include <stdexcept>

namespace nqdeg {

namespace {

constexpr int kTableSize = 1025;

std::array<double, kTableSize> build_log_factorial_table() {
    std::array<double, kTableSize> t{};
    t[0] = 0.0;
    for (int n = 1; n < kTableSize; ++n) t[n] = t[n - 1] + std::log(static_cast<double>(n));
    return t;
}

}  // namespace

double log_factorial(int n) {
    static const std::array<double, kTableSize> table = build_log_factorial_table();
    if (n < 0 || n >= kTableSize) throw std::out_of_range("log_factorial: index out of table range");
    return table[static_cast<std::size_t>(n)];
}

}  // namespace nqdeg
