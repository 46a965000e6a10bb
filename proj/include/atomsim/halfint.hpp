#pragma once

#include <cmath>
#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace atomsim {

// Angular-momentum quantum number stored exactly as twice its value, so
// selection-rule checks (m' == m + q, triangle rules) are integer
// comparisons and never depend on floating-point rounding.
class HalfInt {
  public:
    constexpr HalfInt() : twice_(0) {}
    constexpr HalfInt(int n) : twice_(2 * n) {}  // whole integers convert implicitly

    static constexpr HalfInt from_twice(int twice) {
        HalfInt h;
        h.twice_ = twice;
        return h;
    }

    static HalfInt from_double(double x) {
        const double t = 2.0 * x;
        const double r = std::round(t);
        if (std::abs(t - r) > 1e-9)
            throw std::invalid_argument("not a half-integer: " + std::to_string(x));
        return from_twice(static_cast<int>(r));
    }

    constexpr int twice() const { return twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    constexpr double value() const { return 0.5 * twice_; }

    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return from_twice(a.twice_ + b.twice_); }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return from_twice(a.twice_ - b.twice_); }
    constexpr HalfInt operator-() const { return from_twice(-twice_); }
    friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

  private:
    int twice_;
};

constexpr HalfInt abs(HalfInt h) { return HalfInt::from_twice(h.twice() < 0 ? -h.twice() : h.twice()); }

// half(3) == 3/2
constexpr HalfInt half(int twice) { return HalfInt::from_twice(twice); }

} // namespace atomsim
