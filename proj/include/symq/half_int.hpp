#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace symq {

// Exact half-integer spin value, stored as twice its value.
// HalfInt::from_twice(3) is 3/2; HalfInt(2) is the integer 2.
class HalfInt {
public:
  HalfInt() : twice_(0) {}
  explicit HalfInt(int whole) : twice_(2 * whole) {}

  static HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  int twice() const { return twice_; }
  double value() const { return 0.5 * twice_; }
  bool is_integer() const { return twice_ % 2 == 0; }

  // Number of m-values in a spin-j multiplet, 2j+1.
  int multiplet_dim() const { return twice_ + 1; }

  HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
  HalfInt operator-() const { return from_twice(-twice_); }
  HalfInt operator*(int n) const { return from_twice(twice_ * n); }

  bool operator==(HalfInt o) const { return twice_ == o.twice_; }
  bool operator!=(HalfInt o) const { return twice_ != o.twice_; }
  bool operator<(HalfInt o) const { return twice_ < o.twice_; }
  bool operator<=(HalfInt o) const { return twice_ <= o.twice_; }
  bool operator>(HalfInt o) const { return twice_ > o.twice_; }
  bool operator>=(HalfInt o) const { return twice_ >= o.twice_; }

  // Accepts "3/2", "1.5" and "2"; anything else throws std::invalid_argument.
  static HalfInt parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty spin value");
    std::size_t slash = text.find('/');
    try {
      if (slash != std::string::npos) {
        int num = std::stoi(text.substr(0, slash));
        int den = std::stoi(text.substr(slash + 1));
        if (den == 2) return from_twice(num);
        if (den == 1) return HalfInt(num);
        throw std::invalid_argument("spin denominator must be 1 or 2: " + text);
      }
      std::size_t pos = 0;
      double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("trailing characters in spin value: " + text);
      double tw = 2.0 * v;
      double rounded = std::round(tw);
      if (std::abs(tw - rounded) > 1e-9)
        throw std::invalid_argument("spin must be a half-integer: " + text);
      return from_twice(static_cast<int>(rounded));
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("spin value out of range: " + text);
    }
  }

  std::string str() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

private:
  int twice_;
};

inline HalfInt operator*(int n, HalfInt h) { return h * n; }

}  // namespace symq
