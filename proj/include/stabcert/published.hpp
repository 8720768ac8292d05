#pragma once

// Reference parameter rows and quoted constants, stored as data.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "stabcert/rational.hpp"

namespace stabcert::published {

struct Row {
  int n;
  Rational a, b, alpha, beta;
};

struct Quoted {
  int n;
  Rational delta0;
  Rational epsilon;
  Rational L;
  Rational gamma0;
  Rational delta1;
};

inline bool has_row(int n) { return n >= 3 && n <= 5; }

inline Row row(int n) {
  switch (n) {
    case 3: return {3, Rational(10, 11), Rational(30, 11), Rational(18, 11), Rational(3, 2)};
    case 4: return {4, Rational(24, 25), Rational(48, 25), Rational(51, 50), Rational(5, 4)};
    case 5: return {5, Rational(10, 11), Rational(20, 21), Rational(31, 40), Rational(207, 250)};
    default: throw std::out_of_range("no published row for n = " + std::to_string(n));
  }
}

inline Quoted quoted(int n) {
  switch (n) {
    case 3:
      return {3, Rational(1, 3), Rational(9, 11), Rational(71, 11), Rational(77, 142), Rational(3, 8)};
    case 4:
      return {4, Rational(1, 2), Rational(377, 5260), Rational(189697, 206625), Rational(276875, 569091),
              Rational(2, 3)};
    case 5:
      return {5, Rational(21, 22), Rational(979826999LL, 65363627000LL), Rational(106986857LL, 251572482LL),
              Rational(667989LL, 855894856LL), Rational(21, 22)};
    default: throw std::out_of_range("no quoted constants for n = " + std::to_string(n));
  }
}

inline constexpr std::array<int, 3> kRows{3, 4, 5};

}  // namespace stabcert::published
