#pragma once

// Values of the form r*sqrt(s) with r, s rational and s >= 0, plus the shifted
// form c + r*sqrt(s). Only the closed operations needed by the constant chain
// are provided: square, comparison against rationals, product and ratio.

#include <cmath>
#include <compare>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "stabcert/rational.hpp"

namespace stabcert {

class QuadSurd {
 public:
  QuadSurd() : coeff_(0), radicand_(0) {}

  QuadSurd(Rational coeff, Rational radicand) : coeff_(std::move(coeff)), radicand_(std::move(radicand)) {
    if (radicand_.sign() < 0) throw std::domain_error("QuadSurd: negative radicand");
    if (auto root = exact_sqrt(radicand_); root && !radicand_.is_zero()) {
      coeff_ *= *root;
      radicand_ = Rational(1);
    }
    if (coeff_.is_zero() || radicand_.is_zero()) {
      coeff_ = Rational(0);
      radicand_ = Rational(0);
    }
  }

  static QuadSurd sqrt_of(const Rational& radicand) { return QuadSurd(Rational(1), radicand); }
  static QuadSurd from_rational(const Rational& r) { return QuadSurd(r, Rational(1)); }

  const Rational& coeff() const { return coeff_; }
  const Rational& radicand() const { return radicand_; }

  int sign() const { return coeff_.sign(); }

  /// coeff^2 * radicand, exactly.
  Rational square() const { return coeff_ * coeff_ * radicand_; }

  /// The value as a rational when the radicand is a perfect square.
  std::optional<Rational> as_rational() const {
    if (radicand_.is_zero()) return Rational(0);
    if (radicand_ == Rational(1)) return coeff_;
    return std::nullopt;
  }

  double to_double() const { return coeff_.to_double() * std::sqrt(radicand_.to_double()); }

  /// "r*sqrt(s)" with r, s in canonical "p/q" form.
  std::string str() const { return coeff_.str() + "*sqrt(" + radicand_.str() + ")"; }

  static QuadSurd parse(std::string_view text) {
    const auto star = text.find("*sqrt(");
    if (star == std::string_view::npos || text.empty() || text.back() != ')')
      throw std::invalid_argument("QuadSurd: cannot parse '" + std::string(text) + "'");
    const auto coeff = Rational::parse(text.substr(0, star));
    const auto inner = text.substr(star + 6, text.size() - star - 7);
    return QuadSurd(coeff, Rational::parse(inner));
  }

  QuadSurd operator-() const { return QuadSurd(-coeff_, radicand_); }

  friend QuadSurd operator*(const QuadSurd& x, const QuadSurd& y) {
    return QuadSurd(x.coeff_ * y.coeff_, x.radicand_ * y.radicand_);
  }
  friend QuadSurd operator*(const Rational& k, const QuadSurd& x) { return QuadSurd(k * x.coeff_, x.radicand_); }
  friend QuadSurd operator*(const QuadSurd& x, const Rational& k) { return k * x; }

  /// x / y; y must be nonzero. sqrt(s)/sqrt(t) = sqrt(s/t).
  friend QuadSurd operator/(const QuadSurd& x, const QuadSurd& y) {
    if (y.sign() == 0) throw std::domain_error("QuadSurd: division by zero");
    if (x.sign() == 0) return QuadSurd();
    return QuadSurd(x.coeff_ / y.coeff_, x.radicand_ / y.radicand_);
  }

  /// Value equality (sign and square agree).
  friend bool operator==(const QuadSurd& x, const QuadSurd& y) {
    return x.sign() == y.sign() && x.square() == y.square();
  }

  friend std::ostream& operator<<(std::ostream& os, const QuadSurd& x) { return os << x.str(); }

 private:
  Rational coeff_;
  Rational radicand_;
};

/// Exact ordering of x against a rational y using signs and squares only.
inline std::strong_ordering surd_compare(const QuadSurd& x, const Rational& y) {
  const int sx = x.sign();
  const int sy = y.sign();
  if (sx != sy) return sx < sy ? std::strong_ordering::less : std::strong_ordering::greater;
  if (sx == 0) return std::strong_ordering::equal;
  const auto by_square = x.square() <=> y * y;
  // Both negative: larger magnitude means smaller value.
  if (sx < 0) return 0 <=> by_square;
  return by_square;
}

inline std::strong_ordering surd_compare(const QuadSurd& x, const QuadSurd& y) {
  const int sx = x.sign();
  const int sy = y.sign();
  if (sx != sy) return sx < sy ? std::strong_ordering::less : std::strong_ordering::greater;
  if (sx == 0) return std::strong_ordering::equal;
  const auto by_square = x.square() <=> y.square();
  if (sx < 0) return 0 <=> by_square;
  return by_square;
}

/// Product of two surds, collapsed to a Rational when the radicand product is a square.
inline std::variant<Rational, QuadSurd> surd_product_identity(const QuadSurd& x, const QuadSurd& y) {
  const QuadSurd p = x * y;
  if (auto r = p.as_rational()) return *r;
  return p;
}

/// offset + surd, e.g. the interval endpoints delta -/+ sqrt(delta (delta - (n-2)/n)).
class ShiftedSurd {
 public:
  ShiftedSurd() = default;
  ShiftedSurd(Rational offset, QuadSurd surd) : offset_(std::move(offset)), surd_(std::move(surd)) {}

  const Rational& offset() const { return offset_; }
  const QuadSurd& surd() const { return surd_; }

  std::optional<Rational> as_rational() const {
    if (auto r = surd_.as_rational()) return offset_ + *r;
    return std::nullopt;
  }

  double to_double() const { return offset_.to_double() + surd_.to_double(); }

  std::string str() const { return offset_.str() + "+" + surd_.str(); }

  friend ShiftedSurd operator+(const ShiftedSurd& x, const Rational& k) { return {x.offset_ + k, x.surd_}; }
  friend ShiftedSurd operator*(const Rational& k, const ShiftedSurd& x) { return {k * x.offset_, k * x.surd_}; }

 private:
  Rational offset_;
  QuadSurd surd_;
};

inline std::strong_ordering surd_compare(const ShiftedSurd& x, const Rational& y) {
  return surd_compare(x.surd(), y - x.offset());
}

/// Exact ordering of (x.offset + x.surd) against (y.offset + y.surd): the
/// difference of surds is compared with the offset gap by sign and squaring.
inline std::strong_ordering surd_compare(const ShiftedSurd& x, const ShiftedSurd& y) {
  const QuadSurd& s = x.surd();
  const QuadSurd& t = y.surd();
  const Rational d = y.offset() - x.offset();
  // sign of f = s - t against sign of d
  const auto st = surd_compare(s, t);
  const int sf = st < 0 ? -1 : (st > 0 ? 1 : 0);
  const int sd = d.sign();
  if (sf != sd) return sf < sd ? std::strong_ordering::less : std::strong_ordering::greater;
  if (sf == 0) return std::strong_ordering::equal;
  // f^2 - d^2 = (s^2 + t^2 - d^2) - 2st
  const Rational K = s.square() + t.square() - d * d;
  const auto by_square = 0 <=> surd_compare(Rational(2) * (s * t), K);
  if (sf < 0) return 0 <=> by_square;
  return by_square;
}

}  // namespace stabcert
