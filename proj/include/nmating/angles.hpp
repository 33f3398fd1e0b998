#pragma once
// Exact angle arithmetic on R/Z and the triadic coding machinery:
// words over {0,1,2}, the gluing relation generated by
//   0^inf ~ 2^inf,  w10^inf ~ w02^inf,  w20^inf ~ w12^inf,
// the base-3 evaluation theta, and itineraries of the tripling map
// with respect to the partition ]e/3,(e+1)/3[.
#include <gmpxx.h>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nmating {

class Angle {
public:
  Angle() : v_(0) {}
  Angle(long num, long den);
  explicit Angle(const mpq_class &v);

  static Angle parse(const std::string &s); // "p/q" or "p"
  std::string str() const;                  // canonical "p/q"
  const mpq_class &rat() const { return v_; }
  double to_double() const { return v_.get_d(); }

  Angle operator+(const Angle &o) const { return Angle(v_ + o.v_); }
  Angle operator-(const Angle &o) const { return Angle(v_ - o.v_); }
  Angle negated() const { return Angle(-v_); }
  Angle times(long k) const { return Angle(v_ * k); }
  Angle half() const { return Angle(v_ / 2); } // exact t/2 in [0,1)

  bool operator==(const Angle &o) const { return v_ == o.v_; }
  bool operator!=(const Angle &o) const { return v_ != o.v_; }
  bool operator<(const Angle &o) const { return v_ < o.v_; }

  bool is_zero() const { return v_ == 0; }
  // denominator == 3^m for some m >= 0
  bool is_triadic() const { return triadic_exponent() >= 0; }
  int triadic_exponent() const;
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }
  bool den_fits_ulong(unsigned long &num, unsigned long &den) const;
  size_t hash() const;

private:
  mpq_class v_; // canonical representative in [0,1)
  void normalize();
};

// Eventually periodic word over {0,1,2}: pre.per^inf, per nonempty.
struct TriadicWord {
  std::vector<uint8_t> pre, per;

  void canonicalize(); // shortest period, then shortest preperiod
  std::string str() const; // "pre|per", e.g. "01|2", "|0"
  static TriadicWord parse(const std::string &s);

  uint8_t digit(size_t i) const {
    return i < pre.size() ? pre[i] : per[(i - pre.size()) % per.size()];
  }
  std::vector<uint8_t> prefix(size_t n) const; // first n digits
  TriadicWord shifted() const;                 // drop leading digit
  bool eventually(uint8_t d) const { return per.size() == 1 && per[0] == d; }

  bool operator==(const TriadicWord &o) const {
    return pre == o.pre && per == o.per;
  }
  bool operator<(const TriadicWord &o) const;
};

// Equivalence class under the gluing relation: 1 word generically,
// 2 words when the tail is eventually constant 0 or 2.
struct ItinClass {
  std::vector<TriadicWord> words; // canonical, sorted, size 1 or 2
  bool contains(const TriadicWord &w) const;
  bool intersects(const ItinClass &o) const;
  bool operator==(const ItinClass &o) const { return words == o.words; }
  std::string str() const;
};

ItinClass class_of(TriadicWord w);

// For a glued pair {w10^inf, w02^inf} resp. {w20^inf, w12^inf} the landing
// point carries one further access whose class is [w01^inf] resp. [w21^inf]
// ({0^inf, 2^inf} pairs with [1^inf]); nullopt for singleton classes.
std::optional<ItinClass> companion_class(const ItinClass &c);

// theta(pre.per^inf) = sum digit_i / 3^(i+1) mod 1, exact.
Angle theta(const TriadicWord &w);

// Itinerary class of t under tripling. Triadic t yields the 2-word class
// built from the finite digit prefix ending on 1/3 or 2/3; other rationals
// yield the single eventually periodic word of the orbit.
ItinClass itinerary_of_angle(const Angle &t);

// Exact period of t under doubling when the reduced denominator is odd.
std::optional<long> doubling_period(const Angle &t);

} // namespace nmating

template <> struct std::hash<nmating::Angle> {
  size_t operator()(const nmating::Angle &a) const { return a.hash(); }
};
