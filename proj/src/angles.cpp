#include "nmating/angles.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace nmating {

void Angle::normalize() {
  v_.canonicalize();
  mpz_class n = v_.get_num(), d = v_.get_den();
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t()); // floor mod, r in [0,d)
  v_ = mpq_class(r, d);
  v_.canonicalize();
}

Angle::Angle(long num, long den) {
  if (den == 0) throw std::invalid_argument("angle with zero denominator");
  v_ = mpq_class(num, den);
  normalize();
}

Angle::Angle(const mpq_class &v) : v_(v) { normalize(); }

Angle Angle::parse(const std::string &s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      mpz_class n(s);
      return Angle(mpq_class(n));
    }
    mpz_class n(s.substr(0, slash)), d(s.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("zero denominator");
    return Angle(mpq_class(n, d));
  } catch (const std::invalid_argument &) {
    throw std::invalid_argument("malformed angle '" + s + "' (expected p/q)");
  }
}

std::string Angle::str() const {
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

int Angle::triadic_exponent() const {
  mpz_class d = v_.get_den();
  int m = 0;
  while (d > 1) {
    if (d % 3 != 0) return -1;
    d /= 3;
    ++m;
  }
  return m;
}

bool Angle::den_fits_ulong(unsigned long &num, unsigned long &den) const {
  if (!v_.get_den().fits_ulong_p() || !v_.get_num().fits_ulong_p()) return false;
  num = v_.get_num().get_ui();
  den = v_.get_den().get_ui();
  return true;
}

size_t Angle::hash() const {
  size_t h = 1469598103934665603ull;
  auto mix = [&h](const mpz_class &z) {
    size_t limbs = mpz_size(z.get_mpz_t());
    for (size_t i = 0; i < limbs; ++i) {
      h ^= static_cast<size_t>(mpz_getlimbn(z.get_mpz_t(), i));
      h *= 1099511628211ull;
    }
  };
  mix(v_.get_num());
  mix(v_.get_den());
  return h;
}

// ---------------------------------------------------------------- words

static bool is_periodic_with(const std::vector<uint8_t> &v, size_t d) {
  for (size_t i = d; i < v.size(); ++i)
    if (v[i] != v[i - d]) return false;
  return true;
}

void TriadicWord::canonicalize() {
  if (per.empty()) throw std::invalid_argument("word with empty period");
  for (uint8_t d : pre)
    if (d > 2) throw std::invalid_argument("digit out of range");
  for (uint8_t d : per)
    if (d > 2) throw std::invalid_argument("digit out of range");
  // shortest period
  for (size_t d = 1; d < per.size(); ++d)
    if (per.size() % d == 0 && is_periodic_with(per, d)) {
      per.resize(d);
      break;
    }
  // absorb preperiod digits into the cycle: u x (v x)^inf = u (x v)^inf
  while (!pre.empty() && pre.back() == per.back()) {
    per.insert(per.begin(), per.back());
    per.pop_back();
    pre.pop_back();
  }
}

std::string TriadicWord::str() const {
  std::string s;
  for (uint8_t d : pre) s.push_back(char('0' + d));
  s.push_back('|');
  for (uint8_t d : per) s.push_back(char('0' + d));
  return s;
}

TriadicWord TriadicWord::parse(const std::string &s) {
  auto bar = s.find('|');
  if (bar == std::string::npos)
    throw std::invalid_argument("malformed word '" + s + "' (expected pre|period)");
  TriadicWord w;
  auto digits = [&s](size_t from, size_t to, std::vector<uint8_t> &out) {
    for (size_t i = from; i < to; ++i) {
      if (s[i] < '0' || s[i] > '2')
        throw std::invalid_argument("malformed word '" + s + "': bad digit");
      out.push_back(uint8_t(s[i] - '0'));
    }
  };
  digits(0, bar, w.pre);
  digits(bar + 1, s.size(), w.per);
  if (w.per.empty())
    throw std::invalid_argument("malformed word '" + s + "': empty period");
  w.canonicalize();
  return w;
}

std::vector<uint8_t> TriadicWord::prefix(size_t n) const {
  std::vector<uint8_t> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = digit(i);
  return out;
}

TriadicWord TriadicWord::shifted() const {
  TriadicWord w;
  if (!pre.empty()) {
    w.pre.assign(pre.begin() + 1, pre.end());
    w.per = per;
  } else {
    w.per.assign(per.begin() + 1, per.end());
    w.per.push_back(per.front());
  }
  w.canonicalize();
  return w;
}

bool TriadicWord::operator<(const TriadicWord &o) const {
  if (pre != o.pre) return pre < o.pre;
  return per < o.per;
}

bool ItinClass::contains(const TriadicWord &w) const {
  return std::find(words.begin(), words.end(), w) != words.end();
}

bool ItinClass::intersects(const ItinClass &o) const {
  for (const auto &w : words)
    if (o.contains(w)) return true;
  return false;
}

std::string ItinClass::str() const {
  std::string s;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) s += " = ";
    s += words[i].str();
  }
  return s;
}

ItinClass class_of(TriadicWord w) {
  w.canonicalize();
  ItinClass c;
  c.words.push_back(w);
  if (w.eventually(0)) {
    TriadicWord p;
    p.per = {2};
    if (!w.pre.empty()) {
      p.pre = w.pre;
      p.pre.back() -= 1; // w10^inf ~ w02^inf, w20^inf ~ w12^inf
    }
    p.canonicalize();
    c.words.push_back(p);
  } else if (w.eventually(2)) {
    TriadicWord p;
    p.per = {0};
    if (!w.pre.empty()) {
      p.pre = w.pre;
      p.pre.back() += 1;
    }
    p.canonicalize();
    c.words.push_back(p);
  }
  std::sort(c.words.begin(), c.words.end());
  c.words.erase(std::unique(c.words.begin(), c.words.end()), c.words.end());
  return c;
}

Angle theta(const TriadicWord &w) {
  mpz_class P = 0;
  for (uint8_t d : w.pre) P = P * 3 + d;
  mpz_class Q = 0;
  for (uint8_t d : w.per) Q = Q * 3 + d;
  mpz_class pow_pre, pow_per;
  mpz_ui_pow_ui(pow_pre.get_mpz_t(), 3, w.pre.size());
  mpz_ui_pow_ui(pow_per.get_mpz_t(), 3, w.per.size());
  // (P (3^L - 1) + Q) / (3^|pre| (3^L - 1))
  mpq_class v(P * (pow_per - 1) + Q, pow_pre * (pow_per - 1));
  return Angle(v);
}

static ItinClass triadic_class(const std::vector<uint8_t> &prefix, bool at_one_third) {
  TriadicWord w1, w2;
  w1.pre = prefix;
  w2.pre = prefix;
  if (at_one_third) {
    w1.pre.push_back(1);
    w1.per = {0};
    w2.pre.push_back(0);
    w2.per = {2};
  } else {
    w1.pre.push_back(2);
    w1.per = {0};
    w2.pre.push_back(1);
    w2.per = {2};
  }
  w1.canonicalize();
  w2.canonicalize();
  ItinClass c;
  c.words = {w1, w2};
  std::sort(c.words.begin(), c.words.end());
  return c;
}

ItinClass itinerary_of_angle(const Angle &t) {
  int m = t.triadic_exponent();
  if (m == 0) { // t = 0
    TriadicWord a, b;
    a.per = {0};
    b.per = {2};
    ItinClass c;
    c.words = {a, b};
    return c;
  }
  if (m > 0) {
    // digits up to the step where 3^i t hits 1/3 or 2/3
    std::vector<uint8_t> prefix;
    mpq_class x = t.rat();
    for (int i = 0; i < m - 1; ++i) {
      mpq_class y = x * 3;
      uint8_t d = uint8_t(mpz_class(y.get_num() / y.get_den()).get_ui());
      prefix.push_back(d);
      x = y - d;
    }
    mpq_class last = x * 3; // now in {1, 2} after scaling: x is 1/3 or 2/3
    bool one_third = (last == 1);
    return triadic_class(prefix, one_third);
  }

  // non-triadic rational: orbit of tripling is eventually periodic and
  // never lands on a boundary point of the partition
  unsigned long num, den;
  std::vector<uint8_t> digits;
  long preperiod = -1, period = 0;
  if (t.den_fits_ulong(num, den) && den < (1ul << 40)) {
    std::unordered_map<unsigned long, long> seen;
    unsigned long p = num;
    for (long i = 0;; ++i) {
      auto it = seen.find(p);
      if (it != seen.end()) {
        preperiod = it->second;
        period = i - it->second;
        break;
      }
      seen.emplace(p, i);
      digits.push_back(uint8_t((3 * p) / den));
      p = (3 * p) % den;
    }
  } else {
    std::map<mpq_class, long> seen;
    mpq_class x = t.rat();
    for (long i = 0;; ++i) {
      auto it = seen.find(x);
      if (it != seen.end()) {
        preperiod = it->second;
        period = i - it->second;
        break;
      }
      seen.emplace(x, i);
      mpq_class y = x * 3;
      mpz_class fl = y.get_num() / y.get_den();
      digits.push_back(uint8_t(fl.get_ui()));
      x = y - mpq_class(fl);
    }
  }
  TriadicWord w;
  w.pre.assign(digits.begin(), digits.begin() + preperiod);
  w.per.assign(digits.begin() + preperiod, digits.begin() + preperiod + period);
  w.canonicalize();
  ItinClass c;
  c.words = {w};
  return c;
}

std::optional<ItinClass> companion_class(const ItinClass &c) {
  if (c.words.size() != 2) return std::nullopt;
  const TriadicWord *u = nullptr; // the eventually-0 member
  for (const auto &w : c.words)
    if (w.eventually(0)) u = &w;
  if (!u) return std::nullopt;
  TriadicWord comp;
  comp.per = {1};
  if (!u->pre.empty()) {
    comp.pre = u->pre;
    // glue digit 1 drops to 0 (third access between w10^inf and w02^inf);
    // glue digit 2 stays (between w20^inf and w12^inf)
    if (comp.pre.back() == 1) comp.pre.back() = 0;
  }
  comp.canonicalize();
  return class_of(comp);
}

std::optional<long> doubling_period(const Angle &t) {
  if (t.denominator() % 2 == 0) return std::nullopt;
  Angle s = t.times(2);
  long k = 1;
  while (s != t) {
    s = s.times(2);
    ++k;
  }
  return k;
}

} // namespace nmating
