#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace autogowers {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

inline double to_double(const BigRat& q) {
  return static_cast<double>(boost::multiprecision::numerator(q)) /
         static_cast<double>(boost::multiprecision::denominator(q));
}

/// Output value of an automaton: tagged int / rational / complex.
/// Arithmetic stays exact (rational) unless a complex operand appears.
struct Value {
  enum class Kind { Int, Rat, Cplx };
  Kind kind = Kind::Int;
  BigRat q;    // valid for Int and Rat
  Complex z;   // valid for Cplx

  Value() : q(0) {}
  static Value integer(BigInt n) {
    Value v;
    v.kind = Kind::Int;
    v.q = BigRat(std::move(n));
    return v;
  }
  static Value rational(BigRat r) {
    Value v;
    v.kind = Kind::Rat;
    v.q = std::move(r);
    return v;
  }
  static Value complex(Complex c) {
    Value v;
    v.kind = Kind::Cplx;
    v.z = c;
    return v;
  }

  bool is_exact() const { return kind != Kind::Cplx; }

  Complex to_complex() const {
    if (kind == Kind::Cplx) return z;
    return Complex(to_double(q), 0.0);
  }

  BigRat to_rational() const {
    if (kind == Kind::Cplx) throw std::logic_error("complex value is not rational");
    return q;
  }

  friend Value operator+(const Value& a, const Value& b) {
    if (a.kind == Kind::Cplx || b.kind == Kind::Cplx)
      return complex(a.to_complex() + b.to_complex());
    Value v;
    v.q = a.q + b.q;
    v.kind = (a.kind == Kind::Int && b.kind == Kind::Int) ? Kind::Int : Kind::Rat;
    return v;
  }
  friend Value operator-(const Value& a, const Value& b) {
    if (a.kind == Kind::Cplx || b.kind == Kind::Cplx)
      return complex(a.to_complex() - b.to_complex());
    Value v;
    v.q = a.q - b.q;
    v.kind = (a.kind == Kind::Int && b.kind == Kind::Int) ? Kind::Int : Kind::Rat;
    return v;
  }
  friend Value operator*(const Value& a, const Value& b) {
    if (a.kind == Kind::Cplx || b.kind == Kind::Cplx)
      return complex(a.to_complex() * b.to_complex());
    Value v;
    v.q = a.q * b.q;
    v.kind = (a.kind == Kind::Int && b.kind == Kind::Int) ? Kind::Int : Kind::Rat;
    return v;
  }

  // exact comparison by tag; complex values compare bitwise here, tests use
  // tolerance via to_complex when they need it
  friend bool operator==(const Value& a, const Value& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Kind::Cplx) return a.z == b.z;
    return a.q == b.q;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  friend bool operator<(const Value& a, const Value& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    if (a.kind == Kind::Cplx) {
      if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
      return a.z.imag() < b.z.imag();
    }
    return a.q < b.q;
  }

  std::string str() const {
    switch (kind) {
      case Kind::Int:
        return "int:" + boost::multiprecision::numerator(q).str();
      case Kind::Rat:
        return "rat:" + boost::multiprecision::numerator(q).str() + "/" +
               boost::multiprecision::denominator(q).str();
      case Kind::Cplx: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "cplx:%.17g,%.17g", z.real(), z.imag());
        return buf;
      }
    }
    return {};
  }

  /// Parses the `int:<n>` / `rat:<p>/<q>` / `cplx:<re>,<im>` format.
  static Value parse(const std::string& s) {
    auto fail = [&] { throw std::runtime_error("bad value literal: " + s); };
    if (s.rfind("int:", 0) == 0) {
      return integer(BigInt(s.substr(4)));
    }
    if (s.rfind("rat:", 0) == 0) {
      auto body = s.substr(4);
      auto slash = body.find('/');
      if (slash == std::string::npos) fail();
      BigInt p(body.substr(0, slash)), den(body.substr(slash + 1));
      if (den == 0) fail();
      return rational(BigRat(p, den));
    }
    if (s.rfind("cplx:", 0) == 0) {
      auto body = s.substr(5);
      auto comma = body.find(',');
      if (comma == std::string::npos) fail();
      return complex(Complex(std::stod(body.substr(0, comma)), std::stod(body.substr(comma + 1))));
    }
    fail();
    return {};
  }
};

}  // namespace autogowers
