#pragma once

#include <string>

#include <gmpxx.h>

namespace htpq {

// Exact dyadic rational num / 2^exp, canonical: num odd or zero (exp 0 when zero).
// Closed under +, -, * and multiplication by 2^-k; comparisons are exact.
class Dyadic {
  public:
    Dyadic() : num_(0), exp_(0) {}
    Dyadic(mpz_class num, unsigned long exp) : num_(std::move(num)), exp_(exp) { canonicalize(); }
    explicit Dyadic(const mpz_class& n) : num_(n), exp_(0) {}
    explicit Dyadic(long n) : num_(n), exp_(0) {}

    // Throws std::invalid_argument unless q's denominator is a power of two.
    static Dyadic from_mpq(const mpq_class& q);
    // 2^-k.
    static Dyadic half_pow(unsigned long k) { return Dyadic(mpz_class(1), k); }

    const mpz_class& num() const { return num_; }
    unsigned long exp() const { return exp_; }
    bool is_zero() const { return num_ == 0; }
    int sign() const { return sgn(num_); }

    mpq_class to_mpq() const;

    Dyadic operator-() const { return Dyadic(-num_, exp_); }
    Dyadic& operator+=(const Dyadic& o);
    Dyadic& operator-=(const Dyadic& o) { return *this += -o; }
    Dyadic& operator*=(const Dyadic& o);

    friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
    friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
    friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }

    // Three-way compare, exact: sign of (*this - o).
    int cmp(const Dyadic& o) const;
    int cmp(const mpq_class& q) const;

    friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.cmp(b) == 0; }
    friend bool operator!=(const Dyadic& a, const Dyadic& b) { return a.cmp(b) != 0; }
    friend bool operator<(const Dyadic& a, const Dyadic& b) { return a.cmp(b) < 0; }
    friend bool operator<=(const Dyadic& a, const Dyadic& b) { return a.cmp(b) <= 0; }
    friend bool operator>(const Dyadic& a, const Dyadic& b) { return a.cmp(b) > 0; }
    friend bool operator>=(const Dyadic& a, const Dyadic& b) { return a.cmp(b) >= 0; }

    // "n/2^k", or "n" when exp == 0.
    std::string str() const;
    // Accepts "n", "n/2^k", and "n/m" with m a power of two.  Throws
    // std::invalid_argument on anything else.
    static Dyadic parse(const std::string& s);

  private:
    void canonicalize();

    mpz_class num_;
    unsigned long exp_;
};

} // namespace htpq
