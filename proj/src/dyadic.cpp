#include "htpq/dyadic.hpp"

#include <stdexcept>

namespace htpq {

void Dyadic::canonicalize() {
    if (num_ == 0) {
        exp_ = 0;
        return;
    }
    // Strip common factors of two; scan_bit finds the lowest set bit.
    mp_bitcnt_t low = mpz_scan1(num_.get_mpz_t(), 0);
    if (low > exp_) low = exp_;
    if (low > 0) {
        mpz_tdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), low);
        exp_ -= low;
    }
}

Dyadic Dyadic::from_mpq(const mpq_class& q) {
    const mpz_class& den = q.get_den(); // mpq_class is always canonical, den > 0
    if (mpz_popcount(den.get_mpz_t()) != 1)
        throw std::invalid_argument("Dyadic::from_mpq: denominator is not a power of two");
    unsigned long k = mpz_scan1(den.get_mpz_t(), 0);
    return Dyadic(q.get_num(), k);
}

mpq_class Dyadic::to_mpq() const {
    mpz_class den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), exp_);
    mpq_class q(num_, den);
    q.canonicalize();
    return q;
}

Dyadic& Dyadic::operator+=(const Dyadic& o) {
    unsigned long k = std::max(exp_, o.exp_);
    mpz_class a = num_, b = o.num_;
    mpz_mul_2exp(a.get_mpz_t(), a.get_mpz_t(), k - exp_);
    mpz_mul_2exp(b.get_mpz_t(), b.get_mpz_t(), k - o.exp_);
    num_ = a + b;
    exp_ = k;
    canonicalize();
    return *this;
}

Dyadic& Dyadic::operator*=(const Dyadic& o) {
    num_ *= o.num_;
    exp_ += o.exp_;
    canonicalize();
    return *this;
}

int Dyadic::cmp(const Dyadic& o) const {
    // a/2^j vs b/2^k: compare a*2^(k-j') shifted to the common exponent.
    unsigned long k = std::max(exp_, o.exp_);
    mpz_class a = num_, b = o.num_;
    mpz_mul_2exp(a.get_mpz_t(), a.get_mpz_t(), k - exp_);
    mpz_mul_2exp(b.get_mpz_t(), b.get_mpz_t(), k - o.exp_);
    return ::cmp(a, b);
}

int Dyadic::cmp(const mpq_class& q) const {
    // num/2^e vs n/d (d > 0): compare num*d vs n*2^e.
    mpz_class lhs = num_ * q.get_den();
    mpz_class rhs = q.get_num();
    mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), exp_);
    return ::cmp(lhs, rhs);
}

std::string Dyadic::str() const {
    if (exp_ == 0) return num_.get_str();
    return num_.get_str() + "/2^" + std::to_string(exp_);
}

Dyadic Dyadic::parse(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Dyadic(mpz_class(s), 0);
        mpz_class num(s.substr(0, slash));
        std::string den = s.substr(slash + 1);
        if (den.rfind("2^", 0) == 0) {
            unsigned long k = std::stoul(den.substr(2));
            return Dyadic(num, k);
        }
        mpz_class d(den);
        if (d <= 0 || mpz_popcount(d.get_mpz_t()) != 1)
            throw std::invalid_argument("denominator not a power of two");
        return Dyadic(num, mpz_scan1(d.get_mpz_t(), 0));
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("Dyadic::parse: bad input '" + s + "'");
    }
}

} // namespace htpq
