#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace htpq {

// Exponent vector, sorted by variable id, all exponents positive.
// The empty monomial is the constant term.
using Monomial = std::vector<std::pair<unsigned, unsigned>>;

// Sparse multivariate integer polynomial.  No zero coefficients are stored.
class IntPoly {
  public:
    IntPoly() = default;

    static IntPoly constant(mpz_class c);
    static IntPoly variable(unsigned id);

    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::map<Monomial, mpz_class>& terms() const { return terms_; }
    std::set<unsigned> used_vars() const;

    IntPoly operator-() const;
    IntPoly& operator+=(const IntPoly& o);
    IntPoly& operator-=(const IntPoly& o);
    friend IntPoly operator+(IntPoly a, const IntPoly& b) { return a += b; }
    friend IntPoly operator-(IntPoly a, const IntPoly& b) { return a -= b; }
    friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
    IntPoly pow(unsigned e) const;

    friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const IntPoly& a, const IntPoly& b) { return !(a == b); }

    // Renames every variable i to i + offset.
    IntPoly shift_vars(unsigned offset) const;

    // Exact evaluation; values[i] is the value of variable i.  Throws
    // std::invalid_argument when a used variable has no value.
    mpq_class eval(const std::vector<mpq_class>& values) const;

    // Sum of terms "c*x<i>^<e>*...", joined by " + ", monomials in descending
    // lexicographic order, coefficient and exponents always explicit; "0" for
    // the zero polynomial.  parse() accepts this form plus implicit
    // coefficient 1 and implicit exponent 1; round-trips exactly.
    std::string str() const;
    static IntPoly parse(const std::string& s);

  private:
    void add_term(const Monomial& m, const mpz_class& c);

    std::map<Monomial, mpz_class> terms_;
};

} // namespace htpq
