#include "htpq/poly.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace htpq {

IntPoly IntPoly::constant(mpz_class c) {
    IntPoly p;
    if (c != 0) p.terms_.emplace(Monomial{}, std::move(c));
    return p;
}

IntPoly IntPoly::variable(unsigned id) {
    IntPoly p;
    p.terms_.emplace(Monomial{{id, 1}}, mpz_class(1));
    return p;
}

std::set<unsigned> IntPoly::used_vars() const {
    std::set<unsigned> out;
    for (const auto& [m, c] : terms_)
        for (const auto& [v, e] : m) out.insert(v);
    return out;
}

void IntPoly::add_term(const Monomial& m, const mpz_class& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        if (c != 0) terms_.emplace(m, c);
        return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

IntPoly IntPoly::operator-() const {
    IntPoly out;
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
    return out;
}

IntPoly& IntPoly::operator+=(const IntPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

IntPoly& IntPoly::operator-=(const IntPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

namespace {

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i, ++j;
        }
    }
    return out;
}

} // namespace

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    IntPoly out;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) out.add_term(mono_mul(ma, mb), ca * cb);
    return out;
}

IntPoly IntPoly::pow(unsigned e) const {
    IntPoly out = constant(1);
    IntPoly base = *this;
    while (e > 0) {
        if (e & 1u) out = out * base;
        e >>= 1u;
        if (e > 0) base = base * base;
    }
    return out;
}

IntPoly IntPoly::shift_vars(unsigned offset) const {
    IntPoly out;
    for (const auto& [m, c] : terms_) {
        Monomial sm = m;
        for (auto& [v, e] : sm) v += offset;
        out.terms_.emplace(std::move(sm), c);
    }
    return out;
}

mpq_class IntPoly::eval(const std::vector<mpq_class>& values) const {
    mpq_class acc = 0;
    for (const auto& [m, c] : terms_) {
        mpq_class term(c);
        for (const auto& [v, e] : m) {
            if (v >= values.size())
                throw std::invalid_argument("IntPoly::eval: no value for variable x" +
                                            std::to_string(v));
            mpq_class pw;
            mpz_pow_ui(mpq_numref(pw.get_mpq_t()), mpq_numref(values[v].get_mpq_t()), e);
            mpz_pow_ui(mpq_denref(pw.get_mpq_t()), mpq_denref(values[v].get_mpq_t()), e);
            term *= pw; // pw is canonical: num/den of a canonical mpq stay coprime under powers
        }
        acc += term;
    }
    return acc;
}

std::string IntPoly::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    // Reverse map order: descending lexicographic monomials, constant term last.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!out.empty()) out += " + ";
        out += it->second.get_str();
        for (const auto& [v, e] : it->first)
            out += "*x" + std::to_string(v) + "^" + std::to_string(e);
    }
    return out;
}

namespace {

void parse_var_factor(const std::string& f, Monomial& mono) {
    auto caret = f.find('^');
    std::string var = f.substr(1, caret == std::string::npos ? std::string::npos : caret - 1);
    if (var.empty() || var.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("IntPoly::parse: bad variable '" + f + "'");
    unsigned id = static_cast<unsigned>(std::stoul(var));
    unsigned e = 1;
    if (caret != std::string::npos) {
        std::string es = f.substr(caret + 1);
        if (es.empty() || es.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("IntPoly::parse: bad exponent '" + f + "'");
        e = static_cast<unsigned>(std::stoul(es));
    }
    if (e == 0) return; // x^0 contributes nothing
    for (auto& [v, ee] : mono)
        if (v == id) {
            ee += e;
            return;
        }
    mono.emplace_back(id, e);
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

IntPoly IntPoly::parse(const std::string& s) {
    std::string body = strip(s);
    if (body.empty()) throw std::invalid_argument("IntPoly::parse: empty input");
    if (body == "0") return IntPoly();
    IntPoly out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        auto plus = body.find('+', pos);
        std::string term = strip(plus == std::string::npos ? body.substr(pos)
                                                           : body.substr(pos, plus - pos));
        if (term.empty()) throw std::invalid_argument("IntPoly::parse: empty term");
        mpz_class coef = 1;
        Monomial mono;
        std::size_t fpos = 0;
        bool saw_coef = false;
        while (fpos <= term.size()) {
            auto star = term.find('*', fpos);
            std::string factor = strip(star == std::string::npos ? term.substr(fpos)
                                                                 : term.substr(fpos, star - fpos));
            if (factor.empty()) throw std::invalid_argument("IntPoly::parse: empty factor");
            if (factor[0] == 'x') {
                parse_var_factor(factor, mono);
            } else {
                if (saw_coef) throw std::invalid_argument("IntPoly::parse: two coefficients");
                mpz_class c;
                if (mpz_set_str(c.get_mpz_t(), factor.c_str(), 10) != 0)
                    throw std::invalid_argument("IntPoly::parse: bad coefficient '" + factor +
                                                "'");
                coef *= c;
                saw_coef = true;
            }
            if (star == std::string::npos) break;
            fpos = star + 1;
        }
        std::sort(mono.begin(), mono.end());
        out.add_term(mono, coef);
        if (plus == std::string::npos) break;
        pos = plus + 1;
    }
    return out;
}

} // namespace htpq
