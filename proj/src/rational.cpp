#include "qjump/rational.hpp"

#include "qjump/errors.hpp"

namespace qjump {

mpq_class rational_from_string(std::string_view text) {
    if (text.empty()) throw DomainError("rational: empty string");
    std::string s(text);
    bool neg = false;
    std::size_t pos = 0;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        pos = 1;
    }
    auto all_digits = [](std::string_view v) {
        if (v.empty()) return false;
        for (char c : v)
            if (c < '0' || c > '9') return false;
        return true;
    };
    std::string body = s.substr(pos);
    mpq_class result;
    auto slash = body.find('/');
    auto dot = body.find('.');
    if (slash != std::string::npos) {
        std::string num = body.substr(0, slash);
        std::string den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw DomainError("rational: malformed fraction '" + s + "'");
        result = mpq_class(mpz_class(num), mpz_class(den));
        if (result.get_den() == 0) throw DomainError("rational: zero denominator");
        result.canonicalize();
    } else if (dot != std::string::npos) {
        std::string whole = body.substr(0, dot);
        std::string frac = body.substr(dot + 1);
        if (whole.empty()) whole = "0";
        if (!all_digits(whole) || !all_digits(frac))
            throw DomainError("rational: malformed decimal '" + s + "'");
        mpz_class den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        mpz_class num = mpz_class(whole) * den + (frac.empty() ? mpz_class(0) : mpz_class(frac));
        result = mpq_class(num, den);
        result.canonicalize();
    } else {
        if (!all_digits(body))
            throw DomainError("rational: malformed number '" + s + "'");
        result = mpq_class(mpz_class(body));
    }
    if (neg) result = -result;
    return result;
}

std::string rational_to_string(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

} // namespace qjump
