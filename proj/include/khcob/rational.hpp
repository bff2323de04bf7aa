#pragma once
// Exact rationals over GMP.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <utility>

namespace khcob {

using Q = mpq_class;

inline Q qint(long v) { return Q(v); }

inline bool is_zero(const Q& x) { return sgn(x) == 0; }
inline bool is_unit(const Q& x) { return x == 1 || x == -1; }

// "num/den" with den omitted when 1.
inline std::string q_str(const Q& x) { return x.get_str(); }

inline std::pair<std::string, std::string> q_numden(const Q& x) {
    return {x.get_num().get_str(), x.get_den().get_str()};
}

inline Q q_from(const std::string& num, const std::string& den) {
    Q r{mpz_class(num), mpz_class(den)};
    r.canonicalize();
    return r;
}

inline Q q_parse(const std::string& s) {
    Q r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    r.canonicalize();
    return r;
}

}  // namespace khcob
