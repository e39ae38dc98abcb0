#pragma once

#include <gmpxx.h>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace contract_forge {

// Exact rational number. All solver arithmetic runs on these; floating
// point appears only in test oracles.
using Rat = mpq_class;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Accepts "3", "-3", "p/q", and decimal strings like "0.5" or "-2.25".
// No exponents, no whitespace.
Rat parse_rational(const std::string& text);

// Canonical form: "p" when the denominator is 1, otherwise "p/q" in
// lowest terms.
std::string to_string(const Rat& value);

std::vector<Rat> parse_rational_list(std::span<const std::string> texts);

inline Rat rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

}  // namespace contract_forge
