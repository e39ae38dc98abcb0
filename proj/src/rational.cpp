#include "contract_forge/rational.hpp"

#include <cctype>

namespace contract_forge {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

Rat parse_rational(const std::string& text) {
    if (text.empty()) throw ParseError("empty rational literal");
    std::string body = text;
    bool negative = false;
    if (body[0] == '+' || body[0] == '-') {
        negative = body[0] == '-';
        body = body.substr(1);
    }
    if (body.empty()) throw ParseError("sign without digits: '" + text + "'");

    Rat value;
    auto slash = body.find('/');
    auto dot = body.find('.');
    if (slash != std::string::npos) {
        std::string num = body.substr(0, slash);
        std::string den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) {
            throw ParseError("malformed fraction: '" + text + "'");
        }
        mpz_class num_z(num, 10), den_z(den, 10);
        if (den_z == 0) throw ParseError("zero denominator: '" + text + "'");
        Rat q(num_z, den_z);
        q.canonicalize();
        value = q;
    } else if (dot != std::string::npos) {
        std::string whole = body.substr(0, dot);
        std::string frac = body.substr(dot + 1);
        if (whole.empty() && frac.empty()) {
            throw ParseError("malformed decimal: '" + text + "'");
        }
        if (whole.empty()) whole = "0";
        if (frac.empty()) frac = "0";
        if (!all_digits(whole) || !all_digits(frac)) {
            throw ParseError("malformed decimal: '" + text + "'");
        }
        mpz_class scale = 1;
        for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
        mpz_class whole_z(whole, 10), frac_z(frac, 10);
        Rat q(whole_z * scale + frac_z, scale);
        q.canonicalize();
        value = q;
    } else {
        if (!all_digits(body)) throw ParseError("malformed integer: '" + text + "'");
        value = Rat(mpz_class(body, 10));
    }
    if (negative) value = -value;
    return value;
}

std::string to_string(const Rat& value) {
    return value.get_str();
}

std::vector<Rat> parse_rational_list(std::span<const std::string> texts) {
    std::vector<Rat> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(parse_rational(t));
    return out;
}

}  // namespace contract_forge
