#include "modering.hpp"

namespace qlax {

const char* family_prefix(Family f) {
    switch (f) {
        case Family::T: return "t";
        case Family::Lam: return "lam";
        case Family::U: return "u";
        case Family::V: return "v";
        case Family::A: return "a";
        case Family::P: return "p";
    }
    return "?";
}

Mono Mono::operator*(const Mono& o) const {
    Mono r;
    r.f.reserve(f.size() + o.f.size());
    size_t i = 0, j = 0;
    while (i < f.size() || j < o.f.size()) {
        if (j == o.f.size() || (i < f.size() && f[i].first < o.f[j].first)) {
            r.f.push_back(f[i++]);
        } else if (i == f.size() || o.f[j].first < f[i].first) {
            r.f.push_back(o.f[j++]);
        } else {
            int e = f[i].second + o.f[j].second;
            if (e != 0) r.f.push_back({f[i].first, e});
            ++i;
            ++j;
        }
    }
    return r;
}

Mono Mono::inverse() const {
    Mono r = *this;
    for (auto& [g, e] : r.f) {
        if (g.mode != 0) throw arith_error("Mono::inverse on non-unit factor " + g.str());
        e = -e;
    }
    return r;
}

std::string Mono::str() const {
    if (f.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (auto& [g, e] : f) {
        if (!first) os << "*";
        os << g.str();
        if (e != 1) os << "^" << e;
        first = false;
    }
    return os.str();
}

}  // namespace qlax
