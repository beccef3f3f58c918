#include "loopchi/terms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace loopchi::terms {

double FreqCombo::value(const std::vector<double>& inputs) const {
    double v = 0.0;
    for (int i = 0; i < order; ++i) v += coeff[i] * inputs[i];
    if (ws() != 0) {
        double s = 0.0;
        for (int i = 0; i < order; ++i) s += inputs[i];
        v += ws() * s;
    }
    return v;
}

namespace {

void check_order(int n) {
    if (n < 1 || n > kMaxOrder)
        throw std::invalid_argument("expansion order must be in [1, " +
                                    std::to_string(kMaxOrder) + "]");
}

std::array<int8_t, kMaxOrder> identity_perm(int n) {
    std::array<int8_t, kMaxOrder> p{};
    for (int i = 0; i < n; ++i) p[i] = static_cast<int8_t>(i);
    return p;
}

} // namespace

std::vector<ExpansionTerm> loop_terms(int n) {
    check_order(n);
    std::vector<ExpansionTerm> out;
    out.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        // Interaction sequence along the loop: w1 .. w_{n-k}, then -ws, then
        // the remaining inputs. The propagator after each of the first n
        // interactions accumulates everything seen so far.
        ExpansionTerm t;
        t.origin = Expansion::loop;
        t.order = n;
        t.sign = (k % 2 == 0) ? +1 : -1;
        t.perm = identity_perm(n);
        FreqCombo cum;
        cum.order = n;
        int next_input = 0;
        for (int pos = 0; pos < n; ++pos) {
            const bool before_signal = pos < n - k;
            if (before_signal) cum.coeff[next_input++] = +1;
            else if (pos == n - k) cum.coeff[n] = -1;          // the signal vertex
            else cum.coeff[next_input++] = +1;
            Propagator p;
            p.kind = before_signal ? PropKind::retarded : PropKind::advanced;
            p.freq = cum;
            t.chain.push_back(p);
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<ExpansionTerm> timeordered_terms(int n) {
    check_order(n);
    std::vector<ExpansionTerm> out;
    out.reserve(size_t{1} << n);
    for (uint32_t mask = 0; mask < (uint32_t{1} << n); ++mask) {
        ExpansionTerm t;
        t.origin = Expansion::timeordered;
        t.order = n;
        t.perm = identity_perm(n);
        int r_count = 0;
        for (int i = 0; i < n; ++i) {
            // lexicographic with L < R and the first interaction most significant
            const bool is_r = (mask >> (n - 1 - i)) & 1u;
            t.tags.push_back(is_r ? Tag::R : Tag::L);
            r_count += is_r ? 1 : 0;
        }
        t.tags.push_back(Tag::L);   // detection
        t.sign = (r_count % 2 == 0) ? +1 : -1;
        FreqCombo cum;
        cum.order = n;
        for (int i = 0; i < n; ++i) {
            cum.coeff[i] = +1;
            Propagator p;
            p.kind = PropKind::retarded;
            p.freq = cum;
            t.chain.push_back(p);
        }
        out.push_back(std::move(t));
    }
    return out;
}

void for_each_permutation(const std::vector<ExpansionTerm>& base, int n,
                          const std::function<void(const ExpansionTerm&)>& fn) {
    check_order(n);
    std::array<int8_t, kMaxOrder> perm = identity_perm(n);
    ExpansionTerm buf;
    do {
        for (const auto& t : base) {
            buf = t;
            buf.perm = perm;
            for (auto& p : buf.chain) {
                FreqCombo remapped;
                remapped.order = p.freq.order;
                remapped.coeff[n] = p.freq.coeff[n];
                for (int i = 0; i < n; ++i) remapped.coeff[perm[i]] = p.freq.coeff[i];
                p.freq = remapped;
            }
            fn(buf);
        }
    } while (std::next_permutation(perm.begin(), perm.begin() + n));
}

std::vector<ExpansionTerm> expand_permutations(const std::vector<ExpansionTerm>& base, int n) {
    std::vector<ExpansionTerm> out;
    for_each_permutation(base, n, [&](const ExpansionTerm& t) { out.push_back(t); });
    return out;
}

namespace {

std::string render_combo(const FreqCombo& c) {
    std::string s;
    auto add = [&](int sgn, const std::string& name) {
        if (sgn == 0) return;
        if (!s.empty() || sgn < 0) s += (sgn > 0) ? "+" : "-";
        s += name;
    };
    add(c.ws(), "ws");
    for (int i = 0; i < c.order; ++i) add(c.w(i), "w" + std::to_string(i + 1));
    return s;
}

} // namespace

std::string render_term(const ExpansionTerm& t) {
    const bool tagged = t.origin == Expansion::timeordered;
    const int n = static_cast<int>(t.chain.size());
    auto vertex = [&](int i) {
        if (!tagged) return std::string("V");
        return std::string("V_") + static_cast<char>(t.tags[i]);
    };
    std::string s = (t.sign >= 0) ? "+ <" : "- <";
    s += vertex(n);   // detection, printed first
    for (int i = n - 1; i >= 0; --i) {
        const auto& p = t.chain[i];
        s += (p.kind == PropKind::retarded) ? " G(" : " G†(";
        s += render_combo(p.freq);
        s += ") " + vertex(i);
    }
    s += ">";
    return s;
}

namespace {

struct Cursor {
    const std::string& s;
    size_t pos{0};

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("term parse error at position " + std::to_string(pos) +
                                    ": " + msg);
    }
    void expect(const std::string& tok) {
        if (s.compare(pos, tok.size(), tok) != 0) fail("expected '" + tok + "'");
        pos += tok.size();
    }
    bool peek(const std::string& tok) const { return s.compare(pos, tok.size(), tok) == 0; }
    void skip_ws() {
        while (pos < s.size() && s[pos] == ' ') ++pos;
    }
};

FreqCombo parse_combo(Cursor& c, int& max_index) {
    FreqCombo out;
    bool any = false;
    while (true) {
        int sgn = +1;
        if (c.peek("+")) { c.pos++; }
        else if (c.peek("-")) { sgn = -1; c.pos++; }
        else if (any) break;
        if (c.peek("ws")) {
            c.pos += 2;
            out.coeff[kMaxOrder] = static_cast<int8_t>(sgn);
        } else if (c.peek("w")) {
            c.pos++;
            size_t start = c.pos;
            while (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos])))
                c.pos++;
            if (c.pos == start) c.fail("expected frequency index");
            int idx = std::stoi(c.s.substr(start, c.pos - start));
            if (idx < 1 || idx > kMaxOrder) c.fail("frequency index out of range");
            max_index = std::max(max_index, idx);
            out.coeff[idx - 1] = static_cast<int8_t>(sgn);
        } else {
            c.fail("expected ws or w<k>");
        }
        any = true;
    }
    if (!any) c.fail("empty frequency argument");
    return out;
}

} // namespace

ExpansionTerm parse_term(const std::string& s) {
    Cursor c{s};
    ExpansionTerm t;
    c.skip_ws();
    if (c.peek("+")) t.sign = +1;
    else if (c.peek("-")) t.sign = -1;
    else c.fail("expected leading sign");
    c.pos++;
    c.skip_ws();
    c.expect("<");

    std::vector<Tag> tags;
    std::vector<Propagator> rev_chain;
    bool tagged = false;
    while (true) {
        c.expect("V");
        if (c.peek("_")) {
            c.pos++;
            if (c.peek("L")) tags.push_back(Tag::L);
            else if (c.peek("R")) tags.push_back(Tag::R);
            else c.fail("vertex tag must be L or R");
            c.pos++;
            tagged = true;
        } else {
            tags.push_back(Tag::L);
        }
        c.skip_ws();
        if (c.peek(">")) {
            c.pos++;
            break;
        }
        Propagator p;
        if (c.peek("G†(")) {
            p.kind = PropKind::advanced;
            c.pos += std::string("G†(").size();
        } else if (c.peek("G(")) {
            p.kind = PropKind::retarded;
            c.pos += 2;
        } else {
            c.fail("expected propagator");
        }
        int dummy = 0;
        p.freq = parse_combo(c, dummy);
        c.expect(")");
        c.skip_ws();
        rev_chain.push_back(p);
    }
    c.skip_ws();
    if (c.pos != s.size()) c.fail("trailing characters");

    const int n = static_cast<int>(rev_chain.size());
    if (n < 1 || n > kMaxOrder) c.fail("unsupported chain length");
    t.order = n;
    t.chain.assign(rev_chain.rbegin(), rev_chain.rend());
    for (auto& p : t.chain) {
        p.freq.order = n;
        if (n < kMaxOrder) {
            p.freq.coeff[n] = p.freq.coeff[kMaxOrder];   // ws lives at coeff[order]
            p.freq.coeff[kMaxOrder] = 0;
        }
    }
    bool any_advanced = t.advanced_count() > 0;
    t.origin = (tagged && !any_advanced) ? Expansion::timeordered : Expansion::loop;
    if (t.origin == Expansion::timeordered) t.tags.assign(tags.rbegin(), tags.rend());
    for (int i = 0; i < n; ++i) t.perm[i] = static_cast<int8_t>(i);
    return t;
}

} // namespace loopchi::terms
