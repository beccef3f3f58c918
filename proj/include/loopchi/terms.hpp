// terms.hpp — symbolic expansion terms for chi^(n).
//
// Two generators cover the same susceptibility: the partially-time-ordered
// (loop) expansion with n+1 base terms, and the fully-time-ordered expansion
// with 2^n base terms. Frequency arguments are cumulative sums over the
// interaction sequence; input-frequency permutations multiply either list
// by n!.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace loopchi::terms {

inline constexpr int kMaxOrder = 8;

// Integer coefficients over (w1..wn, ws), each in {-1, 0, +1}.
struct FreqCombo {
    int order{0};
    std::array<int8_t, kMaxOrder + 1> coeff{};   // [0..order-1] inputs, [order] is ws

    int8_t w(int i) const { return coeff[i]; }
    int8_t ws() const { return coeff[order]; }

    // Numeric value for concrete input frequencies; ws = sum of inputs.
    double value(const std::vector<double>& inputs) const;

    bool operator==(const FreqCombo& o) const { return order == o.order && coeff == o.coeff; }
};

enum class PropKind : uint8_t { retarded, advanced };
enum class Expansion : uint8_t { loop, timeordered };
enum class Tag : char { L = 'L', R = 'R' };

struct Propagator {
    PropKind kind{PropKind::retarded};
    FreqCombo freq;

    bool operator==(const Propagator& o) const { return kind == o.kind && freq == o.freq; }
};

struct ExpansionTerm {
    int sign{+1};
    Expansion origin{Expansion::loop};
    int order{0};
    std::vector<Propagator> chain;      // chain[0] follows the first interaction
    std::vector<Tag> tags;              // time-ordered only: n+1 vertices, first
                                        // interaction first, detection last (always L)
    std::array<int8_t, kMaxOrder> perm{};  // input-index assignment, identity for base terms

    int advanced_count() const {
        int k = 0;
        for (const auto& p : chain) k += (p.kind == PropKind::advanced) ? 1 : 0;
        return k;
    }

    bool operator==(const ExpansionTerm& o) const {
        return sign == o.sign && origin == o.origin && order == o.order && chain == o.chain &&
               tags == o.tags && perm == o.perm;
    }
};

// n+1 terms, one per placement of the signal interaction along the loop.
// Term k carries k advanced propagators and sign (-1)^k.
std::vector<ExpansionTerm> loop_terms(int n);

// 2^n terms, one per L/R assignment of the n early interactions, enumerated
// lexicographically with L before R. Sign is (-1)^(number of R tags); all
// propagators are retarded with arguments w1, w1+w2, ...
std::vector<ExpansionTerm> timeordered_terms(int n);

// Streams every base term once per permutation of the input frequencies.
// The term passed to the callback is a reused buffer.
void for_each_permutation(const std::vector<ExpansionTerm>& base, int n,
                          const std::function<void(const ExpansionTerm&)>& fn);

// Materialized permutation expansion: size (n+1)*n! or 2^n*n!.
std::vector<ExpansionTerm> expand_permutations(const std::vector<ExpansionTerm>& base, int n);

// Deterministic one-line rendering, e.g.
//   + <V G(w1+w2+w3) V G(w1+w2) V G(w1) V>
//   - <V_L G(w1+w2) V_R G(w1) V_L>
std::string render_term(const ExpansionTerm& t);

// Inverse of render_term; throws std::invalid_argument on malformed input.
ExpansionTerm parse_term(const std::string& s);

} // namespace loopchi::terms
