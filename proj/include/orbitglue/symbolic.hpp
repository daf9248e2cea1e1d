#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitglue {

using Word = std::vector<int>;

inline std::string word_to_string(const Word& w, char sep = '\0') {
    std::string out;
    for (size_t i = 0; i < w.size(); ++i) {
        if (sep && i) out.push_back(sep);
        if (w[i] >= 0 && w[i] <= 9 && !sep)
            out.push_back(static_cast<char>('0' + w[i]));
        else {
            if (i && !sep) out.push_back(' ');
            out += std::to_string(w[i]);
        }
    }
    return out;
}

// Lexicographically least cyclic rotation (Booth's algorithm would be
// overkill at this scale; direct comparison is fine).
inline Word least_rotation(const Word& w) {
    Word best = w;
    Word cur = w;
    for (size_t i = 1; i < w.size(); ++i) {
        std::rotate(cur.begin(), cur.begin() + 1, cur.end());
        if (cur < best) best = cur;
    }
    return best;
}

// Shortest u with w = u^k. |u| divides |w|.
inline Word primitive_root(const Word& w) {
    const size_t n = w.size();
    for (size_t d = 1; d <= n; ++d) {
        if (n % d != 0) continue;
        bool ok = true;
        for (size_t i = d; i < n && ok; ++i) ok = (w[i] == w[i % d]);
        if (ok) return Word(w.begin(), w.begin() + d);
    }
    return w;
}

// Eventually periodic two-sided sequence. Raw layout: positions < 0 read the
// left word cyclically (right-aligned: position -1 is left.back()), positions
// 0..center.size()-1 read the center, positions >= center.size() read the
// right word cyclically. Coordinate n of the point is raw position n + shift.
// This class is closed under shift, bracket and closing, and equality of the
// realized sequences is decidable.
class SymbolicPoint {
public:
    SymbolicPoint(Word left, Word center, Word right, long long shift = 0)
        : left_(std::move(left)), center_(std::move(center)),
          right_(std::move(right)), shift_(shift) {
        if (left_.empty() || right_.empty())
            throw std::invalid_argument("SymbolicPoint: tail words must be nonempty");
    }

    static SymbolicPoint periodic(const Word& w) {
        if (w.empty()) throw std::invalid_argument("periodic point of empty word");
        return SymbolicPoint(w, {}, w, 0);
    }

    int at(long long n) const {
        long long p = n + shift_;
        if (p < 0) {
            long long L = static_cast<long long>(left_.size());
            return left_[static_cast<size_t>(((p % L) + L) % L)];
        }
        long long c = static_cast<long long>(center_.size());
        if (p < c) return center_[static_cast<size_t>(p)];
        long long R = static_cast<long long>(right_.size());
        return right_[static_cast<size_t>((p - c) % R)];
    }

    SymbolicPoint shifted(long long t) const {
        SymbolicPoint out = *this;
        out.shift_ += t;
        return out;
    }

    Word window(long long lo, long long hi) const {  // inclusive bounds
        Word out;
        out.reserve(static_cast<size_t>(hi - lo + 1));
        for (long long n = lo; n <= hi; ++n) out.push_back(at(n));
        return out;
    }

    // Coordinate below which only the left tail is read / from which only the
    // right tail is read.
    long long left_tail_bound() const { return -shift_; }
    long long right_tail_bound() const {
        return static_cast<long long>(center_.size()) - shift_;
    }
    const Word& left_word() const { return left_; }
    const Word& right_word() const { return right_; }

    // Equality of realized bi-infinite sequences. Both tails are periodic, so
    // agreement on a window extending one lcm beyond both tail bounds decides.
    friend bool operator==(const SymbolicPoint& a, const SymbolicPoint& b) {
        long long lo = std::min(a.left_tail_bound(), b.left_tail_bound());
        long long hi = std::max(a.right_tail_bound(), b.right_tail_bound());
        long long L = std::lcm(static_cast<long long>(a.left_.size()),
                               static_cast<long long>(b.left_.size()));
        long long R = std::lcm(static_cast<long long>(a.right_.size()),
                               static_cast<long long>(b.right_.size()));
        for (long long n = lo - L; n < hi + R; ++n)
            if (a.at(n) != b.at(n)) return false;
        return true;
    }
    friend bool operator!=(const SymbolicPoint& a, const SymbolicPoint& b) {
        return !(a == b);
    }

    // Conclusive scan bound for metric computations against another point.
    long long comparison_horizon(const SymbolicPoint& other) const {
        long long lo = std::min(left_tail_bound(), other.left_tail_bound());
        long long hi = std::max(right_tail_bound(), other.right_tail_bound());
        long long L = std::lcm(static_cast<long long>(left_.size()),
                               static_cast<long long>(other.left_.size()));
        long long R = std::lcm(static_cast<long long>(right_.size()),
                               static_cast<long long>(other.right_.size()));
        return std::max(std::llabs(lo - L), std::llabs(hi + R)) + 1;
    }

private:
    Word left_;
    Word center_;
    Word right_;
    long long shift_;
};

// 2^-k with k the smallest |n| where the sequences disagree; 0 iff equal.
inline double shift_distance(const SymbolicPoint& x, const SymbolicPoint& y) {
    long long horizon = x.comparison_horizon(y);
    for (long long k = 0; k <= horizon; ++k) {
        if (x.at(k) != y.at(k) || x.at(-k) != y.at(-k))
            return std::ldexp(1.0, static_cast<int>(-std::min(k, 1060LL)));
    }
    return 0.0;
}

// Largest r with agreement on |n| <= r, or -1 if they differ at 0;
// LLONG_MAX-like sentinel (horizon+1 capped) is avoided: returns horizon+1
// when the points are equal as sequences.
inline long long agreement_radius(const SymbolicPoint& x, const SymbolicPoint& y) {
    long long horizon = x.comparison_horizon(y);
    for (long long k = 0; k <= horizon; ++k)
        if (x.at(k) != y.at(k) || x.at(-k) != y.at(-k)) return k - 1;
    return horizon + 1;
}

}  // namespace orbitglue
