#pragma once

// Brute-force reference implementations used only by the tests. They work on
// plain std::vector/std::map representations and share no code with the
// library beyond the types needed to compare results.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Set = std::vector<int>;         // sorted indices, 1-based
using Family = std::vector<Set>;      // sorted list of sets

inline bool subset(const Set& a, const Set& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

inline std::vector<Set> nonempty_subsets(int n) {
    std::vector<Set> out;
    for (int mask = 1; mask < (1 << n); ++mask) {
        Set s;
        for (int i = 0; i < n; ++i) {
            if (mask & (1 << i)) s.push_back(i + 1);
        }
        out.push_back(s);
    }
    return out;
}

/// Every nonempty family of nonempty subsets with no member inside another.
/// Exponential in 2^n - 1; fine up to n = 4.
inline std::vector<Family> antichains(int n) {
    const auto subsets = nonempty_subsets(n);
    const std::uint32_t m = static_cast<std::uint32_t>(subsets.size());
    std::vector<Family> out;
    for (std::uint32_t pick = 1; pick < (1U << m); ++pick) {
        Family f;
        for (std::uint32_t k = 0; k < m; ++k) {
            if (pick & (1U << k)) f.push_back(subsets[k]);
        }
        bool ok = true;
        for (std::size_t a = 0; a < f.size() && ok; ++a) {
            for (std::size_t b = 0; b < f.size() && ok; ++b) {
                if (a != b && subset(f[a], f[b])) ok = false;
            }
        }
        if (ok) {
            std::sort(f.begin(), f.end());
            out.push_back(f);
        }
    }
    return out;
}

/// alpha <= beta iff every member of beta contains a member of alpha.
inline bool leq(const Family& alpha, const Family& beta) {
    for (const auto& b : beta) {
        if (std::none_of(alpha.begin(), alpha.end(), [&](const Set& a) { return subset(a, b); })) return false;
    }
    return true;
}

inline std::string text(const Family& f) {
    std::string s;
    for (const auto& set : f) {
        s += '(';
        for (int i : set) s += static_cast<char>('0' + i);
        s += ')';
    }
    return s;
}

/// Elements ordered so that i < j whenever elems[i] < elems[j] in the poset.
template <class Leq>
std::vector<std::size_t> linear_extension(std::size_t size, Leq le) {
    std::vector<std::size_t> below(size, 0), order(size);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) below[j] += le(i, j) ? 1 : 0;
    }
    for (std::size_t i = 0; i < size; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return below[a] < below[b]; });
    return order;
}

/// Mobius matrix as the integer inverse of the zeta matrix, by back
/// substitution along a linear extension: sum_z mu(x,z) zeta(z,y) = [x == y].
template <class Leq>
std::vector<std::vector<long long>> mobius_by_inversion(std::size_t size, Leq le) {
    const auto order = linear_extension(size, le);
    std::vector<std::vector<long long>> mu(size, std::vector<long long>(size, 0));
    for (std::size_t x = 0; x < size; ++x) {
        for (std::size_t y : order) {
            long long acc = (x == y) ? 1 : 0;
            for (std::size_t z = 0; z < size; ++z) {
                if (z != y && le(z, y)) acc -= mu[x][z];
            }
            mu[x][y] = le(x, y) ? acc : 0;
        }
    }
    return mu;
}

/// Atoms by recursive subtraction: atom(b) = v(b) - sum_{a < b} atom(a).
template <class Leq>
std::vector<double> atoms_by_subtraction(const std::vector<double>& v, Leq le) {
    const std::size_t size = v.size();
    const auto order = linear_extension(size, le);
    std::vector<double> atom(size, 0.0);
    for (std::size_t b : order) {
        double acc = v[b];
        for (std::size_t a = 0; a < size; ++a) {
            if (a != b && le(a, b)) acc -= atom[a];
        }
        atom[b] = acc;
    }
    return atom;
}

// ---------------------------------------------------------------------------
// Information theory on explicit state lists.

struct Pmf {
    std::vector<std::vector<int>> states;  // full (x1..xn, y1..ym)
    std::vector<double> p;
};

inline std::vector<int> project(const std::vector<int>& state, const std::vector<int>& vars) {
    std::vector<int> out;
    for (int v : vars) out.push_back(state[static_cast<std::size_t>(v)]);
    return out;
}

/// I(vars_a; vars_b) in bits, variables addressed by position in the state.
inline double mi(const Pmf& d, const std::vector<int>& a, const std::vector<int>& b) {
    std::map<std::vector<int>, double> pa, pb, pab;
    for (std::size_t k = 0; k < d.p.size(); ++k) {
        if (d.p[k] <= 0) continue;
        const auto xa = project(d.states[k], a), xb = project(d.states[k], b);
        pa[xa] += d.p[k];
        pb[xb] += d.p[k];
        auto joint = xa;
        joint.push_back(-1);
        joint.insert(joint.end(), xb.begin(), xb.end());
        pab[joint] += d.p[k];
    }
    double out = 0;
    for (const auto& [key, p] : pab) {
        const auto sep = std::find(key.begin(), key.end(), -1);
        const std::vector<int> xa(key.begin(), sep), xb(sep + 1, key.end());
        out += p * std::log2(p / (pa[xa] * pb[xb]));
    }
    return out;
}

/// Williams-Beer I_min straight from the definition. `sources` lists the
/// source groups as state positions, `target` the target position.
inline double i_min(const Pmf& d, const std::vector<std::vector<int>>& sources, int target) {
    std::map<int, double> py;
    for (std::size_t k = 0; k < d.p.size(); ++k) py[d.states[k][static_cast<std::size_t>(target)]] += d.p[k];
    double out = 0;
    for (const auto& [y, pyv] : py) {
        if (pyv <= 0) continue;
        double best = 1e300;
        for (const auto& group : sources) {
            std::map<std::vector<int>, double> px, pxy;
            for (std::size_t k = 0; k < d.p.size(); ++k) {
                const auto x = project(d.states[k], group);
                px[x] += d.p[k];
                if (d.states[k][static_cast<std::size_t>(target)] == y) pxy[x] += d.p[k];
            }
            double spec = 0;
            for (const auto& [x, pj] : pxy) {
                if (pj <= 0) continue;
                const double p_x_given_y = pj / pyv;
                const double p_y_given_x = pj / px[x];
                spec += p_x_given_y * (std::log2(p_y_given_x) - std::log2(pyv));
            }
            best = std::min(best, spec);
        }
        out += pyv * best;
    }
    return out;
}

}  // namespace oracle
