#include "orbitglue/markov.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <deque>
#include <queue>
#include <set>

namespace orbitglue {

namespace {

// Kosaraju over an explicit adjacency list; returns component ids.
std::vector<int> scc_ids(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<std::vector<int>> radj(n);
    for (int u = 0; u < n; ++u)
        for (int v : adj[u]) radj[v].push_back(u);

    std::vector<char> seen(n, 0);
    std::vector<int> order;
    order.reserve(n);
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        // iterative DFS, post-order
        std::vector<std::pair<int, size_t>> stack{{s, 0}};
        seen[s] = 1;
        while (!stack.empty()) {
            auto& [u, i] = stack.back();
            if (i < adj[u].size()) {
                int v = adj[u][i++];
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.emplace_back(v, 0);
                }
            } else {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }
    std::vector<int> id(n, -1);
    int next_id = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (id[*it] != -1) continue;
        std::vector<int> stack{*it};
        id[*it] = next_id;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : radj[u])
                if (id[v] == -1) {
                    id[v] = next_id;
                    stack.push_back(v);
                }
        }
        ++next_id;
    }
    return id;
}

}  // namespace

MarkovShift::MarkovShift(std::string name, AdjacencyFn allowed, int truncation)
    : name_(std::move(name)), allowed_(std::move(allowed)), truncation_(truncation) {
    if (truncation_ < 1)
        throw std::invalid_argument("MarkovShift: truncation must be at least 1");
    compute_component();
}

void MarkovShift::compute_component() {
    std::vector<std::vector<int>> adj(truncation_);
    for (int a = 0; a < truncation_; ++a)
        for (int b = 0; b < truncation_; ++b)
            if (allowed_(a, b)) adj[a].push_back(b);

    std::vector<int> id = scc_ids(adj);
    int ncomp = id.empty() ? 0 : *std::max_element(id.begin(), id.end()) + 1;
    std::vector<std::vector<int>> members(ncomp);
    for (int s = 0; s < truncation_; ++s) members[id[s]].push_back(s);

    // recurrent components only: a singleton needs a self-loop
    int best = -1;
    for (int c = 0; c < ncomp; ++c) {
        const auto& m = members[c];
        if (m.size() == 1 && !allowed_(m[0], m[0])) continue;
        if (best == -1 || m.size() > members[best].size() ||
            (m.size() == members[best].size() && m[0] < members[best][0]))
            best = c;
    }
    if (best == -1)
        throw std::invalid_argument("MarkovShift: truncation contains no recurrent component");

    component_ = members[best];
    std::sort(component_.begin(), component_.end());
    in_component_.assign(truncation_, 0);
    for (int s : component_) in_component_[s] = 1;
    adjacency_.assign(truncation_, {});
    for (int a : component_)
        for (int b : component_)
            if (allowed_(a, b)) adjacency_[a].push_back(b);
}

bool MarkovShift::allowed(int a, int b) const {
    if (a < 0 || b < 0 || a >= truncation_ || b >= truncation_) return false;
    return allowed_(a, b);
}

bool MarkovShift::in_component(int s) const {
    return s >= 0 && s < truncation_ && in_component_[s];
}

MarkovShift MarkovShift::full_shift(int truncation) {
    return MarkovShift("full", [](int, int) { return true; }, truncation);
}

MarkovShift MarkovShift::golden_mean() {
    return MarkovShift("golden-mean", [](int a, int b) { return !(a == 1 && b == 1); }, 2);
}

MarkovShift MarkovShift::renewal(int k, int truncation) {
    if (k < 1) throw std::invalid_argument("renewal: k must be at least 1");
    return MarkovShift("renewal(" + std::to_string(k) + ")",
                       [k](int a, int b) { return (a == 0 && b < k) || b == a - 1; },
                       truncation);
}

MarkovShift MarkovShift::from_edges(int truncation, const std::vector<std::pair<int, int>>& edges,
                                    std::string name) {
    auto table = std::make_shared<std::set<std::pair<int, int>>>(edges.begin(), edges.end());
    return MarkovShift(std::move(name),
                       [table](int a, int b) { return table->count({a, b}) > 0; },
                       truncation);
}

bool MarkovShift::word_admissible(const Word& w, bool cyclic) const {
    if (w.empty()) return false;
    for (int s : w)
        if (!in_component(s)) return false;
    for (size_t i = 0; i + 1 < w.size(); ++i)
        if (!allowed(w[i], w[i + 1])) return false;
    if (cyclic && !allowed(w.back(), w.front())) return false;
    return true;
}

void MarkovShift::check_point(const Point& p) const {
    long long L = static_cast<long long>(p.left_word().size());
    long long R = static_cast<long long>(p.right_word().size());
    long long lo = p.left_tail_bound() - 2 * L - 1;
    long long hi = p.right_tail_bound() + 2 * R + 1;
    for (long long n = lo; n <= hi; ++n) {
        if (!in_component(p.at(n)))
            throw std::invalid_argument("point uses symbol " + std::to_string(p.at(n)) +
                                        " outside the active component");
        if (n < hi && !allowed(p.at(n), p.at(n + 1)))
            throw std::invalid_argument("point has forbidden transition " +
                                        std::to_string(p.at(n)) + " -> " +
                                        std::to_string(p.at(n + 1)) + " at position " +
                                        std::to_string(n));
    }
}

MarkovShift::Orbit MarkovShift::make_orbit(const Word& w) const {
    if (!word_admissible(w, /*cyclic=*/true))
        throw std::invalid_argument("word is not cyclically admissible: " + word_to_string(w));
    return Orbit{least_rotation(primitive_root(w))};
}

SymbolicPoint MarkovShift::bracket(const Point& x, const Point& y) const {
    if (x.at(0) != y.at(0))
        throw std::invalid_argument("bracket: points not in product neighborhood");
    const long long Lx = static_cast<long long>(x.left_word().size());
    const long long Ry = static_cast<long long>(y.right_word().size());
    const long long lo = std::min(-1LL, x.left_tail_bound() - 1);
    const long long e = std::max(1LL, y.right_tail_bound());
    Word left = x.window(lo - Lx, lo - 1);
    Word center = x.window(lo, 0);
    for (long long n = 1; n < e; ++n) center.push_back(y.at(n));
    Word right = y.window(e, e + Ry - 1);
    return SymbolicPoint(std::move(left), std::move(center), std::move(right), -lo);
}

MarkovShift::ClosingResult MarkovShift::close_segment(const Point& x, long long t,
                                                      long long m) const {
    if (t < 1) throw std::invalid_argument("close_segment: return time must be positive");
    if (m < 0) throw std::invalid_argument("close_segment: window must be nonnegative");
    for (long long i = -m; i <= m; ++i)
        if (x.at(i) != x.at(i + t))
            throw std::invalid_argument(
                "close_segment: window precondition fails at i = " + std::to_string(i));
    Word w = x.window(0, t - 1);
    if (!allowed(w.back(), w.front()))
        throw std::invalid_argument("close_segment: cyclic inadmissibility: forbidden transition " +
                                    std::to_string(w.back()) + " -> " + std::to_string(w.front()));
    ClosingResult result{make_orbit(w), SymbolicPoint::periodic(w), t, {}};
    result.agreement_radius.reserve(static_cast<size_t>(t) + 1);
    for (long long s = 0; s <= t; ++s)
        result.agreement_radius.push_back(std::min(m + s, t + m - s));
    return result;
}

Word MarkovShift::connect_words(int a, int b) const {
    if (!in_component(a) || !in_component(b))
        throw std::invalid_argument("connect_words: symbols not in the active component");
    // BFS over paths with at least one edge, neighbors in symbol order, so the
    // first path found is shortest and lexicographically least. parent: -2
    // undiscovered, -1 first hop from a, else predecessor.
    std::vector<int> parent(truncation_, -2);
    std::deque<int> queue;
    for (int v : adjacency_[a]) {
        if (v == b) return {};
        if (parent[v] == -2) {
            parent[v] = -1;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : adjacency_[u]) {
            if (v == b) {
                Word path;
                for (int c = u; c != -1; c = parent[c]) path.push_back(c);
                std::reverse(path.begin(), path.end());
                return path;
            }
            if (parent[v] == -2) {
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    throw std::invalid_argument("connect_words: symbols not connected in the truncation");
}

std::vector<MarkovShift::Orbit> MarkovShift::enumerate_periodic(long long T) const {
    if (T < 1) throw std::invalid_argument("enumerate_periodic: T must be at least 1");
    std::vector<Orbit> out;
    Word w;
    // canonical words start with their minimal symbol, so branches below w[0]
    // are pruned
    auto extend = [&](auto&& self, size_t target) -> void {
        if (w.size() == target) {
            if (!allowed(w.back(), w.front())) return;
            if (primitive_root(w).size() != w.size()) return;
            if (least_rotation(w) != w) return;
            out.push_back(Orbit{w});
            return;
        }
        for (int v : adjacency_[w.back()]) {
            if (v < w.front()) continue;
            w.push_back(v);
            self(self, target);
            w.pop_back();
        }
    };
    for (long long len = 1; len <= T; ++len)
        for (int s : component_) {
            w.assign(1, static_cast<int>(s));
            extend(extend, static_cast<size_t>(len));
        }
    std::sort(out.begin(), out.end());
    return out;
}

int MarkovMeasure::index_of(int symbol) const {
    auto it = std::lower_bound(symbols.begin(), symbols.end(), symbol);
    if (it == symbols.end() || *it != symbol) return -1;
    return static_cast<int>(it - symbols.begin());
}

double MarkovMeasure::word_probability(const Word& w) const {
    if (w.empty()) return 1.0;
    int i = index_of(w[0]);
    if (i < 0) return 0.0;
    double p = stationary[static_cast<size_t>(i)];
    for (size_t k = 0; k + 1 < w.size(); ++k) {
        int j = index_of(w[k + 1]);
        if (j < 0) return 0.0;
        p *= transition[static_cast<size_t>(i)][static_cast<size_t>(j)];
        i = j;
    }
    return p;
}

MarkovMeasure stationary_measure(const MarkovShift& sys,
                                 const std::vector<std::vector<double>>& P) {
    const auto& comp = sys.component();
    const size_t n = comp.size();
    if (P.size() != n)
        throw std::invalid_argument("stationary_measure: matrix size does not match component");
    std::vector<std::vector<int>> support(n);
    for (size_t i = 0; i < n; ++i) {
        if (P[i].size() != n)
            throw std::invalid_argument("stationary_measure: matrix is not square");
        double row_sum = 0.0;
        for (size_t j = 0; j < n; ++j) {
            double p = P[i][j];
            if (p < 0.0)
                throw std::invalid_argument("stationary_measure: negative entry");
            if (p > 0.0) {
                if (!sys.allowed(comp[i], comp[j]))
                    throw std::invalid_argument(
                        "stationary_measure: positive weight on forbidden transition " +
                        std::to_string(comp[i]) + " -> " + std::to_string(comp[j]));
                support[i].push_back(static_cast<int>(j));
            }
            row_sum += p;
        }
        if (std::abs(row_sum - 1.0) > 1e-12)
            throw std::invalid_argument("stationary_measure: row " + std::to_string(comp[i]) +
                                        " sums to " + std::to_string(row_sum));
    }
    std::vector<int> id = scc_ids(support);
    for (size_t i = 1; i < n; ++i)
        if (id[i] != id[0])
            throw std::invalid_argument("stationary_measure: chain is reducible on the component");

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = P[i][j];
    M -= Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    // replace one redundant equation with the normalization
    for (size_t j = 0; j < n; ++j) M(static_cast<Eigen::Index>(n) - 1, static_cast<Eigen::Index>(j)) = 1.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    rhs(static_cast<Eigen::Index>(n) - 1) = 1.0;
    Eigen::VectorXd pi = M.fullPivLu().solve(rhs);

    MarkovMeasure mu;
    mu.symbols = comp;
    mu.transition = P;
    mu.stationary.assign(n, 0.0);
    double total = pi.sum();
    for (size_t i = 0; i < n; ++i) mu.stationary[i] = pi(static_cast<Eigen::Index>(i)) / total;

    double residual = 0.0;
    for (size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (size_t i = 0; i < n; ++i) col += mu.stationary[i] * P[i][j];
        residual = std::max(residual, std::abs(col - mu.stationary[j]));
    }
    if (residual > 1e-12)
        throw std::runtime_error("stationary_measure: solve residual " + std::to_string(residual));
    for (double p : mu.stationary)
        if (!(p > 0.0))
            throw std::runtime_error("stationary_measure: nonpositive stationary entry");
    return mu;
}

std::vector<std::vector<double>> uniform_transitions(const MarkovShift& sys) {
    const auto& comp = sys.component();
    const size_t n = comp.size();
    std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        int deg = 0;
        for (size_t j = 0; j < n; ++j)
            if (sys.allowed(comp[i], comp[j])) ++deg;
        for (size_t j = 0; j < n; ++j)
            if (sys.allowed(comp[i], comp[j])) P[i][j] = 1.0 / deg;
    }
    return P;
}

std::uint64_t SeededRng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SeededRng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

size_t SeededRng::pick(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

OrbitSegment<MarkovShift> sample_path(const MarkovShift& sys, const MarkovMeasure& mu,
                                      long long length, std::uint64_t seed) {
    if (length < 1) throw std::invalid_argument("sample_path: length must be positive");
    SeededRng rng(seed);
    Word path;
    path.reserve(static_cast<size_t>(length));
    size_t state = rng.pick(mu.stationary);
    path.push_back(mu.symbols[state]);
    for (long long k = 1; k < length; ++k) {
        state = rng.pick(mu.transition[state]);
        path.push_back(mu.symbols[state]);
    }
    // shortest admissible cycles as tails
    int s0 = path.front(), s1 = path.back();
    Word left = {s0};
    {
        Word c = sys.connect_words(s0, s0);
        left.insert(left.end(), c.begin(), c.end());
    }
    Word right = sys.connect_words(s1, s1);
    right.push_back(s1);
    SymbolicPoint point(std::move(left), std::move(path), std::move(right), 0);
    return OrbitSegment<MarkovShift>(std::move(point), length);
}

}  // namespace orbitglue
