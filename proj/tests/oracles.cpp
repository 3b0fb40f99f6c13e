#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace oracle {

namespace {

bool in(const NodeSet& s, Node v) {
    for (Node x : s) {
        if (x == v) return true;
    }
    return false;
}

NodeSet descendants(const Dag& g, Node v) {
    NodeSet out{v};
    for (std::size_t t = 0; t < out.size(); ++t) {
        for (Node c : g.children(out[t])) {
            if (!in(out, c)) out.push_back(c);
        }
    }
    return out;
}

}  // namespace

bool dsep_by_paths(const Dag& g, Node i, Node j, const NodeSet& s) {
    const int n = g.size();
    std::vector<bool> on_path(n, false);
    std::vector<Node> path{i};
    on_path[i] = true;
    bool open_found = false;

    auto path_open = [&]() {
        for (std::size_t t = 1; t + 1 < path.size(); ++t) {
            const Node a = path[t - 1], b = path[t], c = path[t + 1];
            const bool collider = g.has_edge(a, b) && g.has_edge(c, b);
            if (collider) {
                bool active = false;
                for (Node d : descendants(g, b)) active = active || in(s, d);
                if (!active) return false;
            } else if (in(s, b)) {
                return false;
            }
        }
        return true;
    };

    std::function<void(Node)> walk = [&](Node v) {
        if (open_found) return;
        if (v == j) {
            if (path_open()) open_found = true;
            return;
        }
        for (Node w = 0; w < n; ++w) {
            if (on_path[w] || !g.adjacent(v, w)) continue;
            on_path[w] = true;
            path.push_back(w);
            walk(w);
            path.pop_back();
            on_path[w] = false;
        }
    };
    walk(i);
    return !open_found;
}

double pcor_by_residuals(const Eigen::MatrixXd& sigma, Node i, Node j, const NodeSet& s) {
    // Rows of the upper Cholesky factor form m "observations" whose
    // uncentered Gram matrix is sigma.
    const Eigen::MatrixXd u = sigma.llt().matrixU();
    const Eigen::MatrixXd x = u;  // column c of x is variable c
    auto residual = [&](Node v) -> Eigen::VectorXd {
        const Eigen::VectorXd y = x.col(v);
        if (s.empty()) return y;
        Eigen::MatrixXd z(x.rows(), static_cast<Eigen::Index>(s.size()));
        for (std::size_t t = 0; t < s.size(); ++t) z.col(t) = x.col(s[t]);
        const Eigen::VectorXd b = z.colPivHouseholderQr().solve(y);
        return y - z * b;
    };
    const Eigen::VectorXd ri = residual(i), rj = residual(j);
    return ri.dot(rj) / std::sqrt(ri.squaredNorm() * rj.squaredNorm());
}

double pcor_by_recursion(const Eigen::MatrixXd& sigma, Node i, Node j, const NodeSet& s) {
    if (s.empty()) return sigma(i, j) / std::sqrt(sigma(i, i) * sigma(j, j));
    const Node k = s.back();
    const NodeSet rest(s.begin(), s.end() - 1);
    const double rij = pcor_by_recursion(sigma, i, j, rest);
    const double rik = pcor_by_recursion(sigma, i, k, rest);
    const double rjk = pcor_by_recursion(sigma, j, k, rest);
    return (rij - rik * rjk) / std::sqrt((1 - rik * rik) * (1 - rjk * rjk));
}

double regression_coefficient(const Eigen::MatrixXd& sigma, Node i, Node j, const NodeSet& s) {
    NodeSet preds{j};
    preds.insert(preds.end(), s.begin(), s.end());
    const auto p = static_cast<Eigen::Index>(preds.size());
    Eigen::MatrixXd a(p, p);
    Eigen::VectorXd b(p);
    for (Eigen::Index r = 0; r < p; ++r) {
        b(r) = sigma(preds[r], i);
        for (Eigen::Index c = 0; c < p; ++c) a(r, c) = sigma(preds[r], preds[c]);
    }
    return a.ldlt().solve(b)(0);
}

double conditional_variance(const Eigen::MatrixXd& sigma, Node v, const NodeSet& s) {
    if (s.empty()) return sigma(v, v);
    const auto p = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd a(p, p);
    Eigen::VectorXd b(p);
    for (Eigen::Index r = 0; r < p; ++r) {
        b(r) = sigma(s[r], v);
        for (Eigen::Index c = 0; c < p; ++c) a(r, c) = sigma(s[r], s[c]);
    }
    return sigma(v, v) - b.dot(a.ldlt().solve(b));
}

double soft_threshold(double z, double lambda) {
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

namespace {

std::set<std::tuple<Node, Node, Node>> vstructs(const Dag& g) {
    std::set<std::tuple<Node, Node, Node>> out;
    for (Node c = 0; c < g.size(); ++c) {
        const auto& pa = g.parents(c);
        for (std::size_t x = 0; x < pa.size(); ++x) {
            for (std::size_t y = x + 1; y < pa.size(); ++y) {
                if (!g.adjacent(pa[x], pa[y])) out.insert({pa[x], pa[y], c});
            }
        }
    }
    return out;
}

bool acyclic(int n, const std::vector<podag::Edge>& edges) {
    std::vector<int> indeg(n, 0);
    std::vector<std::vector<Node>> ch(n);
    for (const auto& e : edges) {
        ++indeg[e.to];
        ch[e.from].push_back(e.to);
    }
    std::vector<Node> q;
    for (Node v = 0; v < n; ++v) {
        if (indeg[v] == 0) q.push_back(v);
    }
    int seen = 0;
    while (!q.empty()) {
        Node v = q.back();
        q.pop_back();
        ++seen;
        for (Node c : ch[v]) {
            if (--indeg[c] == 0) q.push_back(c);
        }
    }
    return seen == n;
}

Pdag summarize(int n, const std::vector<std::vector<podag::Edge>>& members) {
    std::map<std::pair<Node, Node>, int> count;
    for (const auto& m : members) {
        for (const auto& e : m) ++count[{e.from, e.to}];
    }
    Pdag out(n);
    for (const auto& [e, c] : count) {
        const int rev = count.count({e.second, e.first}) ? count.at({e.second, e.first}) : 0;
        if (rev == 0) {
            out.add_directed(e.first, e.second);
        } else if (e.first < e.second) {
            out.add_undirected(e.first, e.second);
        }
    }
    return out;
}

Pdag enumerate(const Dag& g, const podag::WeakOrdering* rel) {
    const int n = g.size();
    const auto target = vstructs(g);
    std::vector<podag::Edge> fixed;
    std::vector<podag::NodePair> free;
    for (const auto& e : g.edges()) {
        if (rel != nullptr && rel->ordered(e.from, e.to)) {
            fixed.push_back(e);
        } else {
            free.emplace_back(e.from, e.to);
        }
    }
    std::vector<std::vector<podag::Edge>> members;
    const std::size_t combos = std::size_t{1} << free.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
        std::vector<podag::Edge> edges = fixed;
        for (std::size_t t = 0; t < free.size(); ++t) {
            if (mask >> t & 1U) {
                edges.push_back({free[t].b, free[t].a});
            } else {
                edges.push_back({free[t].a, free[t].b});
            }
        }
        if (!acyclic(n, edges)) continue;
        const Dag d(n, edges);
        if (vstructs(d) == target) members.push_back(edges);
    }
    return summarize(n, members);
}

}  // namespace

Pdag maximal_pdag(const Dag& g, const podag::WeakOrdering& rel) { return enumerate(g, &rel); }

Pdag cpdag(const Dag& g) { return enumerate(g, nullptr); }

Dag random_dag(int n, double p, podag::Rng& rng) {
    std::vector<Node> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<podag::Edge> edges;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (rng.bernoulli(p)) edges.push_back({order[a], order[b]});
        }
    }
    return Dag(n, edges);
}

Eigen::MatrixXd random_spd(int m, podag::Rng& rng) {
    Eigen::MatrixXd a(m, m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) a(r, c) = rng.normal();
    }
    return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(m, m);
}

}  // namespace oracle
