#include "podag/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "podag/errors.hpp"

namespace podag {

ScreenSets::ScreenSets(WeakOrdering relation) : relation_(std::move(relation)) {
    const int n = relation_.size();
    entries_.resize(n);
    unordered_.resize(n);
    for (Node j = 0; j < n; ++j) unordered_[j] = relation_.unordered_with(j);
}

void ScreenSets::set(Node j, NodeSet s0, NodeSet s1) {
    s0 = make_node_set(std::move(s0));
    s1 = make_node_set(std::move(s1));
    const NodeSet& before = relation_.before(j);
    if (!set_difference(s0, before).empty()) {
        throw ArgumentError("s0 of node " + std::to_string(j) + " leaves its predecessors");
    }
    if (contains(s1, j)) throw ArgumentError("s1 of node " + std::to_string(j) + " contains j");
    if (!set_difference(s1, set_union(s0, unordered_[j])).empty()) {
        throw ArgumentError("s1 of node " + std::to_string(j) + " leaves s0 ∪ unordered(j)");
    }
    ScreenEntry& e = entries_.at(j);
    e.cross = set_intersection(s0, s1);
    e.cmb = set_intersection(s1, unordered_[j]);
    e.s0 = std::move(s0);
    e.s1 = std::move(s1);
}

std::vector<Edge> ScreenSets::cross_candidates() const {
    std::vector<Edge> out;
    for (Node j = 0; j < size(); ++j) {
        for (Node k : cross(j)) out.push_back({k, j});
    }
    return out;
}

std::vector<NodePair> ScreenSets::within_candidates() const {
    std::vector<NodePair> out;
    for (Node j = 0; j < size(); ++j) {
        for (Node k : cmb(j)) out.emplace_back(k, j);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string backend_name(ScreenBackend b) {
    switch (b) {
        case ScreenBackend::kPcor: return "pcor";
        case ScreenBackend::kSis: return "sis";
        case ScreenBackend::kLasso: return "lasso";
    }
    return "?";
}

ScreenBackend parse_backend(const std::string& name) {
    if (name == "pcor") return ScreenBackend::kPcor;
    if (name == "sis") return ScreenBackend::kSis;
    if (name == "lasso") return ScreenBackend::kLasso;
    throw ArgumentError("unknown screening backend '" + name + "'");
}

void ScreenParams::validate() const {
    if (!(pcor_alpha > 0.0 && pcor_alpha < 1.0)) throw ConfigError("pcor_alpha must lie in (0, 1)");
    if (pcor_threshold && !(*pcor_threshold >= 0.0)) throw ConfigError("pcor threshold < 0");
    if (sis_t && !(*sis_t > 0.0 && *sis_t < 1.0)) throw ConfigError("sis t must lie in (0, 1)");
    if (!(sis_alpha > 0.0 && sis_alpha < 1.0)) throw ConfigError("sis_alpha must lie in (0, 1)");
    if (lambda0 && !(*lambda0 > 0.0)) throw ConfigError("lambda0 must be positive");
    if (lambda1 && !(*lambda1 > 0.0)) throw ConfigError("lambda1 must be positive");
    if (lambda_grid_size < 1) throw ConfigError("lambda grid size must be positive");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio <= 1.0)) {
        throw ConfigError("lambda_min_ratio must lie in (0, 1]");
    }
}

namespace {

/// Members k of `pool` whose partial correlation with j given the rest of
/// pool passes the screen.
NodeSet pcor_keep(const CovMatrix& cov, int n, Node j, const NodeSet& pool,
                  const ScreenParams& params) {
    if (pool.empty()) return {};
    NodeSet block = pool;
    block.push_back(j);
    block = make_node_set(std::move(block));
    const Eigen::MatrixXd r = partial_correlations_given_rest(cov, block);
    const auto jpos = std::lower_bound(block.begin(), block.end(), j) - block.begin();
    const int cond = static_cast<int>(block.size()) - 2;
    NodeSet keep;
    for (std::size_t a = 0; a < block.size(); ++a) {
        if (static_cast<Eigen::Index>(a) == jpos) continue;
        const double rho = r(static_cast<Eigen::Index>(a), jpos);
        bool dependent;
        if (params.pcor_threshold) {
            dependent = std::abs(rho) > *params.pcor_threshold;
        } else {
            dependent = !fisher_z_verdict(rho, n, cond, params.pcor_alpha).independent;
        }
        if (dependent) keep.push_back(block[a]);
    }
    return keep;
}

NodeSet sis_keep(const CovMatrix& cov, int n, Node j, const NodeSet& pool,
                 const ScreenParams& params) {
    if (pool.empty()) return {};
    std::vector<std::pair<double, Node>> scored;
    for (Node k : pool) {
        const double c = cov(k, j) / std::sqrt(cov(k, k) * cov(j, j));
        scored.emplace_back(std::abs(std::clamp(c, -1.0, 1.0)), k);
    }
    NodeSet keep;
    if (params.sis_t) {
        const auto cap = static_cast<std::size_t>(std::ceil(*params.sis_t * n));
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t t = 0; t < scored.size() && t < cap; ++t) keep.push_back(scored[t].second);
    } else {
        for (const auto& [c, k] : scored) {
            if (!fisher_z_verdict(c, n, 0, params.sis_alpha).independent) keep.push_back(k);
        }
    }
    return make_node_set(std::move(keep));
}

Eigen::MatrixXd columns(const Dataset& d, const NodeSet& cols) {
    Eigen::MatrixXd x(d.n(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) x.col(static_cast<Eigen::Index>(c)) = d.data().col(cols[c]);
    return x;
}

NodeSet lasso_keep(const Dataset& d, Node j, const NodeSet& pool,
                   const std::optional<double>& lambda, const ScreenParams& params,
                   bool& nonconverged) {
    if (pool.empty()) return {};
    const Eigen::VectorXd y = d.data().col(j);
    const Eigen::MatrixXd x = columns(d, pool);
    LassoOptions opt;
    opt.standardize = params.standardize;
    LassoFit fit;
    if (lambda) {
        fit = lasso_fit(y, x, *lambda, opt);
        if (!fit.converged) nonconverged = true;
    } else {
        const auto grid =
            lasso_lambda_grid(y, x, params.lambda_grid_size, params.lambda_min_ratio, opt);
        fit = select_lambda_aic(y, x, grid, opt).fit;
    }
    NodeSet keep;
    for (Node a : fit.active_set) keep.push_back(pool[a]);
    return keep;
}

ScreenEntry finish(const WeakOrdering& rel, Node j, NodeSet s0, NodeSet s1, int n) {
    ScreenEntry e;
    e.s0 = make_node_set(std::move(s0));
    e.s1 = make_node_set(std::move(s1));
    e.cross = set_intersection(e.s0, e.s1);
    e.cmb = set_intersection(e.s1, rel.unordered_with(j));
    e.oversized = n > 0 && static_cast<int>(e.cross.size()) > n;
    return e;
}

void check_node(const WeakOrdering& rel, Node j) {
    if (j < 0 || j >= rel.size()) throw ArgumentError("screen target out of range");
}

}  // namespace

ScreenEntry screen_pcor(const CovMatrix& cov, int n, const WeakOrdering& rel, Node j,
                        const ScreenParams& params) {
    check_node(rel, j);
    NodeSet s0 = pcor_keep(cov, n, j, rel.before(j), params);
    NodeSet s1 = pcor_keep(cov, n, j, set_union(s0, rel.unordered_with(j)), params);
    return finish(rel, j, std::move(s0), std::move(s1), n);
}

ScreenEntry screen_sis(const CovMatrix& cov, int n, const WeakOrdering& rel, Node j,
                       const ScreenParams& params) {
    check_node(rel, j);
    NodeSet s0 = sis_keep(cov, n, j, rel.before(j), params);
    NodeSet s1 = sis_keep(cov, n, j, set_union(s0, rel.unordered_with(j)), params);
    return finish(rel, j, std::move(s0), std::move(s1), n);
}

ScreenEntry screen_lasso(const Dataset& d, const WeakOrdering& rel, Node j,
                         const ScreenParams& params) {
    check_node(rel, j);
    bool nonconverged = false;
    NodeSet s0 = lasso_keep(d, j, rel.before(j), params.lambda0, params, nonconverged);
    NodeSet s1 = lasso_keep(d, j, set_union(s0, rel.unordered_with(j)), params.lambda1, params,
                            nonconverged);
    ScreenEntry e = finish(rel, j, std::move(s0), std::move(s1), d.n());
    e.lasso_nonconverged = nonconverged;
    return e;
}

namespace {

template <class Fn>
ScreenReport screen_each(const WeakOrdering& rel, const ScreenParams& params, Fn&& fn) {
    params.validate();
    ScreenReport report{ScreenSets(rel), {}};
    for (Node j = 0; j < rel.size(); ++j) {
        try {
            ScreenEntry e = fn(j);
            const bool nc = e.lasso_nonconverged;
            const bool big = e.oversized;
            report.sets.set(j, std::move(e.s0), std::move(e.s1));
            report.sets.mutable_entry(j).lasso_nonconverged = nc;
            report.sets.mutable_entry(j).oversized = big;
        } catch (const Error& err) {
            if (!params.keep_going) throw;
            report.failures.emplace_back(j, err.what());
        }
    }
    return report;
}

}  // namespace

ScreenReport screen_all(const Dataset& d, const WeakOrdering& rel, const ScreenParams& params) {
    if (d.m() != rel.size()) throw LabelMismatchError("dataset and ordering sizes differ");
    if (params.backend == ScreenBackend::kLasso) {
        return screen_each(rel, params, [&](Node j) { return screen_lasso(d, rel, j, params); });
    }
    return screen_all(sample_covariance(d), d.n(), rel, params);
}

ScreenReport screen_all(const CovMatrix& cov, int n, const WeakOrdering& rel,
                        const ScreenParams& params) {
    if (cov.size() != rel.size()) throw LabelMismatchError("covariance and ordering sizes differ");
    switch (params.backend) {
        case ScreenBackend::kPcor:
            return screen_each(rel, params,
                               [&](Node j) { return screen_pcor(cov, n, rel, j, params); });
        case ScreenBackend::kSis:
            return screen_each(rel, params,
                               [&](Node j) { return screen_sis(cov, n, rel, j, params); });
        case ScreenBackend::kLasso:
            break;
    }
    throw ArgumentError("lasso screening needs the dataset, not only its covariance");
}

ScreenSets screen_with_engine(CiEngine& engine, const WeakOrdering& rel) {
    if (engine.num_nodes() != rel.size()) throw ArgumentError("engine and ordering sizes differ");
    ScreenSets sets(rel);
    for (Node j = 0; j < rel.size(); ++j) {
        const NodeSet& before = rel.before(j);
        NodeSet s0;
        for (Node k : before) {
            if (!engine.query(k, j, set_without(before, k)).independent) s0.push_back(k);
        }
        const NodeSet pool = set_union(s0, sets.unordered(j));
        NodeSet s1;
        for (Node z : pool) {
            if (!engine.query(z, j, set_without(pool, z)).independent) s1.push_back(z);
        }
        sets.set(j, std::move(s0), std::move(s1));
    }
    return sets;
}

ScreenSets inflate_screen(const ScreenSets& sets, int extra, Rng& rng) {
    if (extra < 0) throw ArgumentError("negative inflation");
    ScreenSets out(sets.relation());
    auto pick = [&](NodeSet pool) {
        rng.shuffle(pool);
        if (static_cast<int>(pool.size()) > extra) pool.resize(extra);
        return make_node_set(std::move(pool));
    };
    for (Node j = 0; j < sets.size(); ++j) {
        NodeSet s0 = set_union(sets.s0(j), pick(set_difference(sets.relation().before(j), sets.s0(j))));
        NodeSet pool1 = set_without(set_difference(set_union(s0, sets.unordered(j)), sets.s1(j)), j);
        NodeSet s1 = set_union(sets.s1(j), pick(std::move(pool1)));
        out.set(j, std::move(s0), std::move(s1));
        out.mutable_entry(j).lasso_nonconverged = sets.entry(j).lasso_nonconverged;
    }
    return out;
}

}  // namespace podag
