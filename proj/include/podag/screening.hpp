#pragma once

#include <optional>
#include <string>
#include <vector>

#include "podag/graph.hpp"
#include "podag/lasso.hpp"
#include "podag/rng.hpp"
#include "podag/stats.hpp"

namespace podag {

struct ScreenEntry {
    NodeSet s0;
    NodeSet s1;
    /// s0 ∩ s1
    NodeSet cross;
    /// s1 ∩ unordered(j)
    NodeSet cmb;
    bool lasso_nonconverged = false;
    /// |cross| exceeded the sample size.
    bool oversized = false;
};

/// Screening output for every node, tied to the pairwise ordering it was
/// computed under.
class ScreenSets {
public:
    ScreenSets() = default;
    explicit ScreenSets(WeakOrdering relation);

    int size() const { return relation_.size(); }
    const WeakOrdering& relation() const { return relation_; }
    const ScreenEntry& entry(Node j) const { return entries_.at(j); }
    ScreenEntry& mutable_entry(Node j) { return entries_.at(j); }

    /// Validates s0 ⊆ before(j), s1 ⊆ s0 ∪ unordered(j), j ∉ s1, and fills
    /// the derived sets.
    void set(Node j, NodeSet s0, NodeSet s1);

    const NodeSet& s0(Node j) const { return entry(j).s0; }
    const NodeSet& s1(Node j) const { return entry(j).s1; }
    const NodeSet& cross(Node j) const { return entry(j).cross; }
    const NodeSet& cmb(Node j) const { return entry(j).cmb; }
    const NodeSet& unordered(Node j) const { return unordered_.at(j); }

    /// {(k, j) : k ∈ cross(j)}, ascending by (j, k).
    std::vector<Edge> cross_candidates() const;
    /// Unordered pairs with a ∈ cmb(b) or b ∈ cmb(a).
    std::vector<NodePair> within_candidates() const;

private:
    WeakOrdering relation_;
    std::vector<NodeSet> unordered_;
    std::vector<ScreenEntry> entries_;
};

enum class ScreenBackend { kPcor, kSis, kLasso };

std::string backend_name(ScreenBackend b);
/// Throws ArgumentError on an unknown name.
ScreenBackend parse_backend(const std::string& name);

struct ScreenParams {
    ScreenBackend backend = ScreenBackend::kPcor;

    /// pcor: Fisher z level, used when no absolute threshold is set.
    double pcor_alpha = 0.5;
    std::optional<double> pcor_threshold;

    /// sis: keep the top ⌈tn⌉ by |corr| when set, otherwise keep marginal
    /// Fisher p-values below sis_alpha.
    std::optional<double> sis_t;
    double sis_alpha = 0.5;

    /// lasso: fixed penalties, or AIC over a log grid when unset.
    std::optional<double> lambda0;
    std::optional<double> lambda1;
    int lambda_grid_size = 50;
    double lambda_min_ratio = 0.01;
    bool standardize = true;

    /// Continue past per-node failures, leaving that node's sets empty.
    bool keep_going = false;

    void validate() const;
};

/// Per-node screens. `cov` must be the covariance of `d` where both are
/// passed; n is the sample size.
ScreenEntry screen_pcor(const CovMatrix& cov, int n, const WeakOrdering& rel, Node j,
                        const ScreenParams& params);
ScreenEntry screen_sis(const CovMatrix& cov, int n, const WeakOrdering& rel, Node j,
                       const ScreenParams& params);
ScreenEntry screen_lasso(const Dataset& d, const WeakOrdering& rel, Node j,
                         const ScreenParams& params);

struct ScreenReport {
    ScreenSets sets;
    /// Nodes whose screen failed under keep_going, with the message.
    std::vector<std::pair<Node, std::string>> failures;
};

/// Runs the chosen backend for every node.
ScreenReport screen_all(const Dataset& d, const WeakOrdering& rel, const ScreenParams& params);
/// Same, from a covariance alone (pcor and sis only).
ScreenReport screen_all(const CovMatrix& cov, int n, const WeakOrdering& rel,
                        const ScreenParams& params);

/// Screens defined by CI verdicts:
///   s0 = {k ∈ before(j) : k ⫫̸ j | before(j) \ k}
///   s1 = {z ∈ s0 ∪ U : z ⫫̸ j | (s0 ∪ U) \ z},  U = unordered(j).
ScreenSets screen_with_engine(CiEngine& engine, const WeakOrdering& rel);

/// Adds up to `extra` random nodes to each s0 (from before(j)) and then to
/// each s1 (from s0 ∪ unordered(j)).
ScreenSets inflate_screen(const ScreenSets& sets, int extra, Rng& rng);

}  // namespace podag
