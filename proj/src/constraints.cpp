#include "mcagg/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "mcagg/errors.hpp"

namespace mcagg {

namespace {

PointPair ordered(PointIndex a, PointIndex b) { return a < b ? PointPair{a, b} : PointPair{b, a}; }

std::size_t rounded_count(double fraction, std::size_t total) {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
}

void check_fraction(double fraction, const char* what) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw InputError(std::string(what) + " must lie in [0, 1]");
}

std::string describe_clique(const std::vector<PointIndex>& members) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < members.size() && i < 8; ++i) os << (i ? ", " : "") << members[i];
    if (members.size() > 8) os << ", ...";
    os << '}';
    return os.str();
}

}  // namespace

void ConstraintSet::add_must(PointIndex a, PointIndex b) {
    if (a == b) throw InputError("self must-link on point " + std::to_string(a));
    const PointPair p = ordered(a, b);
    if (cannot_.contains(p))
        throw ContradictoryConstraints("pair (" + std::to_string(p.first) + ", " +
                                       std::to_string(p.second) + ") is both must- and cannot-linked");
    must_.insert(p);
}

void ConstraintSet::add_cannot(PointIndex a, PointIndex b) {
    if (a == b) throw InputError("self cannot-link on point " + std::to_string(a));
    const PointPair p = ordered(a, b);
    if (must_.contains(p))
        throw ContradictoryConstraints("pair (" + std::to_string(p.first) + ", " +
                                       std::to_string(p.second) + ") is both must- and cannot-linked");
    cannot_.insert(p);
}

std::size_t ConstraintSet::extent() const noexcept {
    std::size_t hi = 0;
    for (const auto& p : must_) hi = std::max(hi, p.second + 1);
    for (const auto& p : cannot_) hi = std::max(hi, p.second + 1);
    return hi;
}

std::vector<PointIndex> CliqueIndex::func_must(PointIndex x) const {
    if (options_.propagate_must) return members_.at(component_of_.at(x));
    std::vector<PointIndex> out = explicit_must_.at(x);
    out.push_back(x);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PointIndex> CliqueIndex::func_cannot(PointIndex x) const {
    std::vector<PointIndex> out;
    for (std::size_t c : cannot_adj_.at(component_of_.at(x)))
        out.insert(out.end(), members_[c].begin(), members_[c].end());
    std::sort(out.begin(), out.end());
    return out;
}

CliqueIndex propagate(const ConstraintSet& constraints, std::size_t num_points,
                      const PropagationOptions& options) {
    if (constraints.extent() > num_points)
        throw InputError("constraint references point " + std::to_string(constraints.extent() - 1) +
                         " but the dataset has " + std::to_string(num_points) + " points");
    CliqueIndex index;
    index.options_ = options;
    index.explicit_must_.assign(num_points, {});
    for (const auto& [a, b] : constraints.must()) {
        index.explicit_must_[a].push_back(b);
        index.explicit_must_[b].push_back(a);
    }
    for (auto& adj : index.explicit_must_) std::sort(adj.begin(), adj.end());

    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    index.component_of_.assign(num_points, unvisited);
    std::vector<PointIndex> stack;
    for (PointIndex start = 0; start < num_points; ++start) {
        if (index.component_of_[start] != unvisited) continue;
        const std::size_t id = index.members_.size();
        index.members_.emplace_back();
        stack.push_back(start);
        index.component_of_[start] = id;
        while (!stack.empty()) {
            const PointIndex v = stack.back();
            stack.pop_back();
            index.members_[id].push_back(v);
            for (PointIndex w : index.explicit_must_[v]) {
                if (index.component_of_[w] != unvisited) continue;
                index.component_of_[w] = id;
                stack.push_back(w);
            }
        }
        std::sort(index.members_[id].begin(), index.members_[id].end());
    }

    index.cannot_adj_.assign(index.members_.size(), {});
    if (options.use_cannot) {
        for (const auto& [a, b] : constraints.cannot()) {
            const std::size_t ca = index.component_of_[a];
            const std::size_t cb = index.component_of_[b];
            if (ca == cb)
                throw ContradictoryConstraints(
                    ca, cb,
                    "cannot-link (" + std::to_string(a) + ", " + std::to_string(b) +
                        ") pairs must-link clique " + std::to_string(ca) + " " +
                        describe_clique(index.members_[ca]) + " with itself");
            index.cannot_adj_[ca].push_back(cb);
            index.cannot_adj_[cb].push_back(ca);
        }
        for (auto& adj : index.cannot_adj_) {
            std::sort(adj.begin(), adj.end());
            adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        }
    }
    return index;
}

ConstraintSet from_labels(const LabelMap& labeled) {
    ConstraintSet cs;
    for (auto it = labeled.begin(); it != labeled.end(); ++it) {
        for (auto jt = std::next(it); jt != labeled.end(); ++jt) {
            if (it->second == jt->second) {
                cs.add_must(it->first, jt->first);
            } else {
                cs.add_cannot(it->first, jt->first);
            }
        }
    }
    return cs;
}

LabelMap corrupt_labels(const LabelMap& labeled, double fraction, int num_classes,
                        std::uint64_t seed) {
    check_fraction(fraction, "noise fraction");
    const std::size_t count = rounded_count(fraction, labeled.size());
    if (count == 0) return labeled;
    if (num_classes < 2)
        throw NoIncorrectLabelAvailable("cannot draw an incorrect label with a single class");

    std::mt19937_64 rng(seed);
    std::vector<PointIndex> keys;
    keys.reserve(labeled.size());
    for (const auto& [point, label] : labeled) keys.push_back(point);
    std::shuffle(keys.begin(), keys.end(), rng);

    LabelMap out = labeled;
    std::uniform_int_distribution<int> other(0, num_classes - 2);
    for (std::size_t i = 0; i < count; ++i) {
        int& label = out[keys[i]];
        const int draw = other(rng);
        label = draw >= label ? draw + 1 : draw;
    }
    return out;
}

std::vector<std::pair<int, int>> qualifying_class_pairs(const std::vector<int>& labels) {
    const int classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::size_t> sizes(static_cast<std::size_t>(classes), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < classes; ++a)
        for (int b = a + 1; b < classes; ++b)
            if (10 * (sizes[static_cast<std::size_t>(a)] + sizes[static_cast<std::size_t>(b)]) >=
                3 * labels.size())
                out.emplace_back(a, b);
    return out;
}

LabelMap sample_side_info(const std::vector<int>& labels, double fraction, SideInfoMode mode,
                          std::uint64_t seed) {
    check_fraction(fraction, "labelled fraction");
    std::mt19937_64 rng(seed);
    std::vector<PointIndex> pool;
    if (mode == SideInfoMode::AllClasses) {
        pool.resize(labels.size());
        std::iota(pool.begin(), pool.end(), PointIndex{0});
    } else {
        const auto pairs = qualifying_class_pairs(labels);
        if (pairs.empty())
            throw InfeasibleSideInfo("no pair of classes covers at least 30% of the points");
        std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
        const auto [c1, c2] = pairs[pick(rng)];
        for (PointIndex i = 0; i < labels.size(); ++i)
            if (labels[i] == c1 || labels[i] == c2) pool.push_back(i);
    }
    const std::size_t count = rounded_count(fraction, pool.size());
    std::shuffle(pool.begin(), pool.end(), rng);
    LabelMap out;
    for (std::size_t i = 0; i < count; ++i) out.emplace(pool[i], labels[pool[i]]);
    return out;
}

ConstraintSet sample_pairwise(const std::vector<int>& labels, double ratio, std::uint64_t seed) {
    if (!(ratio >= 0.0)) throw InputError("constraint ratio must be non-negative");
    const std::uint64_t n = labels.size();
    const std::uint64_t total = n * (n - 1) / 2;
    const std::uint64_t count = std::min<std::uint64_t>(rounded_count(ratio, labels.size()), total);

    // Floyd's sampling of `count` distinct pair ranks out of `total`.
    std::mt19937_64 rng(seed);
    std::set<std::uint64_t> ranks;
    for (std::uint64_t j = total - count; j < total; ++j) {
        const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
        if (!ranks.insert(t).second) ranks.insert(j);
    }

    ConstraintSet cs;
    std::uint64_t row_start = 0;
    PointIndex i = 0;
    for (std::uint64_t rank : ranks) {
        while (rank >= row_start + (n - 1 - i)) {
            row_start += n - 1 - i;
            ++i;
        }
        const PointIndex j = i + 1 + (rank - row_start);
        if (labels[i] == labels[j]) {
            cs.add_must(i, j);
        } else {
            cs.add_cannot(i, j);
        }
    }
    return cs;
}

ColoringResult greedy_coloring(const CliqueIndex& index, int K, std::uint64_t seed) {
    if (K < 1) throw InputError("number of clusters must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> any_color(0, K - 1);

    ColoringResult out;
    out.partition = Partition{std::vector<ClusterId>(index.num_points(), 0), K};
    std::vector<ClusterId> color(index.num_cliques(), 0);
    std::vector<std::size_t> blocked(static_cast<std::size_t>(K));
    for (std::size_t c = 0; c < index.num_cliques(); ++c) {
        const auto& adj = index.cannot_adjacent(c);
        if (adj.empty()) {
            color[c] = any_color(rng);
        } else {
            std::fill(blocked.begin(), blocked.end(), 0);
            for (std::size_t other : adj)
                if (other < c) ++blocked[static_cast<std::size_t>(color[other])];
            const auto free = std::find(blocked.begin(), blocked.end(), std::size_t{0});
            if (free != blocked.end()) {
                color[c] = static_cast<ClusterId>(free - blocked.begin());
            } else {
                color[c] = static_cast<ClusterId>(std::min_element(blocked.begin(), blocked.end()) -
                                                  blocked.begin());
                ++out.fallbacks;
            }
        }
        for (PointIndex p : index.members(c)) out.partition.assign[p] = color[c];
    }
    return out;
}

ViolationCount violations(const Partition& g, const ConstraintSet& constraints) {
    ViolationCount v;
    for (const auto& [a, b] : constraints.must())
        if (g[a] != g[b]) ++v.must;
    for (const auto& [a, b] : constraints.cannot())
        if (g[a] == g[b]) ++v.cannot;
    return v;
}

ConstraintSet read_constraints(std::istream& in) {
    ConstraintSet cs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string tag;
        if (!(fields >> tag)) continue;
        long long a = -1;
        long long b = -1;
        if (!(fields >> a)) throw ParseError(line_no, 2, "expected a point index");
        if (!(fields >> b)) throw ParseError(line_no, 3, "expected a point index");
        if (a < 0 || b < 0) throw ParseError(line_no, a < 0 ? 2 : 3, "negative point index");
        std::string extra;
        if (fields >> extra) throw ParseError(line_no, 4, "unexpected trailing field '" + extra + "'");
        if (tag == "ML" || tag == "ml") {
            cs.add_must(static_cast<PointIndex>(a), static_cast<PointIndex>(b));
        } else if (tag == "CL" || tag == "cl") {
            cs.add_cannot(static_cast<PointIndex>(a), static_cast<PointIndex>(b));
        } else {
            throw ParseError(line_no, 1, "unknown constraint kind '" + tag + "' (expected ML or CL)");
        }
    }
    return cs;
}

ConstraintSet read_constraint_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return read_constraints(in);
}

void write_constraints(const ConstraintSet& constraints, std::ostream& out) {
    for (const auto& [a, b] : constraints.must()) out << "ML " << a << ' ' << b << '\n';
    for (const auto& [a, b] : constraints.cannot()) out << "CL " << a << ' ' << b << '\n';
}

void write_constraint_file(const ConstraintSet& constraints, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_constraints(constraints, out);
}

}  // namespace mcagg
