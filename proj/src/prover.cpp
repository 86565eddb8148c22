#include "funmig/prover.hpp"

#include <algorithm>
#include <map>

namespace funmig {

namespace {

using Word = std::vector<std::string>;

struct Rule {
    Word from;
    Word to;
    std::string entity; // start entity of the matched subword
    int eq_index = -1;
    std::string label;
    bool forward = true;
};

struct VisitInfo {
    int depth = 0;
    Word parent;
    int rule = -1; // index into rules, -1 for the root
    int pos = 0;
};

using Visited = std::map<Word, VisitInfo>;

// Entity reached after the first i steps of w (all fks in a well-typed word).
std::string word_entity_at(const Schema& s, const std::string& start, const Word& w, size_t i) {
    std::string cur = start;
    for (size_t k = 0; k < i; ++k) {
        const FkDecl* f = s.find_fk(cur, w[k]);
        if (!f) return {};
        cur = f->dst;
    }
    return cur;
}

bool apply_rule_at(const Schema& s, const std::string& start, const Word& w, const Rule& r,
                   size_t pos, Word& out) {
    if (pos + r.from.size() > w.size()) return false;
    for (size_t k = 0; k < r.from.size(); ++k)
        if (w[pos + k] != r.from[k]) return false;
    if (word_entity_at(s, start, w, pos) != r.entity) return false;
    out.clear();
    out.reserve(w.size() - r.from.size() + r.to.size());
    out.insert(out.end(), w.begin(), w.begin() + pos);
    out.insert(out.end(), r.to.begin(), r.to.end());
    out.insert(out.end(), w.begin() + pos + r.from.size(), w.end());
    return true;
}

std::vector<Rule> build_rules(const Schema& s) {
    std::vector<Rule> rules;
    for (size_t i = 0; i < s.equations.size(); ++i) {
        const Equation& eq = s.equations[i];
        if (!try_type_of_path(s, eq.lhs) || !try_type_of_path(s, eq.rhs)) continue;
        Rule fwd{eq.lhs.steps, eq.rhs.steps, eq.lhs.start, static_cast<int>(i), eq.label, true};
        Rule bwd{eq.rhs.steps, eq.lhs.steps, eq.rhs.start, static_cast<int>(i), eq.label, false};
        rules.push_back(std::move(fwd));
        rules.push_back(std::move(bwd));
    }
    return rules;
}

std::vector<RewriteStep> chain_from_root(const Visited& visited, const Word& leaf,
                                         const std::vector<Rule>& rules) {
    // Root -> leaf, following parent pointers backwards.
    std::vector<RewriteStep> rev;
    Word cur = leaf;
    for (;;) {
        const VisitInfo& info = visited.at(cur);
        if (info.rule < 0) break;
        const Rule& r = rules[info.rule];
        RewriteStep step;
        step.eq_index = r.eq_index;
        step.eq_label = r.label;
        step.forward = r.forward;
        step.pos = info.pos;
        step.before = info.parent;
        step.after = cur;
        rev.push_back(std::move(step));
        cur = info.parent;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
}

ProofResult make_proof(const Visited& left, const Visited& right, const Word& meet,
                       const std::vector<Rule>& rules) {
    ProofResult res;
    res.verdict = Verdict::Provable;
    res.trace = chain_from_root(left, meet, rules);
    // Right side ran rhs -> meet; invert it to continue meet -> rhs.
    auto right_chain = chain_from_root(right, meet, rules);
    for (auto it = right_chain.rbegin(); it != right_chain.rend(); ++it) {
        RewriteStep inv;
        inv.eq_index = it->eq_index;
        inv.eq_label = it->eq_label;
        inv.forward = !it->forward;
        inv.pos = it->pos;
        inv.before = it->after;
        inv.after = it->before;
        res.trace.push_back(std::move(inv));
    }
    return res;
}

} // namespace

ProofResult decide_path_equality(const Schema& s, const Path& lhs, const Path& rhs,
                                 const ProverOptions& opts) {
    if (opts.depth_bound <= 0)
        throw EngineError(errc::PreconditionFailed, "depth_bound must be positive");
    PathType lt = type_of_path(s, lhs);
    PathType rt = type_of_path(s, rhs);
    if (lhs.start != rhs.start)
        throw EngineError(errc::TypeMismatch, "paths start at different entities: '" +
                                                  lhs.to_string() + "' vs '" + rhs.to_string() + "'");
    bool same_codomain = lt.is_attr == rt.is_attr &&
                         (lt.is_attr ? lt.type == rt.type : lt.entity == rt.entity);
    if (!same_codomain)
        throw EngineError(errc::TypeMismatch, "paths have different codomains: '" +
                                                  lhs.to_string() + "' vs '" + rhs.to_string() + "'");

    ProofResult res;
    if (lhs.steps == rhs.steps) {
        res.verdict = Verdict::Provable;
        return res;
    }

    std::vector<Rule> rules = build_rules(s);
    if (rules.empty()) return res;

    size_t longest_side = 0;
    for (const Rule& r : rules) longest_side = std::max(longest_side, r.from.size());
    size_t max_len = opts.max_word_len > 0
                         ? static_cast<size_t>(opts.max_word_len)
                         : std::max<size_t>(8, 2 * std::max({lhs.steps.size(), rhs.steps.size(),
                                                             longest_side}) +
                                                   4);

    const std::string& start = lhs.start;
    Visited visited[2];
    std::map<Word, VisitInfo> frontier[2];
    visited[0][lhs.steps] = VisitInfo{};
    visited[1][rhs.steps] = VisitInfo{};
    frontier[0][lhs.steps] = VisitInfo{};
    frontier[1][rhs.steps] = VisitInfo{};
    int levels[2] = {0, 0};
    size_t states = visited[0].size() + visited[1].size();

    while (levels[0] + levels[1] < opts.depth_bound && states < opts.max_states &&
           (!frontier[0].empty() || !frontier[1].empty())) {
        // Expand the smaller nonempty frontier one level.
        int side;
        if (frontier[0].empty()) side = 1;
        else if (frontier[1].empty()) side = 0;
        else side = frontier[0].size() <= frontier[1].size() ? 0 : 1;
        int other = 1 - side;

        std::map<Word, VisitInfo> next;
        for (const auto& [word, info] : frontier[side]) {
            Word out;
            for (size_t ri = 0; ri < rules.size(); ++ri) {
                const Rule& r = rules[ri];
                if (r.from.size() > word.size()) continue;
                size_t max_pos = word.size() - r.from.size();
                for (size_t pos = 0; pos <= max_pos; ++pos) {
                    if (!apply_rule_at(s, start, word, r, pos, out)) continue;
                    if (out.size() > max_len) continue;
                    if (visited[side].count(out)) continue;
                    VisitInfo vi{info.depth + 1, word, static_cast<int>(ri),
                                 static_cast<int>(pos)};
                    visited[side][out] = vi;
                    next[out] = vi;
                    ++states;
                    auto hit = visited[other].find(out);
                    if (hit != visited[other].end() &&
                        vi.depth + hit->second.depth <= opts.depth_bound)
                        return make_proof(visited[0], visited[1], out, rules);
                    if (states >= opts.max_states) break;
                }
                if (states >= opts.max_states) break;
            }
            if (states >= opts.max_states) break;
        }
        frontier[side] = std::move(next);
        ++levels[side];
    }
    return res;
}

ProofResult decide_path_equality(const Schema& s, const Path& lhs, const Path& rhs,
                                 int depth_bound) {
    ProverOptions opts;
    opts.depth_bound = depth_bound;
    return decide_path_equality(s, lhs, rhs, opts);
}

bool replay_trace(const Schema& s, const Path& lhs, const Path& rhs,
                  const std::vector<RewriteStep>& trace) {
    Word cur = lhs.steps;
    for (const RewriteStep& step : trace) {
        if (step.before != cur) return false;
        if (step.eq_index < 0 || step.eq_index >= static_cast<int>(s.equations.size()))
            return false;
        const Equation& eq = s.equations[step.eq_index];
        const Word& from = step.forward ? eq.lhs.steps : eq.rhs.steps;
        const Word& to = step.forward ? eq.rhs.steps : eq.lhs.steps;
        const std::string& entity = step.forward ? eq.lhs.start : eq.rhs.start;
        size_t pos = static_cast<size_t>(step.pos);
        if (pos + from.size() > cur.size()) return false;
        for (size_t k = 0; k < from.size(); ++k)
            if (cur[pos + k] != from[k]) return false;
        if (word_entity_at(s, lhs.start, cur, pos) != entity) return false;
        Word next;
        next.insert(next.end(), cur.begin(), cur.begin() + pos);
        next.insert(next.end(), to.begin(), to.end());
        next.insert(next.end(), cur.begin() + pos + from.size(), cur.end());
        if (next != step.after) return false;
        cur = std::move(next);
    }
    return cur == rhs.steps;
}

} // namespace funmig
