#pragma once

#include <string>
#include <vector>

#include "funmig/schema.hpp"

namespace funmig {

enum class Verdict { Provable, NotProvableWithinBound };

// One rewrite application in a proof trace: `before` at offset `pos`
// had one side of equation `eq_index` replaced by the other, giving
// `after`. `forward` means lhs-side was replaced by rhs-side.
struct RewriteStep {
    int eq_index = -1;
    std::string eq_label;
    bool forward = true;
    int pos = 0;
    std::vector<std::string> before;
    std::vector<std::string> after;
};

struct ProofResult {
    Verdict verdict = Verdict::NotProvableWithinBound;
    // For Provable: replays lhs into rhs using only schema equations
    // (either direction) plus associativity/identity.
    std::vector<RewriteStep> trace;

    bool provable() const { return verdict == Verdict::Provable; }
};

struct ProverOptions {
    // Counts rewrite applications along the found chain.
    int depth_bound = 64;
    // Words longer than this are pruned from the search. 0 = derive from
    // the inputs (sound either way; only completeness is affected).
    int max_word_len = 0;
    // Hard cap on stored search states.
    size_t max_states = 200000;
};

inline constexpr int kDefaultDepthBound = 64;

// Bounded bidirectional breadth-first search over subpath rewriting,
// using the schema's equations in both orientations. Sound, incomplete,
// deterministic; never claims inequality. Throws EngineError(TypeMismatch)
// when lhs/rhs are ill-typed or their endpoints disagree.
ProofResult decide_path_equality(const Schema& s, const Path& lhs, const Path& rhs,
                                 const ProverOptions& opts = {});

ProofResult decide_path_equality(const Schema& s, const Path& lhs, const Path& rhs,
                                 int depth_bound);

// Re-applies the trace to lhs and checks the result equals rhs.
// Used by tests to certify Provable results independently.
bool replay_trace(const Schema& s, const Path& lhs, const Path& rhs,
                  const std::vector<RewriteStep>& trace);

} // namespace funmig
