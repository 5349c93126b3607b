#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/pattern.hpp"
#include "kemeny/types.hpp"

#include <cstdint>
#include <string>

namespace kemeny {

enum class ChainKind { random_reversible, nearly_reducible, random_pattern_subset };

ChainKind parse_chain_kind(const std::string& name);
const char* to_string(ChainKind kind) noexcept;

struct GeneratedChain {
  ReversibleChain chain;
  /// Free pattern: the chain's pattern, except for random_pattern_subset,
  /// where it differs from it (the chain also has fixed entries off it).
  Pattern pattern;
};

struct GeneratorOptions {
  double density = 0.3;
  /// Off-block coupling for nearly_reducible.
  double coupling = 1e-6;
};

/// Deterministic per seed. random_reversible: random pi, random symmetric
/// pattern, random point of the reversible set on it. nearly_reducible: two
/// random stochastic diagonal blocks plus off-block coupling, made reversible
/// by Metropolis-Hastings toward its own stationary vector.
/// random_pattern_subset: as random_reversible, with extra entries on a second
/// random pattern held fixed. Patterns are redrawn when disconnected, up to
/// 100 attempts.
GeneratedChain generate_test_chain(ChainKind kind, Index n, std::uint64_t seed,
                                   const GeneratorOptions& opts = {});

}  // namespace kemeny
