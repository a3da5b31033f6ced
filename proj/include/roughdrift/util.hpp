#pragma once

// Small shared utilities: error categories, deterministic number formatting,
// and a fixed-partition parallel loop.  Everything here is deliberately
// dependency-free so the rest of the library can include it without cost.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace rd {

/// A computed object violates one of its structural invariants (e.g. a
/// two-parameter field with a non-vanishing diagonal, or an iterated
/// integral whose additivity defect exceeds the declared tolerance).
class IntegrityError : public std::runtime_error {
public:
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative scheme exhausted its budget without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest decimal representation that round-trips a double exactly
/// (printf "%.17g").  All CSV/JSON output funnels through this so that a
/// fixed seed reproduces byte-identical files.
std::string format_g17(double v);

/// Resolve the worker count: an explicit positive request wins, otherwise
/// the ROUGHDRIFT_THREADS environment variable, otherwise 1.
int resolve_threads(int requested);

/// Run fn(i) for i in [0, n) split into contiguous blocks over `threads`
/// workers.  The block boundaries depend only on (n, threads), never on
/// scheduling, so any reduction done per-block stays deterministic.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// 64-bit FNV-1a over a byte string; used to fingerprint configs in run
/// summaries.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace rd
