#pragma once
/**
 * @file neighbors.hpp
 * @brief Candidate pools for the four solvers.
 *
 *   Original    every other particle                       O(N) per particle
 *   RBM{p}      mates in a random batch of size <= p        O(p)
 *   ShortForce  particles in the 3x3 block of cells of side r_c around the particle
 *   Hybrid      union of the RBM and ShortForce pools
 *
 * Pools are sorted by ascending particle index so that every solver sums
 * pair contributions in the same order; with p = N (or one cell covering the
 * scene) the reduced solvers reproduce the Original forces bit for bit.
 * Obstacles are not part of any pool: perception always sees all of them.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <variant>
#include <vector>

#include "crowdsim/params.hpp"
#include "crowdsim/rng.hpp"
#include "crowdsim/vec2.hpp"

namespace crowdsim {

namespace solver {
struct Original {
    bool operator==(const Original&) const = default;
};
struct RBM {
    int p = 2;
    bool operator==(const RBM&) const = default;
};
struct ShortForce {
    double r_c = 4.0;
    bool operator==(const ShortForce&) const = default;
};
struct Hybrid {
    int p = 2;
    double r_c = 4.0;
    bool operator==(const Hybrid&) const = default;
};
}  // namespace solver

using SolverKind = std::variant<solver::Original, solver::RBM, solver::ShortForce, solver::Hybrid>;

inline std::string solver_name(const SolverKind& k) {
    switch (k.index()) {
        case 0: return "original";
        case 1: return "rbm";
        case 2: return "short";
        default: return "hybrid";
    }
}

inline void validate_solver(const SolverKind& k) {
    if (const auto* r = std::get_if<solver::RBM>(&k)) {
        if (r->p < 2) throw ValidationError("rbm batch size p must be >= 2");
    } else if (const auto* s = std::get_if<solver::ShortForce>(&k)) {
        if (!(s->r_c > 0.0) || !std::isfinite(s->r_c)) throw ValidationError("r_c must be > 0");
    } else if (const auto* h = std::get_if<solver::Hybrid>(&k)) {
        if (h->p < 1) throw ValidationError("hybrid batch size p must be >= 1");
        if (!(h->r_c > 0.0) || !std::isfinite(h->r_c)) throw ValidationError("r_c must be > 0");
    }
}

/// Random division of {0..n-1} into consecutive blocks of a shuffled permutation.
struct BatchPartition {
    std::size_t batch_size = 1;
    std::vector<std::size_t> order;     ///< shuffled permutation of particle indices
    std::vector<std::size_t> batch_of;  ///< particle -> batch id

    std::size_t batch_count() const {
        return batch_size == 0 ? 0 : (order.size() + batch_size - 1) / batch_size;
    }

    /// Members of batch b in ascending index order.
    std::vector<std::size_t> members(std::size_t b) const {
        const std::size_t lo = b * batch_size;
        const std::size_t hi = std::min(order.size(), lo + batch_size);
        std::vector<std::size_t> m(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                   order.begin() + static_cast<std::ptrdiff_t>(hi));
        std::sort(m.begin(), m.end());
        return m;
    }
};

/// Fisher-Yates shuffle driven by `rng`, then chunking into blocks of p.
inline BatchPartition shuffle_batches(std::size_t n, std::size_t p, CounterRng& rng) {
    BatchPartition part;
    part.batch_size = std::max<std::size_t>(p, 1);
    part.order.resize(n);
    std::iota(part.order.begin(), part.order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(part.order[i - 1], part.order[j]);
    }
    part.batch_of.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) part.batch_of[part.order[k]] = k / part.batch_size;
    return part;
}

struct CellKey {
    std::int64_t cx = 0;
    std::int64_t cy = 0;
    bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const noexcept {
        return static_cast<std::size_t>(
            mix64(static_cast<std::uint64_t>(k.cx) * 0x9E3779B97F4A7C15ULL ^
                  static_cast<std::uint64_t>(k.cy)));
    }
};

/// Uniform grid of square cells; each particle is listed in exactly one cell.
struct CellGrid {
    Vec2 origin;
    double cell_size = 1.0;
    std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> occupancy;
    std::vector<CellKey> cell_of_particle;

    CellKey cell_of(const Vec2& p) const {
        return {static_cast<std::int64_t>(std::floor((p.x - origin.x) / cell_size)),
                static_cast<std::int64_t>(std::floor((p.y - origin.y) / cell_size))};
    }

    const std::vector<std::size_t>* cell(const CellKey& k) const {
        auto it = occupancy.find(k);
        return it == occupancy.end() ? nullptr : &it->second;
    }

    /// Appends all particles of the 3x3 block around cell k (unsorted).
    void gather_moore(const CellKey& k, std::vector<std::size_t>& out) const {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                if (const auto* c = cell({k.cx + dx, k.cy + dy})) out.insert(out.end(), c->begin(), c->end());
            }
        }
    }
};

inline CellGrid build_grid(std::span<const Vec2> positions, double r_c, Vec2 origin = {}) {
    if (!(r_c > 0.0)) throw ValidationError("cell size must be > 0");
    CellGrid g;
    g.origin = origin;
    g.cell_size = r_c;
    g.cell_of_particle.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const CellKey k = g.cell_of(positions[i]);
        g.cell_of_particle.push_back(k);
        g.occupancy[k].push_back(i);  // ascending by construction
    }
    return g;
}

/**
 * Per-step neighbour structures for one solver: the batch partition and/or the
 * cell grid, frozen for the whole step.
 */
class NeighborContext {
public:
    NeighborContext(const SolverKind& kind, std::span<const Vec2> positions, CounterRng& rng)
        : kind_(kind), n_(positions.size()) {
        std::visit(
            [&](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, solver::RBM>) {
                    partition_ = shuffle_batches(n_, static_cast<std::size_t>(k.p), rng);
                } else if constexpr (std::is_same_v<K, solver::ShortForce>) {
                    grid_ = build_grid(positions, k.r_c);
                } else if constexpr (std::is_same_v<K, solver::Hybrid>) {
                    partition_ = shuffle_batches(n_, static_cast<std::size_t>(k.p), rng);
                    grid_ = build_grid(positions, k.r_c);
                }
            },
            kind_);
        if (partition_) {
            batches_.reserve(partition_->batch_count());
            for (std::size_t b = 0; b < partition_->batch_count(); ++b) batches_.push_back(partition_->members(b));
        }
    }

    const std::optional<BatchPartition>& partition() const { return partition_; }
    const std::optional<CellGrid>& grid() const { return grid_; }

    /// Candidate particles of i, ascending, never containing i.
    void pool(std::size_t i, std::vector<std::size_t>& out) const {
        out.clear();
        if (!partition_ && !grid_) {
            if (n_ > 0) out.reserve(n_ - 1);
            for (std::size_t j = 0; j < n_; ++j)
                if (j != i) out.push_back(j);
            return;
        }
        if (partition_) {
            const auto& mates = batches_[partition_->batch_of[i]];
            out.insert(out.end(), mates.begin(), mates.end());
        }
        if (grid_) grid_->gather_moore(grid_->cell_of_particle[i], out);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        out.erase(std::remove(out.begin(), out.end(), i), out.end());
    }

    std::vector<std::size_t> pool(std::size_t i) const {
        std::vector<std::size_t> out;
        pool(i, out);
        return out;
    }

private:
    SolverKind kind_;
    std::size_t n_ = 0;
    std::optional<BatchPartition> partition_;
    std::optional<CellGrid> grid_;
    std::vector<std::vector<std::size_t>> batches_;
};

/// Candidate pool of i given explicitly built structures (null when unused by `kind`).
inline std::vector<std::size_t> candidate_pool(std::size_t i, std::size_t n, const SolverKind& kind,
                                               const BatchPartition* partition,
                                               const CellGrid* grid) {
    std::vector<std::size_t> out;
    const bool use_batch = std::holds_alternative<solver::RBM>(kind) || std::holds_alternative<solver::Hybrid>(kind);
    const bool use_grid = std::holds_alternative<solver::ShortForce>(kind) || std::holds_alternative<solver::Hybrid>(kind);
    if (!use_batch && !use_grid) {
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) out.push_back(j);
        return out;
    }
    if (use_batch) {
        if (!partition) throw std::invalid_argument("candidate_pool: solver needs a batch partition");
        const auto mates = partition->members(partition->batch_of[i]);
        out.insert(out.end(), mates.begin(), mates.end());
    }
    if (use_grid) {
        if (!grid) throw std::invalid_argument("candidate_pool: solver needs a cell grid");
        grid->gather_moore(grid->cell_of_particle[i], out);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.erase(std::remove(out.begin(), out.end(), i), out.end());
    return out;
}

}  // namespace crowdsim
