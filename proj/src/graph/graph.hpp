#pragma once

#include "core/population.hpp"
#include "core/random.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace moran {

enum class GraphKind : std::uint8_t {
    Complete,
    CycleDirected,
    CycleUndirected,
    Star,
    KRegular,
    ErdosRenyiStatic,
    ErdosRenyiPerStep,
};

enum class UpdateRule : std::uint8_t { BirthDeath, DeathBirth };

std::string_view to_string(GraphKind kind);
std::string_view to_string(UpdateRule rule);

struct GraphSpec {
    GraphKind kind = GraphKind::Complete;
    std::int64_t n_vertices = 0;
    std::int64_t k = 0;          // KRegular
    double p = 1.0;              // ErdosRenyi*
    std::uint64_t graph_seed = 0; // ErdosRenyiStatic

    friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

using Vertex = std::int32_t;

/// Directed topology without self-loops. Undirected kinds store both directions.
/// ErdosRenyiPerStep stores no edges: its neighbor sets are drawn per step.
class GraphTopology {
public:
    static GraphTopology build(const GraphSpec& spec);

    const GraphSpec& spec() const { return spec_; }
    std::int64_t size() const { return spec_.n_vertices; }
    bool per_step() const { return spec_.kind == GraphKind::ErdosRenyiPerStep; }

    const std::vector<Vertex>& out_neighbors(Vertex v) const { return out_[static_cast<std::size_t>(v)]; }
    const std::vector<Vertex>& in_neighbors(Vertex v) const { return in_[static_cast<std::size_t>(v)]; }
    std::size_t edge_count() const;

    /// One "u v" pair per line, sorted.
    std::string edge_list() const;

    /// Throws StructuralError if `rule` cannot run on this topology.
    void check_compatible(UpdateRule rule) const;

    /// Self-replacement is allowed when a birth-death parent has no outgoing neighbor.
    bool self_replacement_allowed() const;

private:
    explicit GraphTopology(GraphSpec spec);
    void add_edge(Vertex u, Vertex v);
    void add_undirected(Vertex u, Vertex v);

    GraphSpec spec_;
    std::vector<std::vector<Vertex>> out_;
    std::vector<std::vector<Vertex>> in_;
};

struct Layout {
    enum class Tag : std::uint8_t { SemicircleSplit, Alternating, RandomBalanced, CountsAtRandom, CenterA, CenterB };
    Tag tag = Tag::RandomBalanced;
    std::int64_t a = 0;      // CountsAtRandom; for CenterA/CenterB the total A count (0 = half)
    std::uint64_t seed = 0;  // RandomBalanced / CountsAtRandom / Center* leaf placement

    friend bool operator==(const Layout&, const Layout&) = default;
};

std::string_view to_string(Layout::Tag tag);

/// Topology plus vertex occupancy.
struct GraphPopulation {
    std::shared_ptr<const GraphTopology> topology;
    std::vector<Type> occupancy;

    PopulationState counts() const;
};

PopulationState occupancy_counts(const GraphPopulation& pop);

GraphPopulation initial_occupancy(std::shared_ptr<const GraphTopology> topology, const Layout& layout);

struct GraphStep {
    PopulationState pool;   // composition of the fitness-proportionate selection pool
    Type winner = Type::A;  // parent type
    Vertex parent = -1;
    Vertex victim = -1;     // equals parent on self-replacement
};

/// Birth-death: parent by fitness over all vertices, victim uniform among its out-neighbors.
GraphStep bd_step(GraphPopulation& pop, Fitness fitness, RandomStream& rng);

/// Death-birth: victim uniform over all vertices, parent by fitness among its in-neighbors.
GraphStep db_step(GraphPopulation& pop, Fitness fitness, RandomStream& rng);

} // namespace moran
