#include "graph/graph.hpp"

#include "core/errors.hpp"
#include "core/process.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>
#include <utility>

namespace moran {

std::string_view to_string(GraphKind kind)
{
    switch (kind) {
    case GraphKind::Complete: return "complete";
    case GraphKind::CycleDirected: return "directed-cycle";
    case GraphKind::CycleUndirected: return "cycle";
    case GraphKind::Star: return "star";
    case GraphKind::KRegular: return "k-regular";
    case GraphKind::ErdosRenyiStatic: return "er-static";
    case GraphKind::ErdosRenyiPerStep: return "er-per-step";
    }
    return "unknown";
}

std::string_view to_string(UpdateRule rule)
{
    return rule == UpdateRule::BirthDeath ? "bd" : "db";
}

std::string_view to_string(Layout::Tag tag)
{
    switch (tag) {
    case Layout::Tag::SemicircleSplit: return "semicircle";
    case Layout::Tag::Alternating: return "alternating";
    case Layout::Tag::RandomBalanced: return "random-balanced";
    case Layout::Tag::CountsAtRandom: return "counts-at-random";
    case Layout::Tag::CenterA: return "center-a";
    case Layout::Tag::CenterB: return "center-b";
    }
    return "unknown";
}

GraphTopology::GraphTopology(GraphSpec spec)
    : spec_(spec), out_(static_cast<std::size_t>(spec.n_vertices)), in_(static_cast<std::size_t>(spec.n_vertices))
{
}

void GraphTopology::add_edge(Vertex u, Vertex v)
{
    out_[static_cast<std::size_t>(u)].push_back(v);
    in_[static_cast<std::size_t>(v)].push_back(u);
}

void GraphTopology::add_undirected(Vertex u, Vertex v)
{
    add_edge(u, v);
    add_edge(v, u);
}

GraphTopology GraphTopology::build(const GraphSpec& spec)
{
    const auto n = spec.n_vertices;
    if (n < kMinPopulation)
        throw DomainError(fmt::format("graph needs at least {} vertices, got {}", kMinPopulation, n));
    if (n > std::numeric_limits<Vertex>::max())
        throw DomainError("graph too large");

    GraphTopology g(spec);
    const auto nv = static_cast<Vertex>(n);
    switch (spec.kind) {
    case GraphKind::Complete:
        for (Vertex u = 0; u < nv; ++u)
            for (Vertex v = 0; v < nv; ++v)
                if (u != v)
                    g.add_edge(u, v);
        break;
    case GraphKind::CycleDirected:
        for (Vertex u = 0; u < nv; ++u)
            g.add_edge(u, (u + 1) % nv);
        break;
    case GraphKind::CycleUndirected:
        for (Vertex u = 0; u < nv; ++u)
            g.add_undirected(u, (u + 1) % nv);
        break;
    case GraphKind::Star:
        for (Vertex v = 1; v < nv; ++v)
            g.add_undirected(0, v);
        break;
    case GraphKind::KRegular: {
        const auto k = spec.k;
        if (k < 1 || k >= n)
            throw DomainError(fmt::format("k-regular graph infeasible for n={}, k={}", n, k));
        if (k % 2 == 0) {
            // Undirected circulant: i ~ i +- 1, ..., i +- k/2.
            for (Vertex u = 0; u < nv; ++u)
                for (std::int64_t off = 1; off <= k / 2; ++off)
                    g.add_edge(u, static_cast<Vertex>((u + off) % n)), g.add_edge(u, static_cast<Vertex>((u - off + n) % n));
        } else {
            // Directed circulant: i -> i+1, ..., i+k.
            for (Vertex u = 0; u < nv; ++u)
                for (std::int64_t off = 1; off <= k; ++off)
                    g.add_edge(u, static_cast<Vertex>((u + off) % n));
        }
        break;
    }
    case GraphKind::ErdosRenyiStatic: {
        if (!(spec.p >= 0.0 && spec.p <= 1.0))
            throw DomainError("Erdos-Renyi edge probability must lie in [0, 1]");
        RandomStream rng(spec.graph_seed);
        for (Vertex u = 0; u < nv; ++u)
            for (Vertex v = u + 1; v < nv; ++v)
                if (rng.bernoulli(spec.p))
                    g.add_undirected(u, v);
        break;
    }
    case GraphKind::ErdosRenyiPerStep:
        if (!(spec.p > 0.0 && spec.p <= 1.0))
            throw DomainError("per-step Erdos-Renyi edge probability must lie in (0, 1]");
        break;
    }
    for (auto& list : g.out_)
        std::sort(list.begin(), list.end());
    for (auto& list : g.in_)
        std::sort(list.begin(), list.end());
    return g;
}

std::size_t GraphTopology::edge_count() const
{
    std::size_t total = 0;
    for (const auto& list : out_)
        total += list.size();
    return total;
}

std::string GraphTopology::edge_list() const
{
    if (per_step())
        throw StructuralError("per-step random graph has no fixed edge list");
    std::string text;
    for (std::size_t u = 0; u < out_.size(); ++u)
        for (Vertex v : out_[u])
            text += fmt::format("{} {}\n", u, v);
    return text;
}

bool GraphTopology::self_replacement_allowed() const
{
    return spec_.kind == GraphKind::ErdosRenyiStatic || spec_.kind == GraphKind::ErdosRenyiPerStep;
}

void GraphTopology::check_compatible(UpdateRule rule) const
{
    if (rule == UpdateRule::BirthDeath) {
        if (self_replacement_allowed())
            return;
        for (std::size_t v = 0; v < out_.size(); ++v)
            if (out_[v].empty())
                throw StructuralError(fmt::format("vertex {} has no outgoing neighbor for birth-death updating", v));
        return;
    }
    if (per_step() && spec_.p < 1.0)
        throw StructuralError("death-birth updating needs a guaranteed inbound neighbor; per-step random graphs "
                              "with p < 1 cannot provide one");
    if (per_step())
        return;
    for (std::size_t v = 0; v < in_.size(); ++v)
        if (in_[v].empty())
            throw StructuralError(fmt::format("vertex {} has no incoming neighbor for death-birth updating", v));
}

PopulationState GraphPopulation::counts() const
{
    PopulationState s;
    for (Type t : occupancy)
        (t == Type::A ? s.a : s.b) += 1;
    return s;
}

PopulationState occupancy_counts(const GraphPopulation& pop)
{
    return pop.counts();
}

namespace {

std::vector<Type> random_occupancy(std::int64_t n, std::int64_t a, std::uint64_t seed)
{
    if (a < 0 || a > n)
        throw DomainError(fmt::format("cannot place {} A vertices on {} vertices", a, n));
    std::vector<Type> occ(static_cast<std::size_t>(n), Type::B);
    std::fill_n(occ.begin(), a, Type::A);
    RandomStream rng(seed);
    for (std::size_t i = occ.size(); i > 1; --i)
        std::swap(occ[i - 1], occ[rng.below(i)]);
    return occ;
}

bool has_ring_order(GraphKind kind)
{
    return kind == GraphKind::CycleDirected || kind == GraphKind::CycleUndirected || kind == GraphKind::KRegular;
}

} // namespace

GraphPopulation initial_occupancy(std::shared_ptr<const GraphTopology> topology, const Layout& layout)
{
    if (!topology)
        throw DomainError("initial_occupancy: null topology");
    const auto n = topology->size();
    const auto kind = topology->spec().kind;
    GraphPopulation pop{std::move(topology), {}};

    switch (layout.tag) {
    case Layout::Tag::SemicircleSplit:
    case Layout::Tag::Alternating:
        if (!has_ring_order(kind))
            throw StructuralError(fmt::format("layout '{}' needs a cycle-ordered graph, got '{}'", to_string(layout.tag),
                                              to_string(kind)));
        pop.occupancy.resize(static_cast<std::size_t>(n));
        for (std::int64_t v = 0; v < n; ++v) {
            const bool is_a = layout.tag == Layout::Tag::SemicircleSplit ? v < n / 2 : v % 2 == 0;
            pop.occupancy[static_cast<std::size_t>(v)] = is_a ? Type::A : Type::B;
        }
        break;
    case Layout::Tag::RandomBalanced:
        pop.occupancy = random_occupancy(n, n / 2, layout.seed);
        break;
    case Layout::Tag::CountsAtRandom:
        pop.occupancy = random_occupancy(n, layout.a, layout.seed);
        break;
    case Layout::Tag::CenterA:
    case Layout::Tag::CenterB: {
        if (kind != GraphKind::Star)
            throw StructuralError("center layouts need a star graph");
        const auto a = layout.a == 0 ? n / 2 : layout.a;
        const Type center = layout.tag == Layout::Tag::CenterA ? Type::A : Type::B;
        const auto leaves_a = center == Type::A ? a - 1 : a;
        if (leaves_a < 0 || leaves_a > n - 1)
            throw DomainError(fmt::format("cannot place {} A vertices with a {} center on a star of {}", a,
                                          type_char(center), n));
        pop.occupancy.assign(static_cast<std::size_t>(n), Type::B);
        pop.occupancy[0] = center;
        for (std::int64_t v = 1; v <= leaves_a; ++v)
            pop.occupancy[static_cast<std::size_t>(v)] = Type::A;
        break;
    }
    }
    return pop;
}

namespace {

Vertex pick_vertex_of_type(const std::vector<Type>& occ, Type t, std::int64_t count, RandomStream& rng)
{
    auto target = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(count)));
    for (std::size_t v = 0; v < occ.size(); ++v)
        if (occ[v] == t && target-- == 0)
            return static_cast<Vertex>(v);
    throw DomainError("occupancy tally out of sync");
}

void require_unfixated(PopulationState s)
{
    if (s.absorbing())
        throw DomainError(fmt::format("graph population is fixated at ({}, {})", s.a, s.b));
}

} // namespace

GraphStep bd_step(GraphPopulation& pop, Fitness fitness, RandomStream& rng)
{
    const auto counts = pop.counts();
    require_unfixated(counts);
    const auto& g = *pop.topology;

    GraphStep step;
    step.pool = counts;
    step.winner = rng.bernoulli(birth_probabilities(counts, fitness).p_A) ? Type::A : Type::B;
    step.parent = pick_vertex_of_type(pop.occupancy, step.winner, counts.count(step.winner), rng);

    if (g.per_step()) {
        std::vector<Vertex> included;
        for (Vertex w = 0; w < static_cast<Vertex>(g.size()); ++w)
            if (w != step.parent && rng.bernoulli(g.spec().p))
                included.push_back(w);
        step.victim = included.empty() ? step.parent : included[rng.below(included.size())];
    } else {
        const auto& out = g.out_neighbors(step.parent);
        if (out.empty()) {
            if (!g.self_replacement_allowed())
                throw StructuralError(fmt::format("vertex {} has no outgoing neighbor", step.parent));
            step.victim = step.parent;
        } else {
            step.victim = out[rng.below(out.size())];
        }
    }
    pop.occupancy[static_cast<std::size_t>(step.victim)] = step.winner;
    return step;
}

GraphStep db_step(GraphPopulation& pop, Fitness fitness, RandomStream& rng)
{
    require_unfixated(pop.counts());
    const auto& g = *pop.topology;

    GraphStep step;
    step.victim = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(g.size())));

    std::vector<Vertex> candidates;
    if (g.per_step()) {
        // Only p = 1 passes check_compatible, so every other vertex is a candidate.
        for (Vertex w = 0; w < static_cast<Vertex>(g.size()); ++w)
            if (w != step.victim)
                candidates.push_back(w);
    } else {
        candidates = g.in_neighbors(step.victim);
    }
    if (candidates.empty())
        throw StructuralError(fmt::format("vertex {} has no incoming neighbor", step.victim));

    for (Vertex w : candidates)
        (pop.occupancy[static_cast<std::size_t>(w)] == Type::A ? step.pool.a : step.pool.b) += 1;
    step.winner = rng.bernoulli(birth_probabilities(step.pool, fitness).p_A) ? Type::A : Type::B;

    const auto n_of_type = step.pool.count(step.winner);
    auto target = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n_of_type)));
    for (Vertex w : candidates)
        if (pop.occupancy[static_cast<std::size_t>(w)] == step.winner && target-- == 0) {
            step.parent = w;
            break;
        }
    pop.occupancy[static_cast<std::size_t>(step.victim)] = step.winner;
    return step;
}

} // namespace moran
