#pragma once

#include "core/population.hpp"
#include "graph/graph.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace moran {

enum class EventKind : std::uint8_t { MoranComposite, Birth, Death };

std::string_view to_string(EventKind kind);

/// One atomic observation. For Birth and MoranComposite `winner` is the reproducer; for
/// Death it is the removed individual. Only pool composition, winner and (for composite
/// Moran steps) the state change are ever read by inference.
struct SelectionEvent {
    std::uint64_t step = 0;
    EventKind kind = EventKind::Birth;
    PopulationState pool;
    Type winner = Type::A;
    PopulationState pre_state;
    PopulationState post_state;
    bool stayed = false;  // MoranComposite only
    Vertex parent = -1;   // graph events only
    Vertex victim = -1;

    bool informative_kind() const { return kind != EventKind::Death; }

    friend bool operator==(const SelectionEvent&, const SelectionEvent&) = default;
};

struct WellMixedModel {
    ProcessKind process;
    std::optional<GameMatrix> game; // overrides the constant landscape (1, r)

    friend bool operator==(const WellMixedModel&, const WellMixedModel&) = default;
};

struct GraphModel {
    GraphSpec graph;
    UpdateRule rule = UpdateRule::BirthDeath;

    friend bool operator==(const GraphModel&, const GraphModel&) = default;
};

using Model = std::variant<WellMixedModel, GraphModel>;
using InitialCondition = std::variant<PopulationState, Layout>;

enum class Outcome : std::uint8_t { FixatedA, FixatedB, Truncated };

std::string_view to_string(Outcome outcome);

struct EventLog {
    Model model;
    double true_r = 1.0; // validation only; inference never reads it
    InitialCondition init;
    PopulationState initial_state;
    std::vector<Type> initial_occupancy; // graph models only
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 0;
    std::uint64_t steps = 0; // process steps taken (a separated cycle counts once)
    std::vector<SelectionEvent> events;
    Outcome outcome = Outcome::Truncated;

    PopulationState final_state() const { return events.empty() ? initial_state : events.back().post_state; }
};

} // namespace moran
