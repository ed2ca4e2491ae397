#pragma once

#include "sim/events.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace moran {

/// A model bound to its runtime resources (built topology). Immutable and shareable
/// across concurrent trajectories.
class PreparedModel {
public:
    PreparedModel(Model model, InitialCondition init);

    const Model& model() const { return model_; }
    const InitialCondition& init() const { return init_; }
    const std::shared_ptr<const GraphTopology>& topology() const { return topology_; }
    bool is_graph() const { return std::holds_alternative<GraphModel>(model_); }

    /// Number of individuals at the start.
    std::int64_t initial_size() const;

private:
    Model model_;
    InitialCondition init_;
    std::shared_ptr<const GraphTopology> topology_;
};

/// Default step cap: 50 N^2.
std::uint64_t default_max_steps(std::int64_t N);

EventLog run_trajectory(const PreparedModel& prepared, double r, std::uint64_t seed, std::uint64_t max_steps);
EventLog run_trajectory(const Model& model, const InitialCondition& init, double r, std::uint64_t seed,
                        std::uint64_t max_steps);

/// Uniform sample without replacement of k Birth/MoranComposite events, in log order.
std::vector<SelectionEvent> sample_events(const EventLog& log, std::size_t k, std::uint64_t seed);

/// Throws DomainError naming the first event whose transition is inconsistent.
void check_replay(const EventLog& log);

struct TrajectoryStats {
    std::size_t n = 0;
    double mean_length = 0.0;
    double std_length = 0.0;
    double mean_length_fixated = 0.0; // over fixated runs only; 0 if none
    double fixated_a_fraction = 0.0;
    double fixated_b_fraction = 0.0;
    std::size_t truncated = 0;
};

struct TrajectoryOutline {
    std::uint64_t steps = 0;
    Outcome outcome = Outcome::Truncated;
};

TrajectoryStats trajectory_stats(std::span<const TrajectoryOutline> batch);
TrajectoryStats trajectory_stats(std::span<const EventLog> batch);

} // namespace moran
