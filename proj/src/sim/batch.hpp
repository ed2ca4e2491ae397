#pragma once

#include "sim/simulate.hpp"

#include <cstdint>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace moran {

/// Failure of one item in a parallel batch; `index` is the item's batch index.
class BatchError : public std::runtime_error {
public:
    BatchError(std::size_t index, const std::string& what, std::exception_ptr cause = nullptr);
    std::size_t index() const { return index_; }
    /// The original failure, for callers that classify by exception type.
    std::exception_ptr cause() const { return cause_; }

private:
    std::size_t index_;
    std::exception_ptr cause_;
};

/// Hardware concurrency, at least 1.
unsigned default_threads();

/// Calls body(i) for i in [begin, end) on up to `threads` workers. Rethrows the failure
/// with the lowest index as BatchError after all workers finish.
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, const std::function<void(std::size_t)>& body);

struct BatchConfig {
    std::uint64_t base_seed = 0;
    std::size_t first_index = 0;
    std::size_t n_trajectories = 1;
    std::uint64_t max_steps = 0; // 0 selects default_max_steps(N)
    unsigned threads = 1;
};

/// Trajectory i uses derive_seed(base_seed, first_index + i).
std::vector<EventLog> run_batch(const PreparedModel& model, double r, const BatchConfig& config);

/// Streams each trajectory into `reduce(index, log)` instead of storing the batch.
/// `reduce` runs concurrently and must only write to index-owned storage.
void run_batch_streamed(const PreparedModel& model, double r, const BatchConfig& config,
                        const std::function<void(std::size_t, EventLog&&)>& reduce);

} // namespace moran
