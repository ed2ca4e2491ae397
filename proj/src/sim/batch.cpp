#include "sim/batch.hpp"

#include "core/errors.hpp"
#include "core/random.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace moran {

BatchError::BatchError(std::size_t index, const std::string& what, std::exception_ptr cause)
    : std::runtime_error("trajectory " + std::to_string(index) + ": " + what), index_(index), cause_(std::move(cause))
{
}

unsigned default_threads()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t begin, std::size_t end, unsigned threads, const std::function<void(std::size_t)>& body)
{
    if (end <= begin)
        return;
    const std::size_t n = end - begin;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));

    std::atomic<std::size_t> next{begin};
    std::mutex error_mutex;
    std::size_t error_index = end;
    std::string error_message;
    std::exception_ptr error_cause;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= end)
                return;
            try {
                body(i);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error_message = e.what();
                    error_cause = std::current_exception();
                }
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    if (error_index != end)
        throw BatchError(error_index, error_message, error_cause);
}

std::vector<EventLog> run_batch(const PreparedModel& model, double r, const BatchConfig& config)
{
    std::vector<EventLog> logs(config.n_trajectories);
    run_batch_streamed(model, r, config, [&](std::size_t i, EventLog&& log) { logs[i] = std::move(log); });
    return logs;
}

void run_batch_streamed(const PreparedModel& model, double r, const BatchConfig& config,
                        const std::function<void(std::size_t, EventLog&&)>& reduce)
{
    if (config.n_trajectories == 0)
        throw DomainError("batch needs at least one trajectory");
    const auto max_steps = config.max_steps ? config.max_steps : default_max_steps(model.initial_size());
    parallel_for(0, config.n_trajectories, config.threads, [&](std::size_t i) {
        const auto seed = derive_seed(config.base_seed, config.first_index + i);
        reduce(i, run_trajectory(model, r, seed, max_steps));
    });
}

} // namespace moran
