#include "moraninfer/moraninfer.h"

#include "core/errors.hpp"
#include "core/process.hpp"
#include "harness/experiments.hpp"
#include "infogain/infogain.hpp"
#include "io/eventlog_io.hpp"
#include "sim/simulate.hpp"

#include <string>

struct mi_buffer {
    std::string text;
};

struct mi_event_log {
    moran::EventLog log;
};

namespace {

thread_local std::string last_error;

mi_status fail(mi_status status, const char* what)
{
    last_error = what;
    return status;
}

/// Status for a trajectory failure inside a batch, by the type of the original exception.
mi_status classify(const std::exception_ptr& cause) noexcept
{
    if (!cause)
        return MI_ERR_BATCH;
    try {
        std::rethrow_exception(cause);
    } catch (const moran::NumericalError&) {
        return MI_ERR_NUMERICAL;
    } catch (const moran::StructuralError&) {
        return MI_ERR_STRUCTURAL;
    } catch (const moran::DomainError&) {
        return MI_ERR_DOMAIN;
    } catch (...) {
        return MI_ERR_BATCH;
    }
}

/// Runs `body`, translating exceptions into status codes and the thread-local message.
template <typename F>
mi_status guard(F&& body) noexcept
{
    try {
        body();
        last_error.clear();
        return MI_OK;
    } catch (const moran::NumericalError& e) {
        return fail(MI_ERR_NUMERICAL, e.what());
    } catch (const moran::StructuralError& e) {
        return fail(MI_ERR_STRUCTURAL, e.what());
    } catch (const moran::ParseError& e) {
        return fail(MI_ERR_PARSE, e.what());
    } catch (const moran::DomainError& e) {
        return fail(MI_ERR_DOMAIN, e.what());
    } catch (const moran::BatchError& e) {
        return fail(classify(e.cause()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(MI_ERR_PARSE, e.what());
    } catch (const std::exception& e) {
        return fail(MI_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MI_ERR_INTERNAL, "unknown exception");
    }
}

moran::Json parse_request(const char* text)
{
    if (!text || !*text)
        return moran::Json::object();
    try {
        return moran::Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw moran::ParseError(std::string("request is not valid JSON: ") + e.what());
    }
}

moran::OutputFormat to_format(mi_format format)
{
    switch (format) {
    case MI_FORMAT_CSV: return moran::OutputFormat::Csv;
    case MI_FORMAT_JSON: return moran::OutputFormat::Json;
    }
    throw moran::DomainError("unknown output format");
}

#define MI_REQUIRE(ptr)                                                                                                \
    do {                                                                                                               \
        if (!(ptr))                                                                                                    \
            return fail(MI_ERR_INVALID_ARGUMENT, #ptr " must not be null");                                            \
    } while (0)

} // namespace

extern "C" {

const char* mi_version(void) { return MORANINFER_VERSION; }

const char* mi_last_error(void) { return last_error.c_str(); }

const char* mi_status_name(mi_status status)
{
    switch (status) {
    case MI_OK: return "ok";
    case MI_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case MI_ERR_DOMAIN: return "domain-error";
    case MI_ERR_STRUCTURAL: return "structural-error";
    case MI_ERR_NUMERICAL: return "numerical-error";
    case MI_ERR_PARSE: return "parse-error";
    case MI_ERR_BATCH: return "batch-error";
    case MI_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

const char* mi_buffer_data(const mi_buffer* buffer) { return buffer ? buffer->text.c_str() : ""; }

size_t mi_buffer_size(const mi_buffer* buffer) { return buffer ? buffer->text.size() : 0; }

void mi_buffer_free(mi_buffer* buffer) { delete buffer; }

mi_status mi_fixation_probability(double r, int64_t n, int64_t b, double* out)
{
    MI_REQUIRE(out);
    return guard([&] { *out = moran::fixation_probability(r, n, b); });
}

mi_status mi_moran_transition(int64_t a, int64_t b, double f_a, double f_b, double* up, double* down, double* stay)
{
    MI_REQUIRE(up);
    MI_REQUIRE(down);
    MI_REQUIRE(stay);
    return guard([&] {
        const auto t = moran::moran_transition_probs({a, b}, {f_a, f_b});
        *up = t.up;
        *down = t.down;
        *stay = t.stay;
    });
}

mi_status mi_birth_probability_a(int64_t a, int64_t b, double r, double* out)
{
    MI_REQUIRE(out);
    return guard([&] { *out = moran::birth_probabilities({a, b}, moran::constant_fitness(r)).p_A; });
}

mi_status mi_bernoulli_kl(double p, double p_hat, double* out)
{
    MI_REQUIRE(out);
    return guard([&] { *out = moran::bernoulli_kl(p, p_hat); });
}

mi_status mi_beta_kl(double alpha_new, double beta_new, double alpha_old, double beta_old, double* out)
{
    MI_REQUIRE(out);
    return guard([&] { *out = moran::beta_kl(alpha_new, beta_new, alpha_old, beta_old); });
}

mi_status mi_simulate(const char* request_json, mi_event_log** out)
{
    MI_REQUIRE(out);
    *out = nullptr;
    return guard([&] {
        const auto spec = moran::simulate_spec_from_json(parse_request(request_json));
        *out = new mi_event_log{moran::run_simulate(spec)};
    });
}

mi_status mi_event_log_parse(const char* text, size_t length, mi_event_log** out)
{
    MI_REQUIRE(text);
    MI_REQUIRE(out);
    *out = nullptr;
    return guard([&] { *out = new mi_event_log{moran::event_log_from_string(std::string(text, length))}; });
}

mi_status mi_event_log_serialize(const mi_event_log* log, mi_buffer** out)
{
    MI_REQUIRE(log);
    MI_REQUIRE(out);
    *out = nullptr;
    return guard([&] { *out = new mi_buffer{moran::event_log_to_string(log->log)}; });
}

size_t mi_event_log_event_count(const mi_event_log* log) { return log ? log->log.events.size() : 0; }

uint64_t mi_event_log_steps(const mi_event_log* log) { return log ? log->log.steps : 0; }

const char* mi_event_log_outcome(const mi_event_log* log)
{
    return log ? moran::to_string(log->log.outcome).data() : "";
}

mi_status mi_event_log_check(const mi_event_log* log)
{
    MI_REQUIRE(log);
    return guard([&] { moran::check_replay(log->log); });
}

void mi_event_log_free(mi_event_log* log) { delete log; }

mi_status mi_infer(const mi_event_log* log, const char* request_json, mi_format format, mi_buffer** summary,
                   mi_buffer** posterior)
{
    MI_REQUIRE(log);
    MI_REQUIRE(summary);
    *summary = nullptr;
    if (posterior)
        *posterior = nullptr;
    return guard([&] {
        const auto fmt = to_format(format);
        const auto request = moran::infer_request_from_json(parse_request(request_json));
        const auto grid = moran::RGrid::make(request.inference.grid);
        const auto result =
            moran::infer_log(log->log, request.inference, grid, request.sample_size, request.sample_seed);
        auto text = moran::render(moran::infer_report(log->log, request, result), fmt);
        std::string post_text;
        if (posterior)
            post_text = moran::posterior_csv(*result.posterior);
        *summary = new mi_buffer{std::move(text)};
        if (posterior)
            *posterior = new mi_buffer{std::move(post_text)};
    });
}

mi_status mi_run_experiment(const char* kind, const char* request_json, mi_format format, unsigned threads,
                            mi_buffer** out)
{
    MI_REQUIRE(kind);
    MI_REQUIRE(out);
    *out = nullptr;
    return guard([&] {
        const auto fmt = to_format(format);
        const unsigned workers = threads ? threads : moran::default_threads();
        *out = new mi_buffer{moran::run_experiment(kind, parse_request(request_json), fmt, workers)};
    });
}

} // extern "C"
