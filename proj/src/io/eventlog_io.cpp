#include "io/eventlog_io.hpp"

#include "core/errors.hpp"

#include <fmt/format.h>
#include <istream>
#include <ostream>
#include <sstream>

namespace moran {

namespace {

Json state_json(PopulationState s) { return Json::array({s.a, s.b}); }

PopulationState state_from(const Json& j)
{
    if (!j.is_array() || j.size() != 2)
        throw ParseError("population state must be a two-element array [a, b]");
    return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
}

Type type_from(const std::string& s)
{
    if (s == "A")
        return Type::A;
    if (s == "B")
        return Type::B;
    throw ParseError(fmt::format("unknown type '{}'", s));
}

EventKind kind_from(const std::string& s)
{
    for (auto k : {EventKind::MoranComposite, EventKind::Birth, EventKind::Death})
        if (to_string(k) == s)
            return k;
    throw ParseError(fmt::format("unknown event kind '{}'", s));
}

Outcome outcome_from(const std::string& s)
{
    for (auto o : {Outcome::FixatedA, Outcome::FixatedB, Outcome::Truncated})
        if (to_string(o) == s)
            return o;
    throw ParseError(fmt::format("unknown outcome '{}'", s));
}

} // namespace

Json event_to_json(const SelectionEvent& e)
{
    Json j;
    j["step"] = e.step;
    j["kind"] = std::string(to_string(e.kind));
    j["pool_a"] = e.pool.a;
    j["pool_b"] = e.pool.b;
    j["winner"] = std::string(1, type_char(e.winner));
    j["pre_state"] = state_json(e.pre_state);
    j["post_state"] = state_json(e.post_state);
    j["stayed"] = e.stayed;
    if (e.parent >= 0) {
        j["parent"] = e.parent;
        j["victim"] = e.victim;
    }
    return j;
}

SelectionEvent event_from_json(const Json& j)
{
    SelectionEvent e;
    e.step = j.at("step").get<std::uint64_t>();
    e.kind = kind_from(j.at("kind").get<std::string>());
    e.pool = {j.at("pool_a").get<std::int64_t>(), j.at("pool_b").get<std::int64_t>()};
    e.winner = type_from(j.at("winner").get<std::string>());
    e.pre_state = state_from(j.at("pre_state"));
    e.post_state = state_from(j.at("post_state"));
    e.stayed = j.value("stayed", false);
    if (j.contains("parent")) {
        e.parent = j.at("parent").get<Vertex>();
        e.victim = j.at("victim").get<Vertex>();
    }
    return e;
}

void write_event_log(std::ostream& out, const EventLog& log)
{
    Json header;
    header["record"] = "header";
    header["format"] = kEventLogFormat;
    header["version"] = kEventLogVersion;
    header["model"] = model_to_json(log.model);
    header["init"] = init_to_json(log.init);
    header["r"] = log.true_r;
    header["seed"] = log.seed;
    header["max_steps"] = log.max_steps;
    header["initial_state"] = state_json(log.initial_state);
    if (!log.initial_occupancy.empty()) {
        std::string occ;
        occ.reserve(log.initial_occupancy.size());
        for (Type t : log.initial_occupancy)
            occ.push_back(type_char(t));
        header["initial_occupancy"] = occ;
    }
    out << header.dump() << '\n';
    for (const auto& e : log.events)
        out << event_to_json(e).dump() << '\n';
    Json end;
    end["record"] = "end";
    end["outcome"] = std::string(to_string(log.outcome));
    end["steps"] = log.steps;
    end["n_events"] = log.events.size();
    out << end.dump() << '\n';
}

std::string event_log_to_string(const EventLog& log)
{
    std::ostringstream os;
    write_event_log(os, log);
    return os.str();
}

EventLog read_event_log(std::istream& in)
{
    EventLog log;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    bool have_end = false;
    std::uint64_t declared_events = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        if (have_end)
            throw ParseError(fmt::format("event log line {}: data after end record", line_no));
        try {
            const Json j = Json::parse(line);
            const std::string record = j.value("record", "");
            if (!have_header) {
                if (record != "header" || j.value("format", "") != kEventLogFormat)
                    throw ParseError("first record must be a moran-infer-eventlog header");
                if (j.at("version").get<int>() != kEventLogVersion)
                    throw ParseError(fmt::format("unsupported event log version {}", j.at("version").dump()));
                log.model = model_from_json(j.at("model"));
                log.init = init_from_json(j.at("init"));
                log.true_r = j.at("r").get<double>();
                log.seed = j.at("seed").get<std::uint64_t>();
                log.max_steps = j.at("max_steps").get<std::uint64_t>();
                log.initial_state = state_from(j.at("initial_state"));
                if (j.contains("initial_occupancy"))
                    for (char c : j.at("initial_occupancy").get<std::string>())
                        log.initial_occupancy.push_back(type_from(std::string(1, c)));
                have_header = true;
            } else if (record == "end") {
                log.outcome = outcome_from(j.at("outcome").get<std::string>());
                log.steps = j.at("steps").get<std::uint64_t>();
                declared_events = j.at("n_events").get<std::uint64_t>();
                have_end = true;
            } else {
                log.events.push_back(event_from_json(j));
            }
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("event log line {}: {}", line_no, e.what()));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(fmt::format("event log line {}: {}", line_no, e.what()));
        }
    }
    if (!have_header)
        throw ParseError("event log is empty");
    if (!have_end)
        throw ParseError("event log has no end record (truncated file?)");
    if (declared_events != log.events.size())
        throw ParseError(
            fmt::format("event log declares {} events but holds {}", declared_events, log.events.size()));
    return log;
}

EventLog event_log_from_string(const std::string& text)
{
    std::istringstream is(text);
    return read_event_log(is);
}

} // namespace moran
