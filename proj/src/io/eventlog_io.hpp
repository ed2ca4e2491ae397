#pragma once

#include "io/descriptor_json.hpp"
#include "sim/events.hpp"

#include <iosfwd>
#include <string>

namespace moran {

inline constexpr const char* kEventLogFormat = "moran-infer-eventlog";
inline constexpr int kEventLogVersion = 1;

/// Line-delimited JSON: one header record, one record per event, one end record.
///
///   {"record":"header","format":"moran-infer-eventlog","version":1,"model":{..},"init":{..},
///    "r":..,"seed":..,"max_steps":..,"initial_state":[a,b],"initial_occupancy":"AB.."}
///   {"step":..,"kind":"birth","pool_a":..,"pool_b":..,"winner":"A","pre_state":[a,b],
///    "post_state":[a,b],"stayed":false[,"parent":..,"victim":..]}
///   {"record":"end","outcome":"fixated-a","steps":..,"n_events":..}
void write_event_log(std::ostream& out, const EventLog& log);
std::string event_log_to_string(const EventLog& log);

/// Parses and checks structure (not replay; see check_replay). Throws ParseError.
EventLog read_event_log(std::istream& in);
EventLog event_log_from_string(const std::string& text);

Json event_to_json(const SelectionEvent& event);
SelectionEvent event_from_json(const Json& j);

} // namespace moran
