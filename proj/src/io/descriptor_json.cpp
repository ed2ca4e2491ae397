#include "io/descriptor_json.hpp"

#include "core/errors.hpp"
#include "core/process.hpp"

#include <fmt/format.h>
#include <sstream>

namespace moran {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& name, const std::array<Enum, N>& values, const char* what)
{
    for (Enum v : values)
        if (to_string(v) == name)
            return v;
    std::string options;
    for (Enum v : values)
        options += (options.empty() ? "" : ", ") + std::string(to_string(v));
    throw ParseError(fmt::format("unknown {} '{}' (expected one of: {})", what, name, options));
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback)
{
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->template get<T>();
}

template <typename F>
auto guarded(const char* what, F&& f)
{
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("invalid {}: {}", what, e.what()));
    }
}

} // namespace

std::string_view to_string(Estimator estimator)
{
    switch (estimator) {
    case Estimator::Mean: return "mean";
    case Estimator::Median: return "median";
    case Estimator::Mode: return "mode";
    }
    return "mean";
}

ProcessKind::Tag parse_process_tag(const std::string& name)
{
    using T = ProcessKind::Tag;
    return parse_enum(name, std::array{T::Moran, T::SeparatedBirthDeath, T::SeparatedDeathBirth, T::VariableSize},
                      "process");
}

GraphKind parse_graph_kind(const std::string& name)
{
    using G = GraphKind;
    return parse_enum(name,
                      std::array{G::Complete, G::CycleDirected, G::CycleUndirected, G::Star, G::KRegular,
                                 G::ErdosRenyiStatic, G::ErdosRenyiPerStep},
                      "graph");
}

UpdateRule parse_update_rule(const std::string& name)
{
    return parse_enum(name, std::array{UpdateRule::BirthDeath, UpdateRule::DeathBirth}, "update rule");
}

Layout::Tag parse_layout_tag(const std::string& name)
{
    using L = Layout::Tag;
    return parse_enum(name,
                      std::array{L::SemicircleSplit, L::Alternating, L::RandomBalanced, L::CountsAtRandom, L::CenterA,
                                 L::CenterB},
                      "layout");
}

Estimator parse_estimator(const std::string& name)
{
    return parse_enum(name, std::array{Estimator::Mean, Estimator::Median, Estimator::Mode}, "estimator");
}

namespace {

std::string_view to_string(DeathPool pool)
{
    return pool == DeathPool::Enlarged ? "enlarged" : "exclude-offspring";
}

} // namespace

Json model_to_json(const Model& model)
{
    Json j;
    if (const auto* wm = std::get_if<WellMixedModel>(&model)) {
        j["process"] = std::string(to_string(wm->process.tag));
        if (wm->process.tag == ProcessKind::Tag::VariableSize) {
            j["K"] = wm->process.K;
            j["s"] = wm->process.s;
        }
        if (wm->process.tag == ProcessKind::Tag::SeparatedBirthDeath)
            j["death_pool"] = std::string(to_string(wm->process.death_pool));
        if (wm->game)
            j["game"] = {wm->game->w_AA, wm->game->w_AB, wm->game->w_BA, wm->game->w_BB};
        return j;
    }
    const auto& gm = std::get<GraphModel>(model);
    j["graph"] = std::string(to_string(gm.graph.kind));
    j["n"] = gm.graph.n_vertices;
    if (gm.graph.kind == GraphKind::KRegular)
        j["k"] = gm.graph.k;
    if (gm.graph.kind == GraphKind::ErdosRenyiStatic || gm.graph.kind == GraphKind::ErdosRenyiPerStep)
        j["p"] = gm.graph.p;
    if (gm.graph.kind == GraphKind::ErdosRenyiStatic)
        j["graph_seed"] = gm.graph.graph_seed;
    j["rule"] = std::string(to_string(gm.rule));
    return j;
}

Model model_from_json(const Json& j)
{
    return guarded("model descriptor", [&]() -> Model {
        if (j.contains("process")) {
            WellMixedModel wm;
            wm.process.tag = parse_process_tag(j.at("process").get<std::string>());
            if (wm.process.tag == ProcessKind::Tag::VariableSize) {
                wm.process.K = j.at("K").get<std::int64_t>();
                wm.process.s = get_or<double>(j, "s", default_sigmoid_steepness(wm.process.K));
            }
            const auto pool = get_or<std::string>(j, "death_pool", "exclude-offspring");
            if (pool == "enlarged")
                wm.process.death_pool = DeathPool::Enlarged;
            else if (pool != "exclude-offspring")
                throw ParseError(fmt::format("unknown death_pool '{}'", pool));
            if (j.contains("game")) {
                const auto w = j.at("game").get<std::vector<double>>();
                if (w.size() != 4)
                    throw ParseError("game matrix needs 4 entries: w_AA, w_AB, w_BA, w_BB");
                wm.game = GameMatrix{w[0], w[1], w[2], w[3]};
            }
            return wm;
        }
        if (j.contains("graph")) {
            GraphModel gm;
            gm.graph.kind = parse_graph_kind(j.at("graph").get<std::string>());
            gm.graph.n_vertices = j.at("n").get<std::int64_t>();
            gm.graph.k = get_or<std::int64_t>(j, "k", 0);
            gm.graph.p = get_or<double>(j, "p", 1.0);
            gm.graph.graph_seed = get_or<std::uint64_t>(j, "graph_seed", 0);
            gm.rule = parse_update_rule(get_or<std::string>(j, "rule", "bd"));
            return gm;
        }
        throw ParseError("model descriptor needs a 'process' or a 'graph' field");
    });
}

Json init_to_json(const InitialCondition& init)
{
    Json j;
    if (const auto* s = std::get_if<PopulationState>(&init)) {
        j["a"] = s->a;
        j["b"] = s->b;
        return j;
    }
    const auto& layout = std::get<Layout>(init);
    j["layout"] = std::string(to_string(layout.tag));
    if (layout.tag == Layout::Tag::CountsAtRandom || layout.tag == Layout::Tag::CenterA ||
        layout.tag == Layout::Tag::CenterB)
        j["a"] = layout.a;
    if (layout.tag == Layout::Tag::RandomBalanced || layout.tag == Layout::Tag::CountsAtRandom)
        j["seed"] = layout.seed;
    return j;
}

InitialCondition init_from_json(const Json& j)
{
    return guarded("initial condition", [&]() -> InitialCondition {
        if (j.contains("layout")) {
            Layout layout;
            layout.tag = parse_layout_tag(j.at("layout").get<std::string>());
            layout.a = get_or<std::int64_t>(j, "a", 0);
            layout.seed = get_or<std::uint64_t>(j, "seed", 0);
            return layout;
        }
        return PopulationState{j.at("a").get<std::int64_t>(), j.at("b").get<std::int64_t>()};
    });
}

Json prior_to_json(const PriorSpec& prior)
{
    Json j;
    switch (prior.tag) {
    case PriorSpec::Tag::Gamma:
        j["kind"] = "gamma";
        j["k"] = prior.k;
        j["theta"] = prior.theta;
        break;
    case PriorSpec::Tag::Uniform: j["kind"] = "uniform"; break;
    case PriorSpec::Tag::Fps: {
        j["kind"] = "fps";
        Json entries = Json::array();
        for (const auto& [key, c] : prior.fps.entries())
            entries.push_back({key.M, key.a, c.alpha, c.beta, c.gamma});
        j["entries"] = std::move(entries);
        break;
    }
    }
    return j;
}

PriorSpec prior_from_json(const Json& j)
{
    return guarded("prior", [&]() -> PriorSpec {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "gamma")
            return PriorSpec::gamma(get_or<double>(j, "k", 2.0), get_or<double>(j, "theta", 2.0));
        if (kind == "uniform")
            return PriorSpec::uniform();
        if (kind == "fps") {
            FpsParameterSet params;
            for (const auto& e : j.at("entries")) {
                const auto v = e.get<std::vector<double>>();
                if (v.size() < 4 || v.size() > 5)
                    throw ParseError("fps prior entries are [M, a, alpha, beta(, gamma)]");
                params.add({static_cast<std::int64_t>(v[0]), static_cast<std::int64_t>(v[1])},
                           {v[2], v[3], v.size() == 5 ? v[4] : 0.0});
            }
            return PriorSpec::fps_prior(std::move(params));
        }
        throw ParseError(fmt::format("unknown prior kind '{}'", kind));
    });
}

namespace {

std::vector<double> split_numbers(const std::string& text, char sep)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError(fmt::format("'{}' is not a number", item));
        }
    }
    return out;
}

} // namespace

PriorSpec parse_prior(const std::string& text)
{
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "uniform")
        return PriorSpec::uniform();
    if (head == "gamma") {
        if (body.empty())
            return PriorSpec::gamma();
        const auto v = split_numbers(body, ',');
        if (v.size() != 2)
            throw ParseError("gamma prior syntax is gamma:K,THETA");
        return PriorSpec::gamma(v[0], v[1]);
    }
    if (head == "fps-ones") {
        const auto v = split_numbers(body, ',');
        if (v.size() != 1 || v[0] < 2)
            throw ParseError("fps-ones prior syntax is fps-ones:N with N >= 2");
        return PriorSpec::fps_prior(FpsParameterSet::uniform_counts(static_cast<std::int64_t>(v[0])));
    }
    if (head == "fps") {
        FpsParameterSet params;
        std::stringstream ss(body);
        std::string entry;
        while (std::getline(ss, entry, ';')) {
            const auto v = split_numbers(entry, ',');
            if (v.size() < 4 || v.size() > 5)
                throw ParseError("fps prior entries are M,a,alpha,beta[,gamma]");
            params.add({static_cast<std::int64_t>(v[0]), static_cast<std::int64_t>(v[1])},
                       {v[2], v[3], v.size() == 5 ? v[4] : 0.0});
        }
        return PriorSpec::fps_prior(std::move(params));
    }
    throw ParseError(fmt::format("unknown prior '{}' (gamma:K,THETA | uniform | fps-ones:N | fps:...)", text));
}

std::string format_prior(const PriorSpec& prior)
{
    switch (prior.tag) {
    case PriorSpec::Tag::Gamma: return fmt::format("gamma:{},{}", prior.k, prior.theta);
    case PriorSpec::Tag::Uniform: return "uniform";
    case PriorSpec::Tag::Fps: {
        std::string out = "fps:";
        bool first = true;
        for (const auto& [key, c] : prior.fps.entries()) {
            out += fmt::format("{}{},{},{},{}", first ? "" : ";", key.M, key.a, c.alpha, c.beta);
            if (c.gamma != 0.0)
                out += fmt::format(",{}", c.gamma);
            first = false;
        }
        return out;
    }
    }
    return "uniform";
}

Json grid_to_json(const GridConfig& grid)
{
    Json j;
    j["points"] = grid.points;
    j["r_max"] = grid.r_max;
    j["uniform_until"] = grid.uniform_until;
    return j;
}

GridConfig grid_from_json(const Json& j)
{
    return guarded("grid", [&] {
        GridConfig g;
        g.points = get_or<std::size_t>(j, "points", g.points);
        g.r_max = get_or<double>(j, "r_max", g.r_max);
        g.uniform_until = get_or<double>(j, "uniform_until", g.uniform_until);
        return g;
    });
}

} // namespace moran
